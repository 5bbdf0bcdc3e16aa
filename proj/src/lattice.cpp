#include "mwf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mwf/fft.hpp"

namespace mwf {
namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

const char* kind_name(ChirpKind kind) {
    switch (kind) {
        case ChirpKind::fmcw: return "fmcw";
        case ChirpKind::ocdm: return "ocdm";
        case ChirpKind::afdm: return "afdm";
    }
    return "?";
}

std::int64_t imod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Candidate closed-form support rows for a chirp. The afdm sign argument
// selects between k = [i + sign*c1'(M/2 + l)]_N variants.
std::vector<int> closed_form_support(ChirpKind kind, int M, int N, int index, int c1p, int sign) {
    std::vector<int> k_of_l(static_cast<size_t>(M));
    for (int l = 0; l < M; ++l) {
        std::int64_t k = 0;
        switch (kind) {
            case ChirpKind::fmcw: k = imod(M / 2 + l, N); break;
            case ChirpKind::ocdm: k = imod(static_cast<std::int64_t>(index) - l - M / 2, N); break;
            case ChirpKind::afdm:
                k = imod(static_cast<std::int64_t>(index) +
                             static_cast<std::int64_t>(sign) * c1p * (M / 2 + static_cast<std::int64_t>(l)),
                         N);
                break;
        }
        k_of_l[static_cast<size_t>(l)] = static_cast<int>(k);
    }
    return k_of_l;
}

// Fraction of the projected chirp's lattice energy lying off the candidate
// support. The map is accepted only when this is negligible.
double off_support_fraction(const LatticeGrid& X, const std::vector<int>& k_of_l) {
    double total = 0.0, on = 0.0;
    for (int l = 0; l < X.M; ++l) {
        for (int k = 0; k < X.N; ++k) total += std::norm(X(k, l));
        on += std::norm(X(k_of_l[static_cast<size_t>(l)], l));
    }
    return total > 0.0 ? (total - on) / total : 0.0;
}

}  // namespace

LatticeGrid otfs_phase_apply(const LatticeGrid& X, Direction dir) {
    const std::int64_t MN = static_cast<std::int64_t>(X.M) * X.N;
    const std::int64_t sgn = (dir == Direction::forward) ? -1 : 1;
    LatticeGrid Y(X.M, X.N);
    for (int k = 0; k < X.N; ++k)
        for (int l = 0; l < X.M; ++l)
            Y(k, l) = X(k, l) * fft::unit_phase(sgn * static_cast<std::int64_t>(k) * l, MN);
    return Y;
}

CVec chirp_time_sequence(ChirpKind kind, int M, int N, int index, const AfdmParams& afdm) {
    require(M >= 1 && N >= 1, "chirp_time_sequence: M and N must be positive");
    const std::int64_t MN = static_cast<std::int64_t>(M) * N;
    CVec s(static_cast<size_t>(MN));
    switch (kind) {
        case ChirpKind::fmcw:
            for (std::int64_t p = 0; p < MN; ++p) s[static_cast<size_t>(p)] = fft::unit_phase(p * p, 2 * MN);
            break;
        case ChirpKind::ocdm: {
            const Complex eighth = fft::unit_phase(1, 8);
            for (std::int64_t p = 0; p < MN; ++p)
                s[static_cast<size_t>(p)] = eighth * fft::unit_phase(-(p - index) * (p - index), 2 * MN);
            break;
        }
        case ChirpKind::afdm: {
            const Complex c2ph = afdm_c2_phase(afdm.c2, index);
            for (std::int64_t p = 0; p < MN; ++p)
                s[static_cast<size_t>(p)] = c2ph * fft::unit_phase(afdm.c1_prime * p * p, 2 * MN) *
                                            fft::unit_phase(p * static_cast<std::int64_t>(index), MN);
            break;
        }
    }
    return s;
}

ChirpIndexMap chirp_index_map(ChirpKind kind, int M, int N, int index, const AfdmParams& afdm) {
    require(M >= 2 && N >= 1, "chirp_index_map: M must be >= 2 and N positive");
    require(M % 2 == 0, "chirp_index_map: M must be even");
    const std::int64_t MN = static_cast<std::int64_t>(M) * N;
    if (kind == ChirpKind::fmcw) {
        require(index == 0, "chirp_index_map: fmcw carries no chirp index");
    } else {
        require(index >= 0 && index < MN, "chirp_index_map: chirp index out of [0, MN)");
    }
    if (kind == ChirpKind::afdm) {
        require(afdm.c1_prime >= 1, "chirp_index_map: afdm requires c1_prime >= 1");
        require((static_cast<std::int64_t>(afdm.c1_prime) * M) % N == 0,
                "chirp_index_map: afdm sparsity requires N | c1'*M");
    } else {
        require(M % N == 0, "chirp_index_map: chirp sparsity requires N | M");
    }

    ChirpIndexMap map;
    map.kind = kind;
    map.M = M;
    map.N = N;
    map.index = index;
    map.afdm = afdm;
    switch (kind) {
        case ChirpKind::fmcw: map.beat_rate = 1; break;
        case ChirpKind::ocdm: map.beat_rate = -1; break;
        case ChirpKind::afdm: map.beat_rate = afdm.c1_prime; break;
    }

    // Project the actual chirp through the demodulator and accept whichever
    // closed form carries its energy.
    const LatticeGrid proj = sc_ifdm_demodulate(chirp_time_sequence(kind, M, N, index, afdm), M, N);
    const double tol = 1e-9;
    for (int sign : {+1, -1}) {
        std::vector<int> cand = closed_form_support(kind, M, N, index, afdm.c1_prime, sign);
        if (off_support_fraction(proj, cand) < tol) {
            map.doppler_of_delay = std::move(cand);
            map.afdm_support_sign = (kind == ChirpKind::afdm) ? sign : 0;
            return map;
        }
        if (kind != ChirpKind::afdm) break;  // only afdm has a sign ambiguity
    }
    throw NumericalError(std::string("chirp_index_map: projected ") + kind_name(kind) +
                         " chirp does not match any closed-form support (M=" + std::to_string(M) +
                         ", N=" + std::to_string(N) + ", i=" + std::to_string(index) + ")");
}

void embed_chirp(LatticeGrid& X, const ChirpIndexMap& map, Complex amplitude) {
    require(X.M == map.M && X.N == map.N, "embed_chirp: grid dimensions do not match the map");
    if (amplitude == Complex(0.0)) return;
    const std::int64_t MN = static_cast<std::int64_t>(map.M) * map.N;
    const CVec chirp = chirp_time_sequence(map.kind, map.M, map.N, map.index, map.afdm);
    for (int l = 0; l < map.M; ++l) {
        const int k = map.doppler_of_delay[static_cast<size_t>(l)];
        Complex sample = chirp[static_cast<size_t>(l)];
        sample /= std::abs(sample);  // unit modulus by construction; make it exact
        X(k, l) += amplitude * sample * fft::unit_phase(-static_cast<std::int64_t>(k) * l, MN);
    }
}

void validate_precode(const PrecodeParams& p, int M, int N) {
    require(p.alpha >= 1 && p.beta >= 1, "precode: alpha and beta must be >= 1");
    require(N % p.alpha == 0, "precode: alpha must divide N");
    require(M % p.beta == 0, "precode: beta must divide M");
    require(p.q1 >= 0 && p.q1 < p.alpha, "precode: q1 out of [0, alpha)");
    require(p.q2 >= 0 && p.q2 < p.beta, "precode: q2 out of [0, beta)");
}

LatticeGrid precode_allocate(const LatticeGrid& Xs, const PrecodeParams& p, int M, int N) {
    validate_precode(p, M, N);
    require(Xs.N == N / p.alpha && Xs.M == M / p.beta,
            "precode_allocate: payload grid must be (N/alpha) x (M/beta)");
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.alpha) * p.beta);
    LatticeGrid X(M, N);
    const int Nsub = N / p.alpha, Msub = M / p.beta;
    for (int k = 0; k < N; ++k) {
        const int a = k / Nsub;
        for (int l = 0; l < M; ++l) {
            const int b = l / Msub;
            const Complex phase = fft::unit_phase(-static_cast<std::int64_t>(a) * p.q1, p.alpha) *
                                  fft::unit_phase(static_cast<std::int64_t>(b) * p.q2, p.beta);
            X(k, l) = scale * Xs(k % Nsub, l % Msub) * phase;
        }
    }
    return X;
}

LatticeGrid precode_extract(const LatticeGrid& Xpr, const PrecodeParams& p) {
    validate_precode(p, Xpr.M, Xpr.N);
    const int Nsub = Xpr.N / p.alpha, Msub = Xpr.M / p.beta;
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.alpha) * p.beta);
    LatticeGrid Xs(Msub, Nsub);
    for (int a = 0; a < p.alpha; ++a)
        for (int b = 0; b < p.beta; ++b) {
            const Complex phase = std::conj(fft::unit_phase(-static_cast<std::int64_t>(a) * p.q1, p.alpha) *
                                            fft::unit_phase(static_cast<std::int64_t>(b) * p.q2, p.beta));
            for (int k = 0; k < Nsub; ++k)
                for (int l = 0; l < Msub; ++l)
                    Xs(k, l) += Xpr(k + a * Nsub, l + b * Msub) * phase;
        }
    // alpha*beta replicas each scaled 1/sqrt(alpha beta) sum coherently to
    // sqrt(alpha beta) X_s; one more 1/sqrt(alpha beta) lands back on X_s.
    for (auto& z : Xs.values) z *= scale;
    return Xs;
}

int TFMask::count() const {
    int c = 0;
    for (std::uint8_t v : on) c += (v != 0);
    return c;
}

TFMask tf_occupancy(int M, int N, const PrecodeParams& p) {
    validate_precode(p, M, N);
    TFMask mask;
    mask.M = M;
    mask.N = N;
    mask.on.assign(static_cast<size_t>(M) * N, 0);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            if ((n - p.q1) % p.alpha == 0 && (m - p.q2) % p.beta == 0)
                mask.on[static_cast<size_t>(m) + static_cast<size_t>(M) * n] = 1;
    return mask;
}

}  // namespace mwf
