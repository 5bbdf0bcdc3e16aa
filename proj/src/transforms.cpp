#include "mwf/transforms.hpp"

#include <cmath>
#include <numbers>

#include "mwf/fft.hpp"

namespace mwf {
namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_frame(const CVec& s, int M, int N, const char* who) {
    require(M >= 1 && N >= 1, "grid dimensions must be positive");
    if (s.size() != static_cast<size_t>(M) * static_cast<size_t>(N))
        throw std::invalid_argument(std::string(who) + ": frame length does not equal M*N");
}

}  // namespace

LatticeGrid dzt(const CVec& s, int M, int N) {
    check_frame(s, M, N, "dzt");
    LatticeGrid X(M, N);
    CVec col(N), out(N);
    for (int l = 0; l < M; ++l) {
        for (int n = 0; n < N; ++n) col[n] = s[static_cast<size_t>(l) + static_cast<size_t>(n) * M];
        fft::forward_unitary(col.data(), out.data(), N);
        for (int k = 0; k < N; ++k) X(k, l) = out[k];
    }
    return X;
}

CVec idzt(const LatticeGrid& X) {
    CVec s(X.size());
    CVec col(X.N), out(X.N);
    for (int l = 0; l < X.M; ++l) {
        for (int k = 0; k < X.N; ++k) col[k] = X(k, l);
        fft::inverse_unitary(col.data(), out.data(), X.N);
        for (int n = 0; n < X.N; ++n) s[static_cast<size_t>(l) + static_cast<size_t>(n) * X.M] = out[n];
    }
    return s;
}

TFGrid isfft(const LatticeGrid& X) {
    const int M = X.M, N = X.N;
    // Doppler -> symbol axis first (inverse), then delay -> subcarrier (forward).
    TFGrid tmp(M, N);  // tmp(n,l)
    CVec colin(N), colout(N);
    for (int l = 0; l < M; ++l) {
        for (int k = 0; k < N; ++k) colin[k] = X(k, l);
        fft::inverse_unitary(colin.data(), colout.data(), N);
        for (int n = 0; n < N; ++n) tmp(n, l) = colout[n];
    }
    TFGrid Xtf(M, N);
    CVec rowout(M);
    for (int n = 0; n < N; ++n) {
        fft::forward_unitary(&tmp.values[static_cast<size_t>(M) * n], rowout.data(), M);
        for (int m = 0; m < M; ++m) Xtf(n, m) = rowout[m];
    }
    return Xtf;
}

LatticeGrid sfft(const TFGrid& Xtf) {
    const int M = Xtf.M, N = Xtf.N;
    TFGrid tmp(M, N);  // tmp(n,l)
    CVec rowout(M);
    for (int n = 0; n < N; ++n) {
        fft::inverse_unitary(&Xtf.values[static_cast<size_t>(M) * n], rowout.data(), M);
        for (int l = 0; l < M; ++l) tmp(n, l) = rowout[l];
    }
    LatticeGrid X(M, N);
    CVec colin(N), colout(N);
    for (int l = 0; l < M; ++l) {
        for (int n = 0; n < N; ++n) colin[n] = tmp(n, l);
        fft::forward_unitary(colin.data(), colout.data(), N);
        for (int k = 0; k < N; ++k) X(k, l) = colout[k];
    }
    return X;
}

CVec heisenberg(const TFGrid& Xtf) {
    const int M = Xtf.M, N = Xtf.N;
    CVec s(static_cast<size_t>(M) * N);
    for (int n = 0; n < N; ++n)
        fft::inverse_unitary(&Xtf.values[static_cast<size_t>(M) * n], &s[static_cast<size_t>(M) * n], M);
    return s;
}

TFGrid wigner(const CVec& s, int M, int N) {
    check_frame(s, M, N, "wigner");
    TFGrid Xtf(M, N);
    for (int n = 0; n < N; ++n)
        fft::forward_unitary(&s[static_cast<size_t>(M) * n], &Xtf.values[static_cast<size_t>(M) * n], M);
    return Xtf;
}

CVec sc_ifdm_modulate(const LatticeGrid& X) {
    const std::int64_t MN = static_cast<std::int64_t>(X.M) * X.N;
    LatticeGrid Y(X.M, X.N);
    for (int k = 0; k < X.N; ++k)
        for (int l = 0; l < X.M; ++l)
            Y(k, l) = X(k, l) * fft::unit_phase(static_cast<std::int64_t>(k) * l, MN);
    return idzt(Y);
}

LatticeGrid sc_ifdm_demodulate(const CVec& s, int M, int N) {
    check_frame(s, M, N, "sc_ifdm_demodulate");
    LatticeGrid X = dzt(s, M, N);
    const std::int64_t MN = static_cast<std::int64_t>(M) * N;
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < M; ++l)
            X(k, l) *= fft::unit_phase(-static_cast<std::int64_t>(k) * l, MN);
    return X;
}

CVec InterleaverPerm::apply(const CVec& in) const {
    require(in.size() == dest.size(), "interleaver: length mismatch");
    CVec out(in.size());
    for (size_t i = 0; i < in.size(); ++i) out[static_cast<size_t>(dest[i])] = in[i];
    return out;
}

CVec InterleaverPerm::invert(const CVec& in) const {
    require(in.size() == source.size(), "interleaver: length mismatch");
    CVec out(in.size());
    for (size_t i = 0; i < in.size(); ++i) out[static_cast<size_t>(source[i])] = in[i];
    return out;
}

InterleaverPerm interleave_perm(int M, int N) {
    require(M >= 1 && N >= 1, "interleave_perm: M and N must be positive");
    InterleaverPerm p;
    p.M = M;
    p.N = N;
    const size_t MN = static_cast<size_t>(M) * N;
    p.dest.resize(MN);
    p.source.resize(MN);
    for (int k = 0; k < N; ++k)
        for (int m = 0; m < M; ++m) {
            const int src = k * M + m;
            const int dst = k + m * N;
            p.dest[static_cast<size_t>(src)] = dst;
            p.source[static_cast<size_t>(dst)] = src;
        }
    return p;
}

CVec dfnt_apply(const CVec& x, Direction dir) {
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    require(n >= 2 && n % 2 == 0, "dfnt_apply: size must be even");
    const Complex eighth = fft::unit_phase(dir == Direction::forward ? 1 : -1, 8);
    const std::int64_t sgn = (dir == Direction::forward) ? -1 : 1;
    CVec u(x.size());
    for (std::int64_t p = 0; p < n; ++p)
        u[static_cast<size_t>(p)] = x[static_cast<size_t>(p)] * fft::unit_phase(sgn * p * p, 2 * n);
    CVec v = (dir == Direction::forward) ? fft::inverse_unitary(u) : fft::forward_unitary(u);
    for (std::int64_t p = 0; p < n; ++p)
        v[static_cast<size_t>(p)] *= eighth * fft::unit_phase(sgn * p * p, 2 * n);
    return v;
}

Complex afdm_c2_phase(double c2, std::int64_t i) {
    // c2*i^2 can reach ~1e6 for frame-sized i; reduce the cycle count in long
    // double so the fractional part keeps ~1e-14 accuracy before cos/sin.
    const long double cycles = static_cast<long double>(c2) * static_cast<long double>(i) * static_cast<long double>(i);
    long double frac = cycles - std::floor(cycles);
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(frac);
    return {std::cos(angle), std::sin(angle)};
}

CVec daft_apply(const CVec& x, const AfdmParams& params, Direction dir) {
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    require(n >= 1, "daft_apply: empty input");
    require(params.c1_prime >= 0, "daft_apply: c1_prime must be nonnegative");
    const std::int64_t den = 2 * n;  // c1 = c1_prime / (2MN)
    CVec u(x.size());
    if (dir == Direction::inverse) {
        for (std::int64_t i = 0; i < n; ++i)
            u[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] * afdm_c2_phase(params.c2, i);
        CVec v = fft::inverse_unitary(u);
        for (std::int64_t p = 0; p < n; ++p)
            v[static_cast<size_t>(p)] *= fft::unit_phase(params.c1_prime * p * p, den);
        return v;
    }
    for (std::int64_t p = 0; p < n; ++p)
        u[static_cast<size_t>(p)] = x[static_cast<size_t>(p)] * fft::unit_phase(-params.c1_prime * p * p, den);
    CVec v = fft::forward_unitary(u);
    for (std::int64_t i = 0; i < n; ++i)
        v[static_cast<size_t>(i)] *= std::conj(afdm_c2_phase(params.c2, i));
    return v;
}

}  // namespace mwf
