#include "mwf/channel.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "mwf/fft.hpp"
#include "mwf/rng.hpp"
#include "mwf/transforms.hpp"

namespace mwf {

namespace {

int max_delay(const std::vector<ChannelPath>& paths) {
    int d = 0;
    for (const auto& p : paths) d = std::max(d, p.delay);
    return d;
}

void check_prefix(const PrefixSpec& prefix, size_t frame_len) {
    switch (prefix.kind) {
        case PrefixKind::none:
            if (prefix.len != 0)
                throw std::invalid_argument("prefix kind none requires len == 0");
            break;
        case PrefixKind::cp:
        case PrefixKind::rcp:
            if (prefix.len < 0 || static_cast<size_t>(prefix.len) > frame_len)
                throw std::invalid_argument("prefix length out of range");
            break;
        case PrefixKind::fcp:
            if (prefix.block_len <= 0 || frame_len % static_cast<size_t>(prefix.block_len) != 0)
                throw std::invalid_argument("fcp block length must divide the frame length");
            if (prefix.len < 0 || prefix.len > prefix.block_len)
                throw std::invalid_argument("fcp prefix longer than a block");
            break;
    }
}

}  // namespace

std::vector<ChannelPath> effective_paths(const ChannelSpec& spec) {
    std::vector<ChannelPath> paths = spec.paths;
    if (spec.normalization == ChannelNormalization::unit_power) {
        double power = 0.0;
        for (const auto& p : paths) power += std::norm(p.gain);
        if (paths.empty() || power <= 0.0)
            throw std::invalid_argument("unit_power normalization needs nonzero path gains");
        const double scale = 1.0 / std::sqrt(power);
        for (auto& p : paths) p.gain *= scale;
    }
    return paths;
}

Eigen::MatrixXcd build_channel_matrix(const ChannelSpec& spec, int MN) {
    if (MN <= 0) throw std::invalid_argument("channel matrix needs a positive size");
    const auto paths = effective_paths(spec);
    for (const auto& p : paths)
        if (p.delay < 0 || p.delay >= MN)
            throw std::invalid_argument("delay tap out of range");

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(MN, MN);
    for (const auto& path : paths) {
        for (int p = 0; p < MN; ++p) {
            const int q = ((p - path.delay) % MN + MN) % MN;
            H(p, q) += path.gain *
                       fft::unit_phase(static_cast<std::int64_t>(path.doppler) * (p - path.delay), MN);
        }
    }
    return H;
}

CVec channel_apply(const ChannelSpec& spec, const CVec& s) {
    const int MN = static_cast<int>(s.size());
    if (MN == 0) throw std::invalid_argument("channel_apply needs a nonempty frame");
    const auto paths = effective_paths(spec);
    for (const auto& p : paths)
        if (p.delay < 0 || p.delay >= MN)
            throw std::invalid_argument("delay tap out of range");

    CVec y(s.size(), Complex(0.0, 0.0));
    for (const auto& path : paths) {
        for (int p = 0; p < MN; ++p) {
            const int q = ((p - path.delay) % MN + MN) % MN;
            y[static_cast<size_t>(p)] +=
                path.gain *
                fft::unit_phase(static_cast<std::int64_t>(path.doppler) * (p - path.delay), MN) *
                s[static_cast<size_t>(q)];
        }
    }
    return y;
}

CVec add_prefix(const CVec& samples, const PrefixSpec& prefix) {
    check_prefix(prefix, samples.size());
    switch (prefix.kind) {
        case PrefixKind::none:
            return samples;
        case PrefixKind::cp:
        case PrefixKind::rcp: {
            CVec out;
            out.reserve(samples.size() + static_cast<size_t>(prefix.len));
            out.insert(out.end(), samples.end() - prefix.len, samples.end());
            out.insert(out.end(), samples.begin(), samples.end());
            return out;
        }
        case PrefixKind::fcp: {
            const size_t B = static_cast<size_t>(prefix.block_len);
            const size_t n_blocks = samples.size() / B;
            CVec out;
            out.reserve(n_blocks * (B + static_cast<size_t>(prefix.len)));
            for (size_t n = 0; n < n_blocks; ++n) {
                const auto begin = samples.begin() + static_cast<std::ptrdiff_t>(n * B);
                out.insert(out.end(), begin + static_cast<std::ptrdiff_t>(B) - prefix.len,
                           begin + static_cast<std::ptrdiff_t>(B));
                out.insert(out.end(), begin, begin + static_cast<std::ptrdiff_t>(B));
            }
            return out;
        }
    }
    throw std::logic_error("unreachable prefix kind");
}

CVec strip_prefix(const CVec& air, const PrefixSpec& prefix) {
    switch (prefix.kind) {
        case PrefixKind::none:
            return air;
        case PrefixKind::cp:
        case PrefixKind::rcp: {
            if (air.size() < static_cast<size_t>(prefix.len))
                throw std::invalid_argument("air frame shorter than its prefix");
            return CVec(air.begin() + prefix.len, air.end());
        }
        case PrefixKind::fcp: {
            const size_t stride = static_cast<size_t>(prefix.block_len + prefix.len);
            if (prefix.block_len <= 0 || air.size() % stride != 0)
                throw std::invalid_argument("air frame is not a whole number of fcp blocks");
            const size_t n_blocks = air.size() / stride;
            CVec out;
            out.reserve(n_blocks * static_cast<size_t>(prefix.block_len));
            for (size_t n = 0; n < n_blocks; ++n) {
                const auto begin = air.begin() + static_cast<std::ptrdiff_t>(n * stride) + prefix.len;
                out.insert(out.end(), begin, begin + prefix.block_len);
            }
            return out;
        }
    }
    throw std::logic_error("unreachable prefix kind");
}

TimeFrame transmit(const TimeFrame& frame, const ChannelSpec& spec, double snr_db,
                   const PrefixSpec& prefix, std::uint64_t seed) {
    if (frame.prefix_len != 0)
        throw std::invalid_argument("transmit expects an unprefixed frame");
    check_prefix(prefix, frame.samples.size());

    const auto paths = effective_paths(spec);
    const int guard = (prefix.kind == PrefixKind::none) ? 0 : prefix.len;
    if (max_delay(paths) > guard)
        throw std::invalid_argument("prefix shorter than the channel delay spread");
    for (const auto& p : paths)
        if (p.delay < 0) throw std::invalid_argument("negative delay tap");

    const CVec air = add_prefix(frame.samples, prefix);

    // Doppler phase progression. See the header for the per-kind convention.
    std::int64_t P_ref = static_cast<std::int64_t>(frame.samples.size());
    int phase_origin = 0;
    if (prefix.kind == PrefixKind::fcp) {
        const std::int64_t n_blocks =
            static_cast<std::int64_t>(frame.samples.size()) / prefix.block_len;
        P_ref = static_cast<std::int64_t>(prefix.block_len + prefix.len) * n_blocks;
    } else if (prefix.kind == PrefixKind::cp || prefix.kind == PrefixKind::rcp) {
        phase_origin = prefix.len;
    }

    CVec rx(air.size(), Complex(0.0, 0.0));
    for (const auto& path : paths) {
        const std::int64_t k_r = path.doppler;
        for (size_t q = static_cast<size_t>(path.delay); q < air.size(); ++q) {
            const std::int64_t exponent =
                k_r * (static_cast<std::int64_t>(q) - phase_origin - path.delay);
            rx[q] += path.gain * fft::unit_phase(exponent, P_ref) *
                     air[q - static_cast<size_t>(path.delay)];
        }
    }

    CVec kept = strip_prefix(rx, prefix);

    if (std::isfinite(snr_db)) {
        const double sigma2 = std::pow(10.0, -snr_db / 10.0);
        Rng rng(seed);
        for (auto& z : kept) z += rng.cgaussian(sigma2);
    }

    return TimeFrame{std::move(kept), 0, PrefixKind::none};
}

Eigen::MatrixXcd effective_channel(const Eigen::MatrixXcd& H, EqDomain domain,
                                   int M, int N) {
    const int MN = M * N;
    if (M <= 0 || N <= 0 || H.rows() != MN || H.cols() != MN)
        throw std::invalid_argument("effective_channel dimension mismatch");

    // Dense modulation matrix U, one fast transform per basis vector.
    Eigen::MatrixXcd U(MN, MN);
    for (int i = 0; i < MN; ++i) {
        CVec col;
        switch (domain) {
            case EqDomain::sc_ifdm:
            case EqDomain::otfs: {
                LatticeGrid X(M, N);
                X.values[static_cast<size_t>(i)] = 1.0;
                col = (domain == EqDomain::otfs) ? idzt(X) : sc_ifdm_modulate(X);
                break;
            }
            case EqDomain::ofdm: {
                // per-block unitary IDFT: basis i lives in block i / M
                col.assign(static_cast<size_t>(MN), Complex(0.0, 0.0));
                CVec e(static_cast<size_t>(M), Complex(0.0, 0.0));
                e[static_cast<size_t>(i % M)] = 1.0;
                CVec b = fft::inverse_unitary(e);
                std::copy(b.begin(), b.end(),
                          col.begin() + static_cast<std::ptrdiff_t>((i / M) * M));
                break;
            }
        }
        for (int p = 0; p < MN; ++p) U(p, i) = col[static_cast<size_t>(p)];
    }

    return U.adjoint() * (H * U);
}

}  // namespace mwf
