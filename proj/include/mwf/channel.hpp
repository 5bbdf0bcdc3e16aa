#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mwf/types.hpp"

namespace mwf {

// One tap of the doubly-dispersive channel. Delay and Doppler are integer
// grid offsets; Doppler may be negative and is interpreted cyclically.
struct ChannelPath {
    Complex gain{1.0, 0.0};
    int delay = 0;
    int doppler = 0;
};

enum class ChannelNormalization { unit_power, raw };

struct ChannelSpec {
    std::vector<ChannelPath> paths;
    ChannelNormalization normalization = ChannelNormalization::unit_power;
};

// Prefix attached by transmit(). cp/rcp prepend the last `len` samples of
// the whole frame; fcp prepends each length-`block_len` block with its own
// last `len` samples.
struct PrefixSpec {
    PrefixKind kind = PrefixKind::none;
    int len = 0;
    int block_len = 0;
};

// Path list with gains rescaled per the normalization policy
// (unit_power forces sum |h_r|^2 = 1).
std::vector<ChannelPath> effective_paths(const ChannelSpec& spec);

// Dense cyclic operator: y(p) = sum_r h_r z_r^{p-l_r} s([p-l_r]_MN) with
// z_r = exp(j2pi k_r / MN), i.e. H = sum_r h_r Pi^{l_r} Delta^{k_r}.
Eigen::MatrixXcd build_channel_matrix(const ChannelSpec& spec, int MN);

// Same operator applied without forming the matrix.
CVec channel_apply(const ChannelSpec& spec, const CVec& s);

// Prefix expansion / removal used inside transmit(); exposed because the
// coexistence receivers and tests need the exact same sample bookkeeping.
CVec add_prefix(const CVec& samples, const PrefixSpec& prefix);
CVec strip_prefix(const CVec& air, const PrefixSpec& prefix);

// Full link: attach prefix, run the linear-convolution channel with Doppler
// phase progression, add AWGN at per-sample SNR snr_db (+infinity disables
// noise), strip the prefix again.
//
// Doppler phase conventions, fixed here and relied on by the receivers:
//  - cp/rcp/none: z_r = exp(j2pi k_r/MN), phase zero at the first retained
//    sample, so the retained frame equals the cyclic model of
//    build_channel_matrix exactly (given len >= max delay).
//  - fcp: z_r = exp(j2pi k_r/((block_len+len)*n_blocks)), phase zero at the
//    first emitted sample. One grid step in k_r then advances the phase by
//    exactly 2pi/n_blocks per on-air block.
TimeFrame transmit(const TimeFrame& frame, const ChannelSpec& spec, double snr_db,
                   const PrefixSpec& prefix, std::uint64_t seed);

enum class EqDomain { sc_ifdm, otfs, ofdm };

// Conjugates the MN x MN time-domain operator H into the given demodulation
// domain: U^H H U with U the domain's modulation matrix (inverse Zak
// transform for otfs, the interleaved-DFT modulator for sc_ifdm, per-block
// unitary IDFT for ofdm).
Eigen::MatrixXcd effective_channel(const Eigen::MatrixXcd& H, EqDomain domain,
                                   int M, int N);

}  // namespace mwf
