// lattice.hpp - placing waveforms onto the SC-IFDM delay-Doppler lattice
//
// Three placement mechanisms live here:
//   * the OTFS twist phase omega(k,l) = e^{-j2pi kl/(MN)} that turns the
//     SC-IFDM modulator into an inverse Zak transform,
//   * sparse chirp supports: each discrete chirp (FMCW ramp, Fresnel chirp,
//     affine chirp) occupies exactly M lattice bins, one Doppler row per
//     delay column, given by a closed-form index map,
//   * block precoding that replicates a small payload grid so its
//     time-frequency image occupies a strided subgrid.
//
// Every ChirpIndexMap is validated at construction against the numerical
// projection of the actual time chirp through the SC-IFDM demodulator; a
// closed form that fails to concentrate the chirp's energy raises
// NumericalError instead of producing a silently wrong map.

#pragma once

#include <cstdint>

#include "mwf/transforms.hpp"
#include "mwf/types.hpp"

namespace mwf {

// forward multiplies by omega(k,l) = e^{-j2pi kl/(MN)}, inverse by its
// conjugate. sc_ifdm_modulate(otfs_phase_apply(X, forward)) == idzt(X).
LatticeGrid otfs_phase_apply(const LatticeGrid& X, Direction dir);

enum class ChirpKind { fmcw, ocdm, afdm };

// Full-length discrete chirp s^{kind,i}(p), p in [0, MN), unit modulus:
//   fmcw: e^{j pi p^2/(MN)}
//   ocdm: e^{j pi/4} e^{-j pi (p-i)^2/(MN)}
//   afdm: e^{j2pi(c1 p^2 + c2 i^2 + p i/(MN))}, c1 = c1'/(2MN)
CVec chirp_time_sequence(ChirpKind kind, int M, int N, int index, const AfdmParams& afdm = {});

// One Doppler row per delay column: the chirp's lattice support.
struct ChirpIndexMap {
    ChirpKind kind = ChirpKind::fmcw;
    int M = 0;
    int N = 0;
    int index = 0;
    AfdmParams afdm;
    std::vector<int> doppler_of_delay;  // k(l), size M
    // Sign of the c1' term that survived projection validation (+1 or -1,
    // afdm only; the +1 branch is the one the derivation supports).
    int afdm_support_sign = 0;
    // Integer beat-frequency rate of the chirp: a target delayed by d samples
    // beats at fast-time bin [rate*d]_MN after conjugate mixing.
    // +1 fmcw, -1 ocdm (down-chirp), +c1' afdm.
    int beat_rate = 0;
};

// Preconditions: M even; N | M for fmcw/ocdm, N | c1'M and c1' >= 1 for afdm;
// index in [0, MN) for ocdm/afdm (fmcw carries no index).
ChirpIndexMap chirp_index_map(ChirpKind kind, int M, int N, int index, const AfdmParams& afdm = {});

// Accumulates amplitude * s^{kind,i}(l) * omega(k(l),l) onto the M support
// bins of the map (chirp samples normalized to exact unit modulus first, so
// |amplitude|^2 is the per-bin chirp power). Accumulation rather than
// assignment keeps co-supported chirps (ocdm i and i+N) composable.
void embed_chirp(LatticeGrid& X, const ChirpIndexMap& map, Complex amplitude);

struct PrecodeParams {
    int alpha = 1;  // Doppler replication factor, divides N
    int beta = 1;   // delay replication factor, divides M
    int q1 = 0;     // symbol-axis offset of the occupied TF rows, in [0, alpha)
    int q2 = 0;     // subcarrier-axis offset, in [0, beta)
};

void validate_precode(const PrecodeParams& p, int M, int N);

// Small (N/alpha) x (M/beta) grid -> full N x M grid:
//   X_pr(k,l) = (1/sqrt(alpha beta)) X_s([k]_{N/a},[l]_{M/b})
//               e^{j2pi(-a q1/alpha + b q2/beta)},  a=floor(k a/N), b=floor(l b/M)
// Energy preserving; the TF image lands on rows [n-q1]_alpha = 0 and columns
// [m-q2]_beta = 0 only.
LatticeGrid precode_allocate(const LatticeGrid& Xs, const PrecodeParams& p, int M, int N);

// Coherent replica combine; exact inverse of precode_allocate on its image.
LatticeGrid precode_extract(const LatticeGrid& Xpr, const PrecodeParams& p);

struct TFMask {
    int M = 0;  // subcarriers
    int N = 0;  // symbols
    std::vector<std::uint8_t> on;  // on[m + M*n]

    bool operator()(int n, int m) const { return on[static_cast<size_t>(m) + static_cast<size_t>(M) * n] != 0; }
    int count() const;
};

TFMask tf_occupancy(int M, int N, const PrecodeParams& p);

}  // namespace mwf
