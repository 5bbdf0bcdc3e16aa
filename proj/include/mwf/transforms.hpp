// transforms.hpp - the transform family that one SC-IFDM structure generates
//
// The central identity: the discrete Zak transform factors an MN-sample frame
// into an N-Doppler x M-delay lattice, and SC-IFDM modulation
//
//     s(p) = (1/sqrt(N)) sum_k X(k, [p]_M) e^{j2pi kp/(MN)},   p in [0, MN)
//
// is the inverse Zak transform composed with the per-bin phase
// e^{j2pi kl/(MN)}. Every other waveform here (OFDM, OTFS, FMCW, OCDM, AFDM)
// is this modulator fed with a phased, precoded, or chirp-sparse lattice.
//
// Index conventions match types.hpp: k Doppler, l delay, n symbol,
// m subcarrier, p time sample.

#pragma once

#include "mwf/types.hpp"

namespace mwf {

enum class Direction { forward, inverse };

// Discrete Zak transform pair.
//   dzt:  X(k,l) = (1/sqrt(N)) sum_n s(l+nM) e^{-j2pi kn/N}
//   idzt: s(l+nM) = (1/sqrt(N)) sum_k X(k,l) e^{+j2pi kn/N}
LatticeGrid dzt(const CVec& s, int M, int N);
CVec idzt(const LatticeGrid& X);

// ISFFT / SFFT between the delay-Doppler and time-frequency grids.
//   isfft: X_TF(n,m) = (1/sqrt(MN)) sum_l sum_k X(k,l) e^{j2pi(nk/N - ml/M)}
TFGrid isfft(const LatticeGrid& X);
LatticeGrid sfft(const TFGrid& Xtf);

// Heisenberg / Wigner with rectangular pulses: per-symbol unitary M-point
// IDFT / DFT. heisenberg(isfft(X)) == idzt(X).
CVec heisenberg(const TFGrid& Xtf);
TFGrid wigner(const CVec& s, int M, int N);

// SC-IFDM modulator/demodulator (the mother waveform).
CVec sc_ifdm_modulate(const LatticeGrid& X);
LatticeGrid sc_ifdm_demodulate(const CVec& s, int M, int N);

// Subcarrier interleaver of the DFT-spread pipeline
//   s = F_MN^H * Gamma * (I_N (x) F_M) * vec(X):
// block-DFT output (k,m) lands at frame position k + m*N.
struct InterleaverPerm {
    int M = 0;
    int N = 0;
    std::vector<int> dest;    // dest[k*M + m] = k + m*N
    std::vector<int> source;  // inverse map: source[dest[i]] = i

    CVec apply(const CVec& in) const;    // out[dest[i]] = in[i]
    CVec invert(const CVec& in) const;   // undoes apply
};
InterleaverPerm interleave_perm(int M, int N);

// Discrete Fresnel transform. forward applies Phi with
//   Phi(p,i) = (e^{j pi/4}/sqrt(MN)) e^{-j pi (p-i)^2 / MN},
// inverse applies Phi^H. Phi is unitary; the size must be even. Internally
// the factored form Phi = e^{j pi/4} D F^H D, D = diag(e^{-j pi p^2/MN}),
// replaces the dense product.
CVec dfnt_apply(const CVec& x, Direction dir);

// Discrete affine Fourier transform parameters. c1 = c1_prime/(2MN) is fixed
// by the frame size; c2 is free. c1_prime = 0 degenerates to the plain DFT
// pair (useful as an oracle); chirp index maps additionally require
// c1_prime >= 1 (checked there, not here).
struct AfdmParams {
    int c1_prime = 1;
    double c2 = 0.0;
};

// inverse is the modulator:
//   s(p) = (1/sqrt(MN)) sum_i x(i) e^{j2pi(c1 p^2 + c2 i^2 + pi/MN)}
// i.e. s = Lambda_c1^H F^H Lambda_c2^H x; forward undoes it.
CVec daft_apply(const CVec& x, const AfdmParams& params, Direction dir);

// e^{j2pi c2 i^2} with the fraction reduced in extended precision. The same
// table entry (or its conjugate) must be used on both transform directions so
// that rounding cancels; exposed for the chirp synthesizers.
Complex afdm_c2_phase(double c2, std::int64_t i);

}  // namespace mwf
