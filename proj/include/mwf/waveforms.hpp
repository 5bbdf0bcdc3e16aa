// waveforms.hpp - every supported waveform, synthesized two ways
//
// synthesize_mother builds each kind by configuring the SC-IFDM lattice
// (phase twist for OTFS, sparse chirp embedding for FMCW/OCDM/AFDM, the M=1
// reduction for OFDM) and running the one shared modulator.
// synthesize_reference builds the same kind from its own defining equation
// (per-symbol IDFT, ISFFT+Heisenberg, explicit ramp, Fresnel transform,
// affine Fourier transform). The two outputs agree sample-for-sample; the
// equivalence suite holds the pair to 1e-10.

#pragma once

#include "mwf/lattice.hpp"
#include "mwf/transforms.hpp"
#include "mwf/types.hpp"

namespace mwf {

enum class WaveformKind { ofdm, sc_ifdm, otfs, fmcw, ocdm, afdm };

const char* to_string(WaveformKind kind);

struct WaveformSpec {
    WaveformKind kind = WaveformKind::sc_ifdm;
    int M = 1;
    int N = 1;
    AfdmParams afdm;                 // afdm only
    std::vector<int> chirp_indices;  // ocdm/afdm: which chirps carry payload; fmcw: must be {0}

    // Payload length contract: N for ofdm (which requires M == 1), M*N for
    // sc_ifdm/otfs, chirp_indices.size() complex amplitudes for chirp kinds.
    size_t payload_size() const;
};

void validate(const WaveformSpec& spec);

CVec synthesize_mother(const WaveformSpec& spec, const CVec& payload);
CVec synthesize_reference(const WaveformSpec& spec, const CVec& payload);

// Inverts synthesize_mother: lattice demodulation (plus inverse twist for
// OTFS) for the dense kinds, per-chirp matched projection for chirp kinds.
CVec demodulate(const WaveformSpec& spec, const CVec& frame);

}  // namespace mwf
