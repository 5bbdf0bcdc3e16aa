#include "mwf/waveforms.hpp"

#include <cmath>
#include <set>
#include <string>

#include "mwf/fft.hpp"

namespace mwf {
namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

ChirpKind chirp_kind_of(WaveformKind kind) {
    switch (kind) {
        case WaveformKind::fmcw: return ChirpKind::fmcw;
        case WaveformKind::ocdm: return ChirpKind::ocdm;
        case WaveformKind::afdm: return ChirpKind::afdm;
        default: throw std::invalid_argument("not a chirp kind");
    }
}

bool is_chirp(WaveformKind kind) {
    return kind == WaveformKind::fmcw || kind == WaveformKind::ocdm || kind == WaveformKind::afdm;
}

LatticeGrid grid_from_payload(const CVec& payload, int M, int N) {
    LatticeGrid X(M, N);
    X.values = payload;  // delay-major vec(X) is the payload ordering
    return X;
}

}  // namespace

const char* to_string(WaveformKind kind) {
    switch (kind) {
        case WaveformKind::ofdm: return "ofdm";
        case WaveformKind::sc_ifdm: return "sc_ifdm";
        case WaveformKind::otfs: return "otfs";
        case WaveformKind::fmcw: return "fmcw";
        case WaveformKind::ocdm: return "ocdm";
        case WaveformKind::afdm: return "afdm";
    }
    return "?";
}

size_t WaveformSpec::payload_size() const {
    if (kind == WaveformKind::ofdm) return static_cast<size_t>(N);
    if (is_chirp(kind)) return chirp_indices.size();
    return static_cast<size_t>(M) * static_cast<size_t>(N);
}

void validate(const WaveformSpec& spec) {
    require(spec.M >= 1 && spec.N >= 1, "waveform: M and N must be positive");
    if (spec.kind == WaveformKind::ofdm)
        require(spec.M == 1, "waveform: ofdm is the M=1 reduction; set M=1 and put the frame length in N");
    if (is_chirp(spec.kind)) {
        require(!spec.chirp_indices.empty(), "waveform: chirp kinds need at least one chirp index");
        if (spec.kind == WaveformKind::fmcw)
            require(spec.chirp_indices == std::vector<int>{0}, "waveform: fmcw is the single ramp, indices must be {0}");
        std::set<int> uniq(spec.chirp_indices.begin(), spec.chirp_indices.end());
        require(uniq.size() == spec.chirp_indices.size(), "waveform: duplicate chirp indices");
        const std::int64_t MN = static_cast<std::int64_t>(spec.M) * spec.N;
        for (int i : spec.chirp_indices) require(i >= 0 && i < MN, "waveform: chirp index out of [0, MN)");
    }
}

CVec synthesize_mother(const WaveformSpec& spec, const CVec& payload) {
    validate(spec);
    require(payload.size() == spec.payload_size(), "synthesize_mother: payload length mismatch");
    switch (spec.kind) {
        case WaveformKind::ofdm:
        case WaveformKind::sc_ifdm:
            return sc_ifdm_modulate(grid_from_payload(payload, spec.M, spec.N));
        case WaveformKind::otfs:
            return sc_ifdm_modulate(otfs_phase_apply(grid_from_payload(payload, spec.M, spec.N), Direction::forward));
        case WaveformKind::fmcw:
        case WaveformKind::ocdm:
        case WaveformKind::afdm: {
            // Bridge the lattice normalization to each kind's defining
            // form: an embedded bin of amplitude c comes out of the
            // modulator as (c/sqrt(N)) s(p), while the stand-alone chirps
            // carry amplitude 1 (fmcw ramp) or 1/sqrt(MN) (Fresnel/affine
            // columns).
            const double bridge = (spec.kind == WaveformKind::fmcw) ? std::sqrt(static_cast<double>(spec.N))
                                                                    : 1.0 / std::sqrt(static_cast<double>(spec.M));
            LatticeGrid X(spec.M, spec.N);
            for (size_t c = 0; c < spec.chirp_indices.size(); ++c) {
                ChirpIndexMap map =
                    chirp_index_map(chirp_kind_of(spec.kind), spec.M, spec.N, spec.chirp_indices[c], spec.afdm);
                embed_chirp(X, map, payload[c] * bridge);
            }
            return sc_ifdm_modulate(X);
        }
    }
    throw std::invalid_argument("synthesize_mother: unknown kind");
}

CVec synthesize_reference(const WaveformSpec& spec, const CVec& payload) {
    validate(spec);
    require(payload.size() == spec.payload_size(), "synthesize_reference: payload length mismatch");
    const size_t MN = static_cast<size_t>(spec.M) * spec.N;
    switch (spec.kind) {
        case WaveformKind::ofdm:
            // s(l) = (1/sqrt(N)) sum_k x(k) e^{j2pi kl/N}
            return fft::inverse_unitary(payload);
        case WaveformKind::sc_ifdm: {
            // direct scalar form of the mother definition
            CVec s(MN);
            const std::int64_t mn = static_cast<std::int64_t>(MN);
            for (std::int64_t p = 0; p < mn; ++p) {
                Complex acc = 0.0;
                for (int k = 0; k < spec.N; ++k)
                    acc += payload[static_cast<size_t>(p % spec.M) + static_cast<size_t>(spec.M) * k] *
                           fft::unit_phase(k * p, mn);
                s[static_cast<size_t>(p)] = acc / std::sqrt(static_cast<double>(spec.N));
            }
            return s;
        }
        case WaveformKind::otfs:
            // ISFFT onto the TF grid, then Heisenberg with rectangular pulses
            return heisenberg(isfft(grid_from_payload(payload, spec.M, spec.N)));
        case WaveformKind::fmcw: {
            CVec s = chirp_time_sequence(ChirpKind::fmcw, spec.M, spec.N, 0);
            for (auto& z : s) z *= payload[0];
            return s;
        }
        case WaveformKind::ocdm: {
            CVec x(MN, Complex(0.0));
            for (size_t c = 0; c < spec.chirp_indices.size(); ++c)
                x[static_cast<size_t>(spec.chirp_indices[c])] = payload[c];
            return dfnt_apply(x, Direction::forward);
        }
        case WaveformKind::afdm: {
            CVec x(MN, Complex(0.0));
            for (size_t c = 0; c < spec.chirp_indices.size(); ++c)
                x[static_cast<size_t>(spec.chirp_indices[c])] = payload[c];
            return daft_apply(x, spec.afdm, Direction::inverse);
        }
    }
    throw std::invalid_argument("synthesize_reference: unknown kind");
}

CVec demodulate(const WaveformSpec& spec, const CVec& frame) {
    validate(spec);
    require(frame.size() == static_cast<size_t>(spec.M) * spec.N, "demodulate: frame length mismatch");
    switch (spec.kind) {
        case WaveformKind::ofdm:
            return fft::forward_unitary(frame);
        case WaveformKind::sc_ifdm:
            return sc_ifdm_demodulate(frame, spec.M, spec.N).values;
        case WaveformKind::otfs:
            return otfs_phase_apply(sc_ifdm_demodulate(frame, spec.M, spec.N), Direction::inverse).values;
        case WaveformKind::fmcw:
        case WaveformKind::ocdm:
        case WaveformKind::afdm: {
            // matched projection against each unit-amplitude reference chirp
            CVec out(spec.chirp_indices.size());
            for (size_t c = 0; c < spec.chirp_indices.size(); ++c) {
                WaveformSpec one = spec;
                one.chirp_indices = {spec.chirp_indices[c]};
                CVec ref = synthesize_reference(one, CVec{Complex(1.0)});
                Complex dot = 0.0;
                double norm2 = 0.0;
                for (size_t p = 0; p < frame.size(); ++p) {
                    dot += std::conj(ref[p]) * frame[p];
                    norm2 += std::norm(ref[p]);
                }
                out[c] = dot / norm2;
            }
            return out;
        }
    }
    throw std::invalid_argument("demodulate: unknown kind");
}

}  // namespace mwf
