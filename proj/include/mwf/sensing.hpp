#pragma once

#include <cstdint>
#include <vector>

#include "mwf/types.hpp"

namespace mwf {

// Radar geometry. Sample interval is 1/bandwidth, one symbol spans M*N
// samples, and a burst integrates n_sym consecutive symbols.
struct RadarConfig {
    double carrier_hz = 77.0e9;
    double bandwidth_hz = 200.0e6;
    int M = 32;
    int N = 32;
    int n_sym = 200;
    double wave_speed = 2.998e8;

    int frame_size() const { return M * N; }
    double sample_interval() const { return 1.0 / bandwidth_hz; }
    double symbol_duration() const { return frame_size() / bandwidth_hz; }

    // c / (2B): one fast-time delay sample of round trip.
    double range_resolution() const { return wave_speed / (2.0 * bandwidth_hz); }

    // c / (2 f_c n_sym T_sym): one slow-time Doppler bin.
    double velocity_resolution() const {
        return wave_speed / (2.0 * carrier_hz * n_sym * symbol_duration());
    }

    // Cyclic spans of the delay/Doppler measurement grid.
    double unambiguous_range() const { return frame_size() * range_resolution(); }
    double velocity_span() const { return n_sym * velocity_resolution(); }
};

struct Target {
    double range_m = 0.0;
    double velocity_mps = 0.0;
    Complex reflectivity{1.0, 0.0};
};

// Reflects the per-symbol transmit frames off point targets. Each target
// contributes a cyclic fast-time delay of round(2 r / (c T_s)) samples and a
// slow-time phase ramp exp(j2pi (v/dv) n/n_sym); intra-symbol Doppler is
// neglected (pulse-Doppler abstraction). AWGN is added at snr_db relative to
// the mean echo power per sample (reference 1.0 when the echo is identically
// zero, so a target-free call still yields a noise-only observation);
// +infinity disables it. Targets outside the unambiguous spans throw.
std::vector<CVec> simulate_echo(const std::vector<CVec>& tx_frames,
                                const std::vector<Target>& targets,
                                const RadarConfig& cfg, double snr_db,
                                std::uint64_t seed);

// Power map over fast-time (beat) bins x slow-time (Doppler) bins,
// power[q + n_range * u]. beat_rate records how the reference chirp maps a
// delay of d samples to beat bin [beat_rate * d] mod MN (+1 up-chirp ramp,
// -1 down-chirp, +c1' for the affine kind) so peaks can be inverted later.
struct RangeDopplerMap {
    int n_range = 0;
    int n_doppler = 0;
    int beat_rate = 1;
    std::vector<double> power;

    double at(int q, int u) const {
        return power[static_cast<size_t>(q) + static_cast<size_t>(n_range) * u];
    }
};

// Classic dechirp: conjugate-mix every received symbol against the reference
// chirp, take a unitary inverse DFT over fast time (beat spectrum), then a
// unitary forward DFT across the n_sym symbols of each beat bin.
RangeDopplerMap dechirp_process(const std::vector<CVec>& rx_frames,
                                const CVec& reference, const RadarConfig& cfg,
                                int beat_rate = 1);

struct TargetEstimate {
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double peak_power = 0.0;
};

struct EstimationResult {
    std::vector<TargetEstimate> targets;
    // False when fewer than the requested k peaks cleared the noise floor.
    bool found_all = true;
};

// Picks the k strongest local peaks above 25x the map median, excluding a
// +-1 bin cyclic neighbourhood around every accepted peak. Beat bins are
// inverted through beat_rate (smallest non-negative delay when the rate
// shares a factor with MN) and Doppler bins above n_sym/2 unwrap to negative
// velocities. k < 1 throws.
EstimationResult estimate_targets(const RangeDopplerMap& map, int k,
                                  const RadarConfig& cfg);

struct SensingMetrics {
    double range_rmse_m = 0.0;
    double velocity_rmse_mps = 0.0;
    int unmatched = 0;
};

// Greedy nearest-neighbour pairing in resolution-normalized coordinates.
// Truth entries left without an estimate are scored at half the unambiguous
// span in both dimensions and counted in `unmatched`.
SensingMetrics sensing_metrics(const std::vector<TargetEstimate>& estimates,
                               const std::vector<Target>& truth,
                               const RadarConfig& cfg);

}  // namespace mwf
