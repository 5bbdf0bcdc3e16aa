// experiments.hpp - reproducible measurement drivers over the library
//
// Every driver consumes a ScenarioConfig and returns flat ResultRecord rows;
// the CSV emitted from a given (config, seed) pair is byte-identical across
// runs and across thread counts. Randomness is split into per-purpose
// streams derived as derive_seed(seed, stream, trial), so trial t sees the
// same bits/channel noise no matter which worker executes it, and the same
// noise generator state is reused across the SNR grid (common random
// numbers: each SNR point sees the identical noise shape, scaled).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mwf/config.hpp"
#include "mwf/sensing.hpp"

namespace mwf {

// One measured point. `scheme` is a series name and may carry a suffix
// ("otfs_ofdm/combined", "scifdm_afdm/ratio20"); metric names the quantity
// in `value` (ber, spectral_efficiency, range_rmse_m, ...).
struct ResultRecord {
    std::string experiment;
    std::string scheme;
    std::string metric;
    double snr_db = 0.0;
    double value = 0.0;
    long trials = 0;
    std::uint64_t seed = 0;
};

// Header "experiment,scheme,metric,snr_db,value,trials,seed"; doubles are
// printed with %.12g so equal doubles always serialize to equal text.
std::string csv_string(const std::vector<ResultRecord>& records);

// "q,u,power" dump of a range-Doppler map, row-major over Doppler bins.
std::string map_csv(const RangeDopplerMap& map);

// Monte-Carlo bit error rates for cfg.scheme over cfg.snr_db.
//   * standalone waveforms: one series named after the scheme. For otfs the
//     frame is synthesized twice (shared modulator and defining equation)
//     and both chains run on identical noise; series otfs_mother /
//     otfs_direct, plus a bit_mismatches metric counting decision
//     disagreements between them.
//   * otfs_ofdm: series {otfs, ofdm, combined, otfs_standalone,
//     ofdm_standalone}; the standalone series re-run the identical trial
//     with the other payload zeroed, so the composite penalty is paired.
//   * scifdm_afdm / scifdm_chirp: series {data, chirp, combined,
//     data_standalone, chirp_standalone}; the chirps each carry one
//     constellation symbol.
std::vector<ResultRecord> run_ber(const ScenarioConfig& cfg);

// Closed-form spectral-efficiency curves over p.gamma_db for the five
// schemes {otfs_ofdm, ofdm, otfs_fcp, ocdm, afdm}. A payload fraction that
// comes out negative is clamped to zero and, when `warnings` is given, a
// note is appended.
std::vector<ResultRecord> rate_curves(const RateParams& p,
                                      std::vector<std::string>* warnings = nullptr);

struct SensingRun {
    std::vector<ResultRecord> records;
    // One full range-Doppler map (trial 0 of the first scheme/ratio series,
    // SNR picked by map_dump_snr_index) for plotting.
    std::string map_dump;
    std::string map_scheme;
    double map_snr_db = 0.0;
    double map_ratio_db = 0.0;
};

// Monte-Carlo range/velocity estimation error. Per scheme in
// cfg.sensing.schemes: fmcw transmits the bare ramp (series "fmcw");
// scifdm_chirp / scifdm_afdm transmit the lattice-partition composite with
// fresh random data each symbol, one series per power ratio
// ("scifdm_afdm/ratio20"). Metrics per SNR: range_rmse_m,
// velocity_rmse_mps, miss_rate. Targets are redrawn per trial; the same
// targets, data and noise shapes are reused across the SNR grid and across
// power ratios.
SensingRun run_sensing(const ScenarioConfig& cfg);

// Synthesizes cfg.trials random payloads per waveform kind through both the
// shared-modulator path and the defining-equation path and records the
// worst sample deviation after aligning a global unit-modulus scalar.
// Series: ofdm, sc_ifdm, otfs, fmcw, ocdm, afdm_c1, afdm_c2, afdm_c4.
std::vector<ResultRecord> run_equivalence(const ScenarioConfig& cfg);

}  // namespace mwf
