// Experiment driver tests: exact noiseless chains, seed and thread-count
// reproducibility, paired series bookkeeping, the closed-form rate curves
// and the CSV emission.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mwf/config.hpp"
#include "mwf/experiments.hpp"

using namespace mwf;

namespace {

ScenarioConfig scenario(const std::string& text) {
    return load_scenario(parse_config(text, "test"));
}

// (scheme, metric, snr) -> value for easy record lookup
std::map<std::string, double> index_records(const std::vector<ResultRecord>& records) {
    std::map<std::string, double> out;
    for (const auto& r : records) {
        char key[160];
        std::snprintf(key, sizeof key, "%s|%s|%g", r.scheme.c_str(), r.metric.c_str(),
                      r.snr_db);
        out[key] = r.value;
    }
    return out;
}

}  // namespace

TEST_CASE("a noiseless dispersive channel is equalized to zero errors") {
    ScenarioConfig cfg = scenario(
        "[experiment]\n"
        "kind = ber\n"
        "trials = 8\n"
        "[waveform]\n"
        "scheme = otfs\n"
        "m = 8\n"
        "n = 8\n"
        "prefix_len = 2\n"
        "[channel]\n"
        "gains = 0.9, 0.4\n"
        "delays = 0, 2\n"
        "dopplers = 0, 1\n"
        "snr_db = inf\n");
    const auto idx = index_records(run_ber(cfg));
    CHECK(idx.at("otfs_mother|ber|inf") == 0.0);
    CHECK(idx.at("otfs_direct|ber|inf") == 0.0);
    CHECK(idx.at("otfs|bit_mismatches|inf") == 0.0);
}

TEST_CASE("the shared-modulator and defining-equation chains decide identical bits") {
    // moderate SNR so plenty of bit errors occur - the two chains must still
    // agree decision-for-decision because their synthesized frames coincide
    ScenarioConfig cfg = scenario(
        "[experiment]\n"
        "kind = ber\n"
        "trials = 60\n"
        "[waveform]\n"
        "scheme = otfs\n"
        "m = 8\n"
        "n = 8\n"
        "prefix_len = 2\n"
        "[channel]\n"
        "gains = 0.8, 0.5, 0.3\n"
        "delays = 0, 1, 2\n"
        "dopplers = 0, 1, -1\n"
        "snr_db = 0, 6\n");
    const auto idx = index_records(run_ber(cfg));
    CHECK(idx.at("otfs_mother|ber|0") > 0.0);  // noise actually bites
    CHECK(idx.at("otfs_mother|ber|0") == idx.at("otfs_direct|ber|0"));
    CHECK(idx.at("otfs_mother|ber|6") == idx.at("otfs_direct|ber|6"));
    CHECK(idx.at("otfs|bit_mismatches|0") == 0.0);
    CHECK(idx.at("otfs|bit_mismatches|6") == 0.0);
}

TEST_CASE("ber output is reproducible and thread-count invariant") {
    const std::string base =
        "[experiment]\n"
        "kind = ber\n"
        "trials = 40\n"
        "seed = 7\n"
        "[waveform]\n"
        "scheme = sc_ifdm\n"
        "m = 8\n"
        "n = 8\n"
        "prefix_len = 1\n"
        "[channel]\n"
        "gains = 0.9, 0.4\n"
        "delays = 0, 1\n"
        "dopplers = 0, 1\n"
        "snr_db = 0, 5\n";

    ScenarioConfig cfg = scenario(base);
    const std::string csv1 = csv_string(run_ber(cfg));
    const std::string csv_again = csv_string(run_ber(cfg));
    CHECK(csv1 == csv_again);

    cfg.threads = 3;
    CHECK(csv_string(run_ber(cfg)) == csv1);

    cfg.threads = 1;
    cfg.seed = 8;
    CHECK(csv_string(run_ber(cfg)) != csv1);
}

TEST_CASE("time-partition coexistence reports paired per-branch series") {
    ScenarioConfig cfg = scenario(
        "[experiment]\n"
        "kind = ber\n"
        "trials = 25\n"
        "[waveform]\n"
        "scheme = otfs_ofdm\n"
        "m = 8\n"
        "n = 8\n"
        "alpha = 2\n"
        "q1 = 0\n"
        "l_fcp = 2\n"
        "[channel]\n"
        "gains = 1.0\n"
        "delays = 1\n"
        "dopplers = 0\n"
        "snr_db = 8\n");
    const auto records = run_ber(cfg);
    const auto idx = index_records(records);

    // combined equals the bit-weighted mix of the two branches
    const double pz = 32.0;  // M*N/alpha payload symbols
    const double pf = 32.0;
    const double expect = (idx.at("otfs_ofdm/otfs|ber|8") * pz +
                           idx.at("otfs_ofdm/ofdm|ber|8") * pf) /
                          (pz + pf);
    CHECK(idx.at("otfs_ofdm/combined|ber|8") == doctest::Approx(expect).epsilon(1e-12));

    // standalone counterparts exist and stay in [0, 1]
    for (const char* s : {"otfs_ofdm/otfs_standalone", "otfs_ofdm/ofdm_standalone"}) {
        const double v = idx.at(std::string(s) + "|ber|8");
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("lattice-partition coexistence decodes both branches cleanly without noise") {
    ScenarioConfig cfg = scenario(
        "[experiment]\n"
        "kind = ber\n"
        "trials = 10\n"
        "[waveform]\n"
        "scheme = scifdm_afdm\n"
        "m = 8\n"
        "n = 8\n"
        "c1_prime = 2\n"
        "chirp_indices = 0\n"
        "guard_delay = 1\n"
        "guard_doppler = 1\n"
        "power_ratio_db = 20\n"
        "l_rcp = 2\n"
        "[channel]\n"
        "gains = 0.9, 0.4\n"
        "delays = 0, 1\n"
        "dopplers = 0, 1\n"
        "snr_db = inf\n");
    const auto idx = index_records(run_ber(cfg));
    CHECK(idx.at("scifdm_afdm/data|ber|inf") == 0.0);
    CHECK(idx.at("scifdm_afdm/chirp|ber|inf") == 0.0);
    CHECK(idx.at("scifdm_afdm/combined|ber|inf") == 0.0);
    CHECK(idx.at("scifdm_afdm/data_standalone|ber|inf") == 0.0);
    CHECK(idx.at("scifdm_afdm/chirp_standalone|ber|inf") == 0.0);
}

TEST_CASE("rate curves reduce to the Shannon term when overheads vanish") {
    RateParams p = default_rate_params(16, 16, 2, 0);
    p.T_cp = 0.0;
    p.phi_otfs = 0.0;
    p.phi_ofdm = 0.0;
    p.theta_ofdm = 0.0;
    p.theta_otfs = 0.0;
    p.theta_ocdm = 0.0;
    p.theta_afdm = 0.0;
    p.gamma_db = {0.0, 10.0, 20.0};

    const auto idx = index_records(rate_curves(p));
    for (const double g : p.gamma_db) {
        const double shannon = std::log2(1.0 + std::pow(10.0, g / 10.0));
        char key[64];
        for (const char* s : {"ofdm", "otfs_fcp", "ocdm", "afdm", "otfs_ofdm"}) {
            std::snprintf(key, sizeof key, "%s|spectral_efficiency|%g", s, g);
            CHECK(idx.at(key) == doctest::Approx(shannon).epsilon(1e-12));
        }
    }
}

TEST_CASE("overhead exceeding the resource clamps the rate to zero with a warning") {
    RateParams p = default_rate_params(8, 8, 2, 2);
    p.theta_ofdm = 100.0;  // more pilot symbols than the frame has
    p.theta_ofdm = std::min(p.theta_ofdm, p.T);  // keep load-time cap semantics
    p.theta_ofdm = p.T;                          // exactly consumes everything
    p.gamma_db = {10.0};
    std::vector<std::string> warnings;
    auto idx = index_records(rate_curves(p, &warnings));
    CHECK(idx.at("ofdm|spectral_efficiency|10") == 0.0);
    CHECK(warnings.empty());  // zero payload is legal, only negative warns

    p.theta_ofdm = p.T + 1.0;  // now the numerator goes negative
    warnings.clear();
    idx = index_records(rate_curves(p, &warnings));
    CHECK(idx.at("ofdm|spectral_efficiency|10") == 0.0);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("ofdm") != std::string::npos);
}

TEST_CASE("sensing runs exactly recover bin-centered targets without noise") {
    ScenarioConfig cfg = scenario(
        "[experiment]\n"
        "kind = sensing\n"
        "trials = 4\n"
        "[sensing]\n"
        "m = 8\n"
        "n = 8\n"
        "n_sym = 10\n"
        "schemes = fmcw, scifdm_afdm\n"
        "n_targets = 2\n"
        "max_range = 10\n"
        "max_speed = 5\n"
        "snr_db = inf\n"
        "power_ratios_db = 20\n"
        "c1_prime = 2\n");
    // widen the speed window to a few Doppler bins of this coarse radar
    cfg.sensing.max_speed_mps = 0.45 * cfg.sensing.radar.velocity_span();

    const SensingRun run = run_sensing(cfg);
    const auto idx = index_records(run.records);
    CHECK(idx.at("fmcw|range_rmse_m|inf") == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(idx.at("fmcw|velocity_rmse_mps|inf") == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(idx.at("fmcw|miss_rate|inf") == 0.0);
    CHECK(idx.at("scifdm_afdm/ratio20|range_rmse_m|inf") ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(idx.at("scifdm_afdm/ratio20|miss_rate|inf") == 0.0);

    CHECK(run.map_scheme == "fmcw");
    CHECK(run.map_dump.substr(0, 10) == "q,u,power\n");
    // one row per map cell plus the header line
    const size_t rows = static_cast<size_t>(
        std::count(run.map_dump.begin(), run.map_dump.end(), '\n'));
    CHECK(rows == 1u + 64u * 10u);
}

TEST_CASE("sensing output is thread-count invariant") {
    ScenarioConfig cfg = scenario(
        "[experiment]\n"
        "kind = sensing\n"
        "trials = 6\n"
        "seed = 3\n"
        "[sensing]\n"
        "m = 8\n"
        "n = 8\n"
        "n_sym = 10\n"
        "schemes = fmcw\n"
        "n_targets = 2\n"
        "max_range = 20\n"
        "max_speed = 2000\n"
        "snr_db = -5, 5\n");

    const SensingRun one = run_sensing(cfg);
    cfg.threads = 4;
    const SensingRun four = run_sensing(cfg);
    CHECK(csv_string(one.records) == csv_string(four.records));
    CHECK(one.map_dump == four.map_dump);
}

TEST_CASE("the equivalence sweep holds every kind to the shared modulator") {
    ScenarioConfig cfg = scenario(
        "[experiment]\n"
        "kind = equivalence\n"
        "trials = 5\n"
        "[waveform]\n"
        "m = 8\n"
        "n = 8\n");
    const auto records = run_equivalence(cfg);
    REQUIRE(records.size() == 8);  // ofdm, sc_ifdm, otfs, fmcw, ocdm, afdm_c{1,2,4}
    for (const auto& r : records) {
        INFO(r.scheme);
        CHECK(r.metric == "max_deviation");
        CHECK(r.value < 1e-10);
    }
}

TEST_CASE("csv emission is stable and exact") {
    CHECK(csv_string({}) == "experiment,scheme,metric,snr_db,value,trials,seed\n");
    std::vector<ResultRecord> records;
    records.push_back({"ber", "otfs_ofdm/otfs", "ber", 2.5, 0.001220703125, 64, 12345});
    const std::string csv = csv_string(records);
    CHECK(csv ==
          "experiment,scheme,metric,snr_db,value,trials,seed\n"
          "ber,otfs_ofdm/otfs,ber,2.5,0.001220703125,64,12345\n");
}
