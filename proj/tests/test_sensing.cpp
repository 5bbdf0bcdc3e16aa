// Range-Doppler sensing tests. Resolution formulas are pinned to their
// closed-form values, the delay arithmetic to 2r/(c T_s), and the dechirp
// beat-bin law to [rate*d] mod MN for all three chirp families.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mwf/coexistence.hpp"
#include "mwf/lattice.hpp"
#include "mwf/sensing.hpp"

using namespace mwf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RadarConfig table_cfg() {
    RadarConfig cfg;
    cfg.carrier_hz = 77.0e9;
    cfg.bandwidth_hz = 200.0e6;
    cfg.M = 32;
    cfg.N = 32;
    cfg.n_sym = 200;
    return cfg;
}

std::vector<CVec> repeat_frame(const CVec& frame, int n_sym) {
    return std::vector<CVec>(static_cast<size_t>(n_sym), frame);
}

CVec random_frame(size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CVec v(n);
    for (auto& z : v) z = {u(rng), u(rng)};
    return v;
}

std::pair<int, int> argmax_bin(const RangeDopplerMap& map) {
    int bq = 0, bu = 0;
    double best = -1.0;
    for (int u = 0; u < map.n_doppler; ++u)
        for (int q = 0; q < map.n_range; ++q)
            if (map.at(q, u) > best) {
                best = map.at(q, u);
                bq = q;
                bu = u;
            }
    return {bq, bu};
}

}  // namespace

TEST_CASE("resolutions match the closed forms for the default geometry") {
    const RadarConfig cfg = table_cfg();
    // c/(2B) with c = 2.998e8, B = 200 MHz.
    CHECK(cfg.range_resolution() == doctest::Approx(0.7495).epsilon(1e-12));
    // T_sym = MN/B = 5.12 us, and c/(2 f_c n_sym T_sym).
    CHECK(cfg.symbol_duration() == doctest::Approx(5.12e-6).epsilon(1e-12));
    const double dv = 2.998e8 / (2.0 * 77.0e9 * 200.0 * 5.12e-6);
    CHECK(cfg.velocity_resolution() == doctest::Approx(dv).epsilon(1e-12));
    CHECK(cfg.velocity_resolution() == doctest::Approx(1.9011).epsilon(1e-3));
    CHECK(cfg.unambiguous_range() == doctest::Approx(1024 * 0.7495).epsilon(1e-12));
    CHECK(cfg.velocity_span() == doctest::Approx(200 * dv).epsilon(1e-12));
}

TEST_CASE("echo delay is 2r/(c T_s) samples, cyclic per symbol") {
    const RadarConfig cfg = table_cfg();
    const double r = 8.0 * cfg.range_resolution();
    // The range grid step c/(2B) already encodes the round trip, so a target
    // 8 range bins out arrives 8 (not 16) fast-time samples late.
    CHECK(2.0 * r / (cfg.wave_speed * cfg.sample_interval()) ==
          doctest::Approx(8.0).epsilon(1e-12));

    CVec impulse(static_cast<size_t>(cfg.frame_size()), Complex{0.0, 0.0});
    impulse[0] = {1.0, 0.0};
    impulse[100] = {0.0, 2.0};
    const auto rx = simulate_echo(repeat_frame(impulse, cfg.n_sym),
                                  {{r, 0.0, Complex{1.0, 0.0}}}, cfg, kInf, 1);
    REQUIRE(rx.size() == 200);
    for (int n : {0, 57, 199}) {
        const CVec& f = rx[static_cast<size_t>(n)];
        CHECK(std::abs(f[8] - Complex{1.0, 0.0}) < 1e-12);
        CHECK(std::abs(f[108] - Complex{0.0, 2.0}) < 1e-12);
        CHECK(std::abs(f[0]) < 1e-12);
        CHECK(std::abs(f[16]) < 1e-12);
    }

    // A delay that pushes samples past the frame end wraps around.
    RadarConfig small = cfg;
    small.M = 4;
    small.N = 4;
    small.n_sym = 3;
    CVec tail(16, Complex{0.0, 0.0});
    tail[15] = {1.0, 0.0};
    const auto wrapped = simulate_echo(repeat_frame(tail, 3),
                                       {{3.0 * small.range_resolution(), 0.0, {1.0, 0.0}}},
                                       small, kInf, 1);
    CHECK(std::abs(wrapped[0][2] - Complex{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(wrapped[0][15]) < 1e-12);
}

TEST_CASE("echoes superpose linearly over targets") {
    RadarConfig cfg = table_cfg();
    cfg.M = 8;
    cfg.N = 8;
    cfg.n_sym = 10;
    std::vector<CVec> tx;
    for (int n = 0; n < cfg.n_sym; ++n)
        tx.push_back(random_frame(64, 100 + static_cast<unsigned>(n)));

    const Target t1{3.0 * cfg.range_resolution(), 2.5 * cfg.velocity_resolution(), {1.0, 0.0}};
    const Target t2{17.0 * cfg.range_resolution(), -3.3 * cfg.velocity_resolution(), {0.5, -0.2}};
    const auto both = simulate_echo(tx, {t1, t2}, cfg, kInf, 1);
    const auto only1 = simulate_echo(tx, {t1}, cfg, kInf, 1);
    const auto only2 = simulate_echo(tx, {t2}, cfg, kInf, 1);
    for (int n = 0; n < cfg.n_sym; ++n)
        for (int p = 0; p < 64; ++p)
            CHECK(std::abs(both[static_cast<size_t>(n)][static_cast<size_t>(p)] -
                           only1[static_cast<size_t>(n)][static_cast<size_t>(p)] -
                           only2[static_cast<size_t>(n)][static_cast<size_t>(p)]) < 1e-12);
}

TEST_CASE("radar noise level follows the stated snr convention") {
    RadarConfig cfg = table_cfg();
    cfg.n_sym = 100;

    SUBCASE("zero targets fall back to unit reference power") {
        CVec silent(static_cast<size_t>(cfg.frame_size()), Complex{0.0, 0.0});
        const auto rx = simulate_echo(repeat_frame(silent, cfg.n_sym), {}, cfg, 0.0, 11);
        double p = 0.0;
        for (const CVec& f : rx) p += energy(f);
        p /= 100.0 * 1024.0;
        CHECK(p == doctest::Approx(1.0).epsilon(0.03));
    }

    SUBCASE("sigma^2 is mean echo power scaled by 10^(-snr/10)") {
        const CVec chirp = chirp_time_sequence(ChirpKind::fmcw, cfg.M, cfg.N, 0);
        const auto tx = repeat_frame(chirp, cfg.n_sym);
        const std::vector<Target> tgt{{12.0 * cfg.range_resolution(), 0.0, {1.0, 0.0}}};
        const auto clean = simulate_echo(tx, tgt, cfg, kInf, 5);
        const auto noisy = simulate_echo(tx, tgt, cfg, 10.0, 5);
        double p = 0.0;
        for (size_t n = 0; n < clean.size(); ++n)
            for (size_t i = 0; i < clean[n].size(); ++i)
                p += std::norm(noisy[n][i] - clean[n][i]);
        p /= 100.0 * 1024.0;
        // Unit-modulus chirp and unit reflectivity give echo power 1/sample.
        CHECK(p == doctest::Approx(0.1).epsilon(0.05));
    }
}

TEST_CASE("out-of-range targets and malformed inputs are rejected") {
    const RadarConfig cfg = table_cfg();
    const auto tx = repeat_frame(CVec(1024, Complex{1.0, 0.0}), cfg.n_sym);
    CHECK_THROWS_AS(simulate_echo(tx, {{800.0, 0.0, {1.0, 0.0}}}, cfg, kInf, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_echo(tx, {{-1.0, 0.0, {1.0, 0.0}}}, cfg, kInf, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_echo(tx, {{10.0, 195.0, {1.0, 0.0}}}, cfg, kInf, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_echo({tx[0]}, {}, cfg, kInf, 1), std::invalid_argument);
    auto short_frames = tx;
    short_frames[3].pop_back();
    CHECK_THROWS_AS(simulate_echo(short_frames, {}, cfg, kInf, 1), std::invalid_argument);

    CHECK_THROWS_AS(dechirp_process(tx, CVec(1023), cfg, 1), std::invalid_argument);
    CHECK_THROWS_AS(dechirp_process(tx, tx[0], cfg, 0), std::invalid_argument);

    RangeDopplerMap map;
    map.n_range = 1024;
    map.n_doppler = 200;
    map.power.assign(1024 * 200, 1.0);
    CHECK_THROWS_AS(estimate_targets(map, 0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(estimate_targets(map, -2, cfg), std::invalid_argument);
    map.n_doppler = 100;
    map.power.resize(1024 * 100);
    CHECK_THROWS_AS(estimate_targets(map, 1, cfg), std::invalid_argument);
}

TEST_CASE("noiseless bin-centered target is recovered exactly from a ramp") {
    const RadarConfig cfg = table_cfg();
    const CVec chirp = chirp_time_sequence(ChirpKind::fmcw, cfg.M, cfg.N, 0);
    const double r = 10.0 * cfg.range_resolution();
    const double v = 5.0 * cfg.velocity_resolution();
    const auto rx = simulate_echo(repeat_frame(chirp, cfg.n_sym), {{r, v, {0.8, 0.3}}},
                                  cfg, kInf, 1);
    const auto map = dechirp_process(rx, chirp, cfg, 1);
    CHECK(map.n_range == 1024);
    CHECK(map.n_doppler == 200);

    const auto [q, u] = argmax_bin(map);
    CHECK(q == 10);
    CHECK(u == 5);
    // Cyclically closed chirp + bin-centered Doppler: the tone is exact, so
    // every off-peak bin is numerically empty.
    double off = 0.0;
    for (int uu = 0; uu < map.n_doppler; ++uu)
        for (int qq = 0; qq < map.n_range; ++qq)
            if (qq != q || uu != u) off = std::max(off, map.at(qq, uu));
    CHECK(off < 1e-18 * map.at(q, u));

    const auto est = estimate_targets(map, 1, cfg);
    CHECK(est.found_all);
    REQUIRE(est.targets.size() == 1);
    CHECK(est.targets[0].range_m == doctest::Approx(r).epsilon(1e-12));
    CHECK(est.targets[0].velocity_mps == doctest::Approx(v).epsilon(1e-12));
    CHECK(est.targets[0].peak_power > 0.0);

    const auto metrics = sensing_metrics(est.targets, {{r, v, {0.8, 0.3}}}, cfg);
    CHECK(metrics.range_rmse_m < 1e-9);
    CHECK(metrics.velocity_rmse_mps < 1e-9);
    CHECK(metrics.unmatched == 0);
}

TEST_CASE("beat bins follow [rate*d] mod MN for down-chirps and affine chirps") {
    RadarConfig cfg = table_cfg();
    cfg.n_sym = 16;

    SUBCASE("ocdm, rate -1") {
        const CVec chirp = chirp_time_sequence(ChirpKind::ocdm, cfg.M, cfg.N, 5);
        const double r = 12.0 * cfg.range_resolution();
        const auto rx =
            simulate_echo(repeat_frame(chirp, cfg.n_sym), {{r, 0.0, {1.0, 0.0}}}, cfg, kInf, 1);
        const auto map = dechirp_process(rx, chirp, cfg, -1);
        const auto [q, u] = argmax_bin(map);
        CHECK(q == 1024 - 12);
        CHECK(u == 0);
        const auto est = estimate_targets(map, 1, cfg);
        REQUIRE(est.targets.size() == 1);
        CHECK(est.targets[0].range_m == doctest::Approx(r).epsilon(1e-12));
    }

    SUBCASE("afdm, rate +c1' with the modular inverse favouring small delays") {
        const AfdmParams afdm{2, 0.25};
        const CVec chirp = chirp_time_sequence(ChirpKind::afdm, cfg.M, cfg.N, 3, afdm);
        const auto cmap = chirp_index_map(ChirpKind::afdm, cfg.M, cfg.N, 3, afdm);
        CHECK(cmap.beat_rate == 2);
        const double r = 7.0 * cfg.range_resolution();
        const double v = -3.0 * cfg.velocity_resolution();
        const auto rx =
            simulate_echo(repeat_frame(chirp, cfg.n_sym), {{r, v, {1.0, 0.0}}}, cfg, kInf, 1);
        const auto map = dechirp_process(rx, chirp, cfg, cmap.beat_rate);
        const auto [q, u] = argmax_bin(map);
        CHECK(q == 14);
        CHECK(u == 16 - 3);
        const auto est = estimate_targets(map, 1, cfg);
        REQUIRE(est.targets.size() == 1);
        CHECK(est.targets[0].range_m == doctest::Approx(r).epsilon(1e-12));
        CHECK(est.targets[0].velocity_mps == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("zero targets give a noise-only map with no detections") {
    const RadarConfig cfg = table_cfg();
    const CVec chirp = chirp_time_sequence(ChirpKind::fmcw, cfg.M, cfg.N, 0);
    const auto rx = simulate_echo(repeat_frame(chirp, cfg.n_sym), {}, cfg, 0.0, 7);
    const auto map = dechirp_process(rx, chirp, cfg, 1);
    const auto est = estimate_targets(map, 1, cfg);
    CHECK_FALSE(est.found_all);
    CHECK(est.targets.empty());
}

TEST_CASE("three targets in a data-bearing composite are the dominant peaks") {
    const RadarConfig cfg = table_cfg();

    CoexScifdmAfdmConfig coex;
    coex.M = 32;
    coex.N = 32;
    coex.afdm = {2, 0.0};
    coex.chirp_indices = {0};
    coex.guard_doppler = 1;
    coex.guard_delay = 1;
    coex.power_ratio_db = 20.0;
    const auto layout = scifdm_afdm_layout(coex);
    CHECK(layout.maps[0].beat_rate == 2);

    std::mt19937 bits(42);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<CVec> tx;
    for (int n = 0; n < cfg.n_sym; ++n) {
        CVec data(static_cast<size_t>(layout.data_size()));
        for (auto& z : data)
            z = Complex((coin(bits) ? 1.0 : -1.0) / std::sqrt(2.0),
                        (coin(bits) ? 1.0 : -1.0) / std::sqrt(2.0));
        tx.push_back(compose_scifdm_afdm(data, coex).samples);
    }

    const double dr = cfg.range_resolution();
    const double dv = cfg.velocity_resolution();
    const std::vector<Target> truth{{8.0 * dr, 0.0, {1.0, 0.0}},
                                    {40.0 * dr, 5.0 * dv, {0.8, 0.0}},
                                    {96.0 * dr, -20.0 * dv, {0.0, 0.6}}};
    const auto rx = simulate_echo(tx, truth, cfg, 15.0, 99);

    const CVec reference = chirp_time_sequence(ChirpKind::afdm, coex.M, coex.N, 0, coex.afdm);
    const auto map = dechirp_process(rx, reference, cfg, layout.maps[0].beat_rate);
    const auto est = estimate_targets(map, 3, cfg);
    CHECK(est.found_all);
    REQUIRE(est.targets.size() == 3);

    const auto metrics = sensing_metrics(est.targets, truth, cfg);
    CHECK(metrics.unmatched == 0);
    CHECK(metrics.range_rmse_m < 1e-9);
    CHECK(metrics.velocity_rmse_mps < 1e-9);

    // Strongest reflector first: reflectivity magnitudes 1.0 > 0.8 > 0.6.
    CHECK(est.targets[0].range_m == doctest::Approx(8.0 * dr).epsilon(1e-12));
    CHECK(est.targets[1].range_m == doctest::Approx(40.0 * dr).epsilon(1e-12));
    CHECK(est.targets[2].range_m == doctest::Approx(96.0 * dr).epsilon(1e-12));
}

TEST_CASE("requesting more peaks than the scene holds flags the shortfall") {
    RadarConfig cfg = table_cfg();
    cfg.n_sym = 32;
    const CVec chirp = chirp_time_sequence(ChirpKind::fmcw, cfg.M, cfg.N, 0);
    const auto rx = simulate_echo(repeat_frame(chirp, cfg.n_sym),
                                  {{20.0 * cfg.range_resolution(), 0.0, {1.0, 0.0}}},
                                  cfg, 20.0, 3);
    const auto map = dechirp_process(rx, chirp, cfg, 1);
    const auto est = estimate_targets(map, 4, cfg);
    CHECK_FALSE(est.found_all);
    REQUIRE(est.targets.size() >= 1);
    CHECK(est.targets[0].range_m == doctest::Approx(20.0 * cfg.range_resolution()).epsilon(1e-9));
}

TEST_CASE("metrics: bias, permutation invariance and misses") {
    const RadarConfig cfg = table_cfg();
    const double dr = cfg.range_resolution();
    const double dv = cfg.velocity_resolution();
    const std::vector<Target> truth{{10.0 * dr, 2.0 * dv, {1.0, 0.0}},
                                    {55.0 * dr, -9.0 * dv, {1.0, 0.0}},
                                    {130.0 * dr, 31.0 * dv, {1.0, 0.0}}};

    SUBCASE("perfect estimates in shuffled order score zero") {
        std::vector<TargetEstimate> est{{130.0 * dr, 31.0 * dv, 1.0},
                                        {10.0 * dr, 2.0 * dv, 1.0},
                                        {55.0 * dr, -9.0 * dv, 1.0}};
        const auto m = sensing_metrics(est, truth, cfg);
        CHECK(m.range_rmse_m < 1e-12);
        CHECK(m.velocity_rmse_mps < 1e-12);
        CHECK(m.unmatched == 0);
    }

    SUBCASE("a constant one-bin range bias scores exactly one range step") {
        std::vector<TargetEstimate> est;
        for (const Target& t : truth)
            est.push_back({t.range_m + dr, t.velocity_mps, 1.0});
        const auto m = sensing_metrics(est, truth, cfg);
        CHECK(m.range_rmse_m == doctest::Approx(dr).epsilon(1e-12));
        CHECK(m.velocity_rmse_mps < 1e-12);
    }

    SUBCASE("missing estimates are scored at half the unambiguous span") {
        const std::vector<TargetEstimate> est{{10.0 * dr, 2.0 * dv, 1.0}};
        const auto m = sensing_metrics(est, truth, cfg);
        CHECK(m.unmatched == 2);
        const double miss_r = 0.5 * cfg.unambiguous_range();
        const double miss_v = 0.5 * cfg.velocity_span();
        CHECK(m.range_rmse_m == doctest::Approx(std::sqrt(2.0 * miss_r * miss_r / 3.0)).epsilon(1e-12));
        CHECK(m.velocity_rmse_mps ==
              doctest::Approx(std::sqrt(2.0 * miss_v * miss_v / 3.0)).epsilon(1e-12));
    }

    SUBCASE("empty truth scores zero") {
        const auto m = sensing_metrics({{1.0, 1.0, 1.0}}, {}, cfg);
        CHECK(m.range_rmse_m == 0.0);
        CHECK(m.unmatched == 0);
    }
}
