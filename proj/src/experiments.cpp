#include "mwf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <utility>

#include <Eigen/Dense>

#include "mwf/channel.hpp"
#include "mwf/coexistence.hpp"
#include "mwf/lattice.hpp"
#include "mwf/modulation.hpp"
#include "mwf/receivers.hpp"
#include "mwf/rng.hpp"
#include "mwf/transforms.hpp"
#include "mwf/waveforms.hpp"

namespace mwf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-purpose seed streams. Stream 1 is reserved for per-trial channel
// realizations should randomized fading ever be added; today the taps are
// taken literally from the config.
constexpr std::uint64_t kStreamBits = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamTargets = 4;
constexpr std::uint64_t kStreamData = 5;
constexpr std::uint64_t kStreamEchoNoise = 6;

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double noise_variance_of(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

std::vector<std::uint8_t> draw_bits(Rng& rng, size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    return bits;
}

long long count_bit_errors(const std::vector<std::uint8_t>& a,
                           const std::vector<std::uint8_t>& b) {
    if (a.size() != b.size()) throw std::logic_error("bit vector length mismatch");
    long long e = 0;
    for (size_t i = 0; i < a.size(); ++i) e += a[i] != b[i] ? 1 : 0;
    return e;
}

// Runs fn(trial, acc) for every trial in [0, trials), sharded into
// contiguous ranges over at most `threads` workers. Each worker owns one
// accumulator copied from `proto`; the caller merges them. Results must not
// depend on the shard layout — BER merges integers, sensing writes
// per-trial slots — which is what makes the output thread-count invariant.
template <typename Acc, typename TrialFn>
std::vector<Acc> run_trials(long trials, int threads, const Acc& proto, const TrialFn& fn) {
    const long k = std::max(1L, std::min<long>(threads, trials));
    std::vector<Acc> accs(static_cast<size_t>(k), proto);
    if (k == 1) {
        for (long t = 0; t < trials; ++t) fn(t, accs[0]);
        return accs;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(k));
    for (long w = 0; w < k; ++w) {
        const long lo = trials * w / k;
        const long hi = trials * (w + 1) / k;
        pool.emplace_back([&, lo, hi, w] {
            for (long t = lo; t < hi; ++t) fn(t, accs[static_cast<size_t>(w)]);
        });
    }
    for (auto& th : pool) th.join();
    return accs;
}

// ---------------------------------------------------------------- BER ----

struct BerAcc {
    std::vector<std::vector<long long>> err;   // [series][snr]
    std::vector<std::vector<long long>> bits;  // [series][snr]
    std::vector<long long> mismatches;         // [snr], otfs parity only

    BerAcc(size_t n_series, size_t n_snr)
        : err(n_series, std::vector<long long>(n_snr, 0)),
          bits(n_series, std::vector<long long>(n_snr, 0)),
          mismatches(n_snr, 0) {}
};

BerAcc merge(std::vector<BerAcc> accs) {
    BerAcc total = std::move(accs.front());
    for (size_t a = 1; a < accs.size(); ++a) {
        for (size_t s = 0; s < total.err.size(); ++s)
            for (size_t i = 0; i < total.err[s].size(); ++i) {
                total.err[s][i] += accs[a].err[s][i];
                total.bits[s][i] += accs[a].bits[s][i];
            }
        for (size_t i = 0; i < total.mismatches.size(); ++i)
            total.mismatches[i] += accs[a].mismatches[i];
    }
    return total;
}

std::vector<ResultRecord> emit_ber(const ScenarioConfig& cfg, const BerAcc& acc,
                                   const std::vector<std::string>& series) {
    std::vector<ResultRecord> out;
    for (size_t s = 0; s < series.size(); ++s)
        for (size_t i = 0; i < cfg.snr_db.size(); ++i) {
            const double ber = acc.bits[s][i] > 0
                                   ? static_cast<double>(acc.err[s][i]) /
                                         static_cast<double>(acc.bits[s][i])
                                   : 0.0;
            out.push_back({"ber", series[s], "ber", cfg.snr_db[i], ber, cfg.trials, cfg.seed});
        }
    return out;
}

Eigen::MatrixXcd synthesis_matrix(const WaveformSpec& spec, bool reference) {
    const int MN = spec.M * spec.N;
    const size_t P = spec.payload_size();
    Eigen::MatrixXcd U(MN, static_cast<Eigen::Index>(P));
    CVec basis(P, Complex(0.0));
    for (size_t j = 0; j < P; ++j) {
        basis[j] = Complex(1.0);
        const CVec s = reference ? synthesize_reference(spec, basis)
                                 : synthesize_mother(spec, basis);
        for (int i = 0; i < MN; ++i) U(i, static_cast<Eigen::Index>(j)) = s[static_cast<size_t>(i)];
        basis[j] = Complex(0.0);
    }
    return U;
}

std::vector<ResultRecord> ber_standalone(const ScenarioConfig& cfg) {
    WaveformSpec spec;
    spec.M = cfg.M;
    spec.N = cfg.N;
    switch (cfg.scheme) {
        case Scheme::ofdm:
            // One OFDM symbol spanning the whole frame: M*N subcarriers
            // behind a single cyclic prefix.
            spec.kind = WaveformKind::ofdm;
            spec.M = 1;
            spec.N = cfg.M * cfg.N;
            break;
        case Scheme::sc_ifdm:
            spec.kind = WaveformKind::sc_ifdm;
            break;
        case Scheme::otfs:
            spec.kind = WaveformKind::otfs;
            break;
        case Scheme::ocdm:
            spec.kind = WaveformKind::ocdm;
            spec.chirp_indices = cfg.chirp_indices;
            break;
        case Scheme::afdm:
            spec.kind = WaveformKind::afdm;
            spec.afdm = cfg.afdm;
            spec.chirp_indices = cfg.chirp_indices;
            break;
        default:
            throw std::invalid_argument("not a standalone scheme");
    }
    validate(spec);

    const int MN = spec.M * spec.N;
    const bool parity = cfg.scheme == Scheme::otfs;
    const size_t n_snr = cfg.snr_db.size();
    const size_t n_bits =
        spec.payload_size() * static_cast<size_t>(bits_per_symbol(cfg.constellation));

    const Eigen::MatrixXcd H = build_channel_matrix(cfg.channel, MN);
    std::vector<Eigen::MatrixXcd> B;
    B.push_back(H * synthesis_matrix(spec, false));
    if (parity) B.push_back(H * synthesis_matrix(spec, true));

    std::vector<std::vector<Equalizer>> eqs(B.size());
    for (size_t c = 0; c < B.size(); ++c) {
        eqs[c].reserve(n_snr);
        for (const double snr : cfg.snr_db)
            eqs[c].emplace_back(B[c], EqualizerConfig{EqMode::mmse, noise_variance_of(snr)});
    }

    PrefixSpec prefix;
    if (cfg.prefix_len > 0)
        prefix = {cfg.scheme == Scheme::ofdm ? PrefixKind::cp : PrefixKind::rcp,
                  cfg.prefix_len, 0};

    const auto trial_fn = [&](long t, BerAcc& acc) {
        Rng brng(derive_seed(cfg.seed, kStreamBits, static_cast<std::uint64_t>(t)));
        const auto bits = draw_bits(brng, n_bits);
        const CVec payload = map_bits(bits, cfg.constellation);

        std::vector<TimeFrame> tx;
        tx.push_back({synthesize_mother(spec, payload), 0, PrefixKind::none});
        if (parity) tx.push_back({synthesize_reference(spec, payload), 0, PrefixKind::none});

        const std::uint64_t nseed =
            derive_seed(cfg.seed, kStreamNoise, static_cast<std::uint64_t>(t));
        for (size_t i = 0; i < n_snr; ++i) {
            std::vector<std::vector<std::uint8_t>> det(tx.size());
            for (size_t c = 0; c < tx.size(); ++c) {
                const TimeFrame rx = transmit(tx[c], cfg.channel, cfg.snr_db[i], prefix, nseed);
                det[c] = detect_bits(eqs[c][i].apply(rx.samples), cfg.constellation);
                acc.err[c][i] += count_bit_errors(det[c], bits);
                acc.bits[c][i] += static_cast<long long>(n_bits);
            }
            if (parity) acc.mismatches[i] += count_bit_errors(det[0], det[1]);
        }
    };

    const BerAcc total =
        merge(run_trials(cfg.trials, cfg.threads, BerAcc(B.size(), n_snr), trial_fn));

    std::vector<std::string> series;
    if (parity) {
        series = {"otfs_mother", "otfs_direct"};
    } else {
        series = {to_string(cfg.scheme)};
    }
    std::vector<ResultRecord> out = emit_ber(cfg, total, series);
    if (parity)
        for (size_t i = 0; i < n_snr; ++i)
            out.push_back({"ber", "otfs", "bit_mismatches", cfg.snr_db[i],
                           static_cast<double>(total.mismatches[i]), cfg.trials, cfg.seed});
    return out;
}

std::vector<ResultRecord> ber_otfs_ofdm(const ScenarioConfig& cfg) {
    const CoexOtfsOfdmConfig& c = cfg.otfs_ofdm;
    validate(c);

    const size_t pz = static_cast<size_t>(c.otfs_payload_size());
    const size_t pf = static_cast<size_t>(c.ofdm_payload_size());
    const int bps = bits_per_symbol(cfg.constellation);
    const size_t n_snr = cfg.snr_db.size();

    const Eigen::MatrixXcd bz = otfs_branch_matrix(c, cfg.channel);
    const PrefixSpec prefix{PrefixKind::fcp, c.l_fcp, c.M};

    // series: otfs, ofdm, combined, otfs_standalone, ofdm_standalone
    const auto trial_fn = [&](long t, BerAcc& acc) {
        Rng brng(derive_seed(cfg.seed, kStreamBits, static_cast<std::uint64_t>(t)));
        const auto bits_z = draw_bits(brng, pz * static_cast<size_t>(bps));
        const auto bits_f = draw_bits(brng, pf * static_cast<size_t>(bps));
        const CVec xz = map_bits(bits_z, cfg.constellation);
        const CVec xf = map_bits(bits_f, cfg.constellation);
        const CVec zz(pz, Complex(0.0));
        const CVec zf(pf, Complex(0.0));

        const TimeFrame both = compose_otfs_ofdm(xz, xf, c);
        const TimeFrame only_z = compose_otfs_ofdm(xz, zf, c);
        const TimeFrame only_f = compose_otfs_ofdm(zz, xf, c);

        const std::uint64_t nseed =
            derive_seed(cfg.seed, kStreamNoise, static_cast<std::uint64_t>(t));
        for (size_t i = 0; i < n_snr; ++i) {
            const double snr = cfg.snr_db[i];
            const double s2 = noise_variance_of(snr);
            {
                const TimeFrame rx = transmit(both, cfg.channel, snr, prefix, nseed);
                const auto zr = receive_otfs_branch(rx, c, cfg.channel, s2, &bz);
                const auto fr = receive_ofdm_branch(rx, c, cfg.channel, s2);
                const long long ez =
                    count_bit_errors(detect_bits(zr.equalized, cfg.constellation), bits_z);
                const long long ef =
                    count_bit_errors(detect_bits(fr.equalized, cfg.constellation), bits_f);
                acc.err[0][i] += ez;
                acc.bits[0][i] += static_cast<long long>(bits_z.size());
                acc.err[1][i] += ef;
                acc.bits[1][i] += static_cast<long long>(bits_f.size());
                acc.err[2][i] += ez + ef;
                acc.bits[2][i] += static_cast<long long>(bits_z.size() + bits_f.size());
            }
            {
                const TimeFrame rx = transmit(only_z, cfg.channel, snr, prefix, nseed);
                const auto zr = receive_otfs_branch(rx, c, cfg.channel, s2, &bz);
                acc.err[3][i] +=
                    count_bit_errors(detect_bits(zr.equalized, cfg.constellation), bits_z);
                acc.bits[3][i] += static_cast<long long>(bits_z.size());
            }
            {
                const TimeFrame rx = transmit(only_f, cfg.channel, snr, prefix, nseed);
                const auto fr = receive_ofdm_branch(rx, c, cfg.channel, s2);
                acc.err[4][i] +=
                    count_bit_errors(detect_bits(fr.equalized, cfg.constellation), bits_f);
                acc.bits[4][i] += static_cast<long long>(bits_f.size());
            }
        }
    };

    const BerAcc total = merge(run_trials(cfg.trials, cfg.threads, BerAcc(5, n_snr), trial_fn));
    return emit_ber(cfg, total,
                    {"otfs_ofdm/otfs", "otfs_ofdm/ofdm", "otfs_ofdm/combined",
                     "otfs_ofdm/otfs_standalone", "otfs_ofdm/ofdm_standalone"});
}

std::vector<ResultRecord> ber_scifdm_composite(const ScenarioConfig& cfg) {
    const CoexScifdmAfdmConfig& c = cfg.scifdm_afdm;
    const ScifdmAfdmLayout layout = scifdm_afdm_layout(c);

    const size_t pd = static_cast<size_t>(layout.data_size());
    const size_t pc = c.chirp_indices.size();
    const int bps = bits_per_symbol(cfg.constellation);
    const size_t n_snr = cfg.snr_db.size();

    PrefixSpec prefix;
    if (c.l_rcp > 0) prefix = {PrefixKind::rcp, c.l_rcp, 0};

    // Chirp-branch observations: every non-data bin (support plus guard
    // ring), so chirp energy smeared by the channel is still captured.
    std::vector<int> rows;
    for (size_t b = 0; b < layout.owner.size(); ++b)
        if (layout.owner[b] != BinOwner::data) rows.push_back(static_cast<int>(b));

    Eigen::MatrixXcd bc(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(pc));
    {
        const CVec zero_data(pd, Complex(0.0));
        CVec basis(pc, Complex(0.0));
        for (size_t j = 0; j < pc; ++j) {
            basis[j] = Complex(1.0);
            const TimeFrame tx = compose_scifdm_afdm(zero_data, c, &basis);
            const TimeFrame rx = transmit(tx, cfg.channel, kInf, prefix, 0);
            const LatticeGrid y = sc_ifdm_demodulate(rx.samples, c.M, c.N);
            for (size_t i = 0; i < rows.size(); ++i)
                bc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    y.values[static_cast<size_t>(rows[i])];
            basis[j] = Complex(0.0);
        }
    }
    const Eigen::MatrixXcd bd = scifdm_afdm_data_matrix(c, cfg.channel);

    // Unit-power data symbols can leak into the guard rows, so the chirp
    // equalizer regularizes against noise-plus-one rather than noise alone.
    std::vector<Equalizer> chirp_eq;
    chirp_eq.reserve(n_snr);
    for (const double snr : cfg.snr_db)
        chirp_eq.emplace_back(bc, EqualizerConfig{EqMode::mmse, noise_variance_of(snr) + 1.0});

    const auto chirp_detect = [&](const TimeFrame& rx, size_t si) {
        const LatticeGrid y = sc_ifdm_demodulate(rx.samples, c.M, c.N);
        CVec obs(rows.size());
        for (size_t i = 0; i < rows.size(); ++i)
            obs[i] = y.values[static_cast<size_t>(rows[i])];
        return detect_bits(chirp_eq[si].apply(obs), cfg.constellation);
    };

    // series: data, chirp, combined, data_standalone, chirp_standalone
    const auto trial_fn = [&](long t, BerAcc& acc) {
        Rng brng(derive_seed(cfg.seed, kStreamBits, static_cast<std::uint64_t>(t)));
        const auto bits_d = draw_bits(brng, pd * static_cast<size_t>(bps));
        const auto bits_c = draw_bits(brng, pc * static_cast<size_t>(bps));
        const CVec xd = map_bits(bits_d, cfg.constellation);
        const CVec xc = map_bits(bits_c, cfg.constellation);
        const CVec zd(pd, Complex(0.0));
        const CVec zc(pc, Complex(0.0));

        const TimeFrame both = compose_scifdm_afdm(xd, c, &xc);
        const TimeFrame only_d = compose_scifdm_afdm(xd, c, &zc);
        const TimeFrame only_c = compose_scifdm_afdm(zd, c, &xc);

        const std::uint64_t nseed =
            derive_seed(cfg.seed, kStreamNoise, static_cast<std::uint64_t>(t));
        for (size_t i = 0; i < n_snr; ++i) {
            const double snr = cfg.snr_db[i];
            const double s2 = noise_variance_of(snr);
            {
                const TimeFrame rx = transmit(both, cfg.channel, snr, prefix, nseed);
                const auto dr = receive_scifdm_afdm(rx, c, cfg.channel, s2, &bd);
                const long long ed = count_bit_errors(
                    detect_bits(dr.data_estimates, cfg.constellation), bits_d);
                const long long ec = count_bit_errors(chirp_detect(rx, i), bits_c);
                acc.err[0][i] += ed;
                acc.bits[0][i] += static_cast<long long>(bits_d.size());
                acc.err[1][i] += ec;
                acc.bits[1][i] += static_cast<long long>(bits_c.size());
                acc.err[2][i] += ed + ec;
                acc.bits[2][i] += static_cast<long long>(bits_d.size() + bits_c.size());
            }
            {
                const TimeFrame rx = transmit(only_d, cfg.channel, snr, prefix, nseed);
                const auto dr = receive_scifdm_afdm(rx, c, cfg.channel, s2, &bd);
                acc.err[3][i] += count_bit_errors(
                    detect_bits(dr.data_estimates, cfg.constellation), bits_d);
                acc.bits[3][i] += static_cast<long long>(bits_d.size());
            }
            {
                const TimeFrame rx = transmit(only_c, cfg.channel, snr, prefix, nseed);
                acc.err[4][i] += count_bit_errors(chirp_detect(rx, i), bits_c);
                acc.bits[4][i] += static_cast<long long>(bits_c.size());
            }
        }
    };

    const BerAcc total = merge(run_trials(cfg.trials, cfg.threads, BerAcc(5, n_snr), trial_fn));
    const std::string base = to_string(cfg.scheme);
    return emit_ber(cfg, total,
                    {base + "/data", base + "/chirp", base + "/combined",
                     base + "/data_standalone", base + "/chirp_standalone"});
}

// ------------------------------------------------------------- sensing ----

struct SenStat {
    double r2 = 0.0;  // per-trial mean squared range error
    double v2 = 0.0;
    long long unmatched = 0;
};

struct SenSeries {
    std::string name;
    bool composite = false;
    int beat_rate = 1;
    double ratio_db = 0.0;
    CVec reference;               // chirp-only frame, dechirp reference
    CoexScifdmAfdmConfig coex;    // composites only
    size_t data_size = 0;         // composites only
};

std::vector<SenSeries> build_sensing_series(const ScenarioConfig& cfg) {
    const SensingScenario& sc = cfg.sensing;
    std::vector<SenSeries> out;
    for (const Scheme s : sc.schemes) {
        if (s == Scheme::fmcw) {
            WaveformSpec spec;
            spec.kind = WaveformKind::fmcw;
            spec.M = sc.radar.M;
            spec.N = sc.radar.N;
            spec.chirp_indices = {0};
            SenSeries ser;
            ser.name = "fmcw";
            ser.beat_rate = 1;
            ser.reference = synthesize_mother(spec, CVec{Complex(1.0)});
            out.push_back(std::move(ser));
            continue;
        }
        for (const double ratio : sc.power_ratios_db) {
            CoexScifdmAfdmConfig c;
            c.M = sc.radar.M;
            c.N = sc.radar.N;
            c.chirp_kind = s == Scheme::scifdm_chirp ? ChirpKind::fmcw : ChirpKind::afdm;
            c.afdm = sc.afdm;
            c.chirp_indices = sc.chirp_indices;
            c.guard_delay = sc.guard_delay;
            c.guard_doppler = sc.guard_doppler;
            c.power_ratio_db = ratio;
            c.l_rcp = 0;

            const ScifdmAfdmLayout layout = scifdm_afdm_layout(c);
            SenSeries ser;
            ser.name = std::string(to_string(s)) + "/ratio" + fmt_g(ratio);
            ser.composite = true;
            ser.beat_rate =
                chirp_index_map(c.chirp_kind, c.M, c.N, c.chirp_indices[0], c.afdm).beat_rate;
            ser.ratio_db = ratio;
            ser.data_size = static_cast<size_t>(layout.data_size());
            ser.reference =
                compose_scifdm_afdm(CVec(ser.data_size, Complex(0.0)), c, nullptr).samples;
            ser.coex = std::move(c);
            out.push_back(std::move(ser));
        }
    }
    return out;
}

int mod_floor(long long a, int m) {
    const long long r = a % m;
    return static_cast<int>(r < 0 ? r + m : r);
}

// Targets sit on measurement-grid cells; any two keep a cyclic Chebyshev
// distance above 1 in (beat bin, Doppler bin) so the peak picker's +-1
// exclusion window cannot merge them.
std::vector<Target> draw_targets(const ScenarioConfig& cfg, long trial, int beat_rate) {
    const SensingScenario& sc = cfg.sensing;
    const RadarConfig& radar = sc.radar;
    Rng rng(derive_seed(cfg.seed, kStreamTargets, static_cast<std::uint64_t>(trial)));

    const double dr = radar.range_resolution();
    const double dv = radar.velocity_resolution();
    const int d_max = static_cast<int>(std::floor(sc.max_range_m / dr));
    const int u_max = static_cast<int>(std::floor(sc.max_speed_mps / dv));
    const int mn = radar.frame_size();

    const auto cyc_dist = [](int a, int b, int m) {
        const int d = std::abs(a - b) % m;
        return std::min(d, m - d);
    };

    std::vector<Target> targets;
    std::vector<std::pair<int, int>> cells;
    for (int k = 0; k < sc.n_targets; ++k) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 10000)
                throw NumericalError("could not draw separated targets; grid too crowded");
            double r = 0.0;
            double v = 0.0;
            int d = 0;
            int u = 0;
            if (sc.bin_centered) {
                d = std::min(d_max, static_cast<int>(rng.uniform() * (d_max + 1)));
                u = std::min(u_max,
                             -u_max + static_cast<int>(rng.uniform() * (2 * u_max + 1)));
                r = d * dr;
                v = u * dv;
            } else {
                r = rng.uniform() * sc.max_range_m;
                v = (2.0 * rng.uniform() - 1.0) * sc.max_speed_mps;
                d = static_cast<int>(std::lround(r / dr));
                u = static_cast<int>(std::lround(v / dv));
            }
            const int q = mod_floor(static_cast<long long>(beat_rate) * d, mn);
            const int uu = mod_floor(u, radar.n_sym);
            bool ok = true;
            for (const auto& [q0, u0] : cells)
                if (std::max(cyc_dist(q, q0, mn), cyc_dist(uu, u0, radar.n_sym)) <= 1) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            cells.emplace_back(q, uu);
            Target tgt;
            tgt.range_m = r;
            tgt.velocity_mps = v;
            tgt.reflectivity = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
            targets.push_back(tgt);
            break;
        }
    }
    return targets;
}

std::vector<CVec> build_tx_frames(const ScenarioConfig& cfg, const SenSeries& ser, long trial) {
    const int n_sym = cfg.sensing.radar.n_sym;
    std::vector<CVec> frames;
    frames.reserve(static_cast<size_t>(n_sym));
    if (!ser.composite) {
        frames.assign(static_cast<size_t>(n_sym), ser.reference);
        return frames;
    }
    // Fresh unit-power QPSK data every symbol; the chirps stay at their
    // nominal unit symbol so the dechirp reference matches.
    static const Complex kQpsk[4] = {
        {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0},
        {-std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0},
        {-std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0},
        {std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0},
    };
    Rng rng(derive_seed(cfg.seed, kStreamData, static_cast<std::uint64_t>(trial)));
    CVec payload(ser.data_size);
    for (int n = 0; n < n_sym; ++n) {
        for (auto& x : payload) x = kQpsk[rng.next_u64() & 3u];
        frames.push_back(compose_scifdm_afdm(payload, ser.coex, nullptr).samples);
    }
    return frames;
}

// ---------------------------------------------------------- equivalence ----

struct EqvKind {
    std::string name;
    WaveformSpec spec;
};

std::vector<EqvKind> build_equivalence_kinds(const ScenarioConfig& cfg) {
    const int mn = cfg.M * cfg.N;
    const auto valid_indices = [&](std::initializer_list<int> want) {
        std::vector<int> v;
        for (const int i : want)
            if (i >= 0 && i < mn && std::find(v.begin(), v.end(), i) == v.end()) v.push_back(i);
        return v;
    };

    std::vector<EqvKind> kinds;
    {
        WaveformSpec s;
        s.kind = WaveformKind::ofdm;
        s.M = 1;
        s.N = mn;
        kinds.push_back({"ofdm", s});
    }
    {
        WaveformSpec s;
        s.kind = WaveformKind::sc_ifdm;
        s.M = cfg.M;
        s.N = cfg.N;
        kinds.push_back({"sc_ifdm", s});
    }
    {
        WaveformSpec s;
        s.kind = WaveformKind::otfs;
        s.M = cfg.M;
        s.N = cfg.N;
        kinds.push_back({"otfs", s});
    }
    {
        WaveformSpec s;
        s.kind = WaveformKind::fmcw;
        s.M = cfg.M;
        s.N = cfg.N;
        s.chirp_indices = {0};
        kinds.push_back({"fmcw", s});
    }
    {
        WaveformSpec s;
        s.kind = WaveformKind::ocdm;
        s.M = cfg.M;
        s.N = cfg.N;
        s.chirp_indices = valid_indices({0, 7, 16, 31, 32});
        kinds.push_back({"ocdm", s});
    }
    for (const int c1 : {1, 2, 4}) {
        WaveformSpec s;
        s.kind = WaveformKind::afdm;
        s.M = cfg.M;
        s.N = cfg.N;
        s.afdm = AfdmParams{c1, cfg.afdm.c2};
        s.chirp_indices = valid_indices({0, 5, 16});
        kinds.push_back({"afdm_c" + std::to_string(c1), s});
    }
    return kinds;
}

}  // namespace

// ------------------------------------------------------------------ CSV ----

std::string csv_string(const std::vector<ResultRecord>& records) {
    std::string out = "experiment,scheme,metric,snr_db,value,trials,seed\n";
    for (const ResultRecord& r : records) {
        out += r.experiment;
        out += ',';
        out += r.scheme;
        out += ',';
        out += r.metric;
        out += ',';
        out += fmt_g(r.snr_db);
        out += ',';
        out += fmt_g(r.value);
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

std::string map_csv(const RangeDopplerMap& map) {
    std::string out = "q,u,power\n";
    for (int u = 0; u < map.n_doppler; ++u)
        for (int q = 0; q < map.n_range; ++q) {
            out += std::to_string(q);
            out += ',';
            out += std::to_string(u);
            out += ',';
            out += fmt_g(map.at(q, u));
            out += '\n';
        }
    return out;
}

// ------------------------------------------------------------- drivers ----

std::vector<ResultRecord> run_ber(const ScenarioConfig& cfg) {
    if (cfg.snr_db.empty()) throw std::invalid_argument("ber experiment needs an snr grid");
    switch (cfg.scheme) {
        case Scheme::otfs_ofdm:
            return ber_otfs_ofdm(cfg);
        case Scheme::scifdm_afdm:
        case Scheme::scifdm_chirp:
            return ber_scifdm_composite(cfg);
        case Scheme::fmcw:
            throw std::invalid_argument("fmcw carries no payload; use the sensing experiment");
        default:
            return ber_standalone(cfg);
    }
}

std::vector<ResultRecord> rate_curves(const RateParams& p, std::vector<std::string>* warnings) {
    const auto frac = [&](double numer, double denom, const char* name) {
        double f = numer / denom;
        if (f < 0.0) {
            if (warnings)
                warnings->push_back(std::string(name) +
                                    ": overhead exceeds available resources, payload fraction "
                                    "clamped to 0");
            f = 0.0;
        }
        return f;
    };

    const double mn = static_cast<double>(p.M) * static_cast<double>(p.N);
    struct Series {
        std::string name;
        double prefactor;
    };
    const Series series[] = {
        {"otfs_ofdm",
         frac(mn / p.alpha - p.phi_otfs, mn + static_cast<double>(p.N) * p.l_fcp,
              "otfs_ofdm zak share") +
             frac(p.T / p.alpha - p.phi_ofdm, p.T + p.T_cp, "otfs_ofdm ofdm share")},
        {"ofdm", frac(p.T - p.theta_ofdm, p.T + p.T_cp, "ofdm")},
        {"otfs_fcp",
         frac(p.M - p.theta_otfs, static_cast<double>(p.M) + p.l_fcp, "otfs_fcp")},
        {"ocdm", frac(mn - p.theta_ocdm, mn, "ocdm")},
        {"afdm", frac(mn - p.theta_afdm, mn, "afdm")},
    };

    std::vector<ResultRecord> out;
    out.reserve(5 * p.gamma_db.size());
    for (const Series& s : series)
        for (const double g : p.gamma_db) {
            const double se = s.prefactor * std::log2(1.0 + std::pow(10.0, g / 10.0));
            out.push_back({"rate", s.name, "spectral_efficiency", g, se, 1, 0});
        }
    return out;
}

SensingRun run_sensing(const ScenarioConfig& cfg) {
    const SensingScenario& sc = cfg.sensing;
    if (sc.snr_db.empty()) throw std::invalid_argument("sensing experiment needs an snr grid");
    if (sc.schemes.empty()) throw std::invalid_argument("sensing experiment needs schemes");

    const std::vector<SenSeries> series = build_sensing_series(cfg);
    const size_t n_snr = sc.snr_db.size();
    const long trials = cfg.trials;

    // One slot per (series, snr, trial); workers write disjoint trial
    // indices and the final reduction walks trials in order, so the sums
    // are identical no matter how the trials were sharded.
    std::vector<std::vector<SenStat>> slots(series.size() * n_snr,
                                            std::vector<SenStat>(static_cast<size_t>(trials)));

    struct NoAcc {};
    const auto trial_fn = [&](long t, NoAcc&) {
        for (size_t s = 0; s < series.size(); ++s) {
            const SenSeries& ser = series[s];
            const std::vector<Target> targets = draw_targets(cfg, t, ser.beat_rate);
            const std::vector<CVec> tx = build_tx_frames(cfg, ser, t);
            const std::uint64_t nseed =
                derive_seed(cfg.seed, kStreamEchoNoise, static_cast<std::uint64_t>(t));
            for (size_t i = 0; i < n_snr; ++i) {
                const auto rx = simulate_echo(tx, targets, sc.radar, sc.snr_db[i], nseed);
                const RangeDopplerMap map =
                    dechirp_process(rx, ser.reference, sc.radar, ser.beat_rate);
                const EstimationResult est = estimate_targets(map, sc.n_targets, sc.radar);
                const SensingMetrics met = sensing_metrics(est.targets, targets, sc.radar);
                SenStat& slot = slots[s * n_snr + i][static_cast<size_t>(t)];
                slot.r2 = met.range_rmse_m * met.range_rmse_m;
                slot.v2 = met.velocity_rmse_mps * met.velocity_rmse_mps;
                slot.unmatched = met.unmatched;
            }
        }
    };
    run_trials(trials, cfg.threads, NoAcc{}, trial_fn);

    SensingRun run;
    for (size_t s = 0; s < series.size(); ++s)
        for (size_t i = 0; i < n_snr; ++i) {
            double r2 = 0.0;
            double v2 = 0.0;
            long long unmatched = 0;
            for (const SenStat& st : slots[s * n_snr + i]) {
                r2 += st.r2;
                v2 += st.v2;
                unmatched += st.unmatched;
            }
            const double inv = trials > 0 ? 1.0 / static_cast<double>(trials) : 0.0;
            const double miss =
                trials > 0 && sc.n_targets > 0
                    ? static_cast<double>(unmatched) /
                          (static_cast<double>(trials) * static_cast<double>(sc.n_targets))
                    : 0.0;
            run.records.push_back({"sensing", series[s].name, "range_rmse_m", sc.snr_db[i],
                                   std::sqrt(r2 * inv), trials, cfg.seed});
            run.records.push_back({"sensing", series[s].name, "velocity_rmse_mps",
                                   sc.snr_db[i], std::sqrt(v2 * inv), trials, cfg.seed});
            run.records.push_back(
                {"sensing", series[s].name, "miss_rate", sc.snr_db[i], miss, trials, cfg.seed});
        }

    // One full map for plotting: trial 0 of the first series at the
    // requested SNR grid point.
    if (trials > 0) {
        const size_t mi = sc.map_dump_snr_index >= 0 &&
                                  sc.map_dump_snr_index < static_cast<int>(n_snr)
                              ? static_cast<size_t>(sc.map_dump_snr_index)
                              : n_snr - 1;
        const SenSeries& ser = series.front();
        const std::vector<Target> targets = draw_targets(cfg, 0, ser.beat_rate);
        const std::vector<CVec> tx = build_tx_frames(cfg, ser, 0);
        const auto rx = simulate_echo(tx, targets, sc.radar, sc.snr_db[mi],
                                      derive_seed(cfg.seed, kStreamEchoNoise, 0));
        run.map_dump = map_csv(dechirp_process(rx, ser.reference, sc.radar, ser.beat_rate));
        run.map_scheme = ser.name;
        run.map_snr_db = sc.snr_db[mi];
        run.map_ratio_db = ser.ratio_db;
    }
    return run;
}

std::vector<ResultRecord> run_equivalence(const ScenarioConfig& cfg) {
    const std::vector<EqvKind> kinds = build_equivalence_kinds(cfg);
    std::vector<ResultRecord> out;
    out.reserve(kinds.size());
    for (const EqvKind& kind : kinds) {
        validate(kind.spec);
        const size_t p = kind.spec.payload_size();
        double worst = 0.0;
        for (long t = 0; t < cfg.trials; ++t) {
            Rng rng(derive_seed(cfg.seed, kStreamBits, static_cast<std::uint64_t>(t)));
            CVec x(p);
            for (auto& v : x) v = rng.cgaussian(1.0);
            const CVec a = synthesize_mother(kind.spec, x);
            const CVec b = synthesize_reference(kind.spec, x);

            Complex ip(0.0);
            for (size_t i = 0; i < a.size(); ++i) ip += std::conj(b[i]) * a[i];
            const Complex scale = std::abs(ip) > 0.0 ? ip / std::abs(ip) : Complex(1.0);
            double dev = 0.0;
            for (size_t i = 0; i < a.size(); ++i)
                dev = std::max(dev, std::abs(a[i] - scale * b[i]));
            worst = std::max(worst, dev);
        }
        out.push_back(
            {"equivalence", kind.name, "max_deviation", 0.0, worst, cfg.trials, cfg.seed});
    }
    return out;
}

}  // namespace mwf
