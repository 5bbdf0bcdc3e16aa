#include "mwf/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mwf/fft.hpp"
#include "mwf/rng.hpp"

namespace mwf {

namespace {

void check_config(const RadarConfig& cfg) {
    if (cfg.M < 1 || cfg.N < 1 || cfg.n_sym < 1)
        throw std::invalid_argument("radar config: M, N, n_sym must be positive");
    if (!(cfg.bandwidth_hz > 0.0) || !(cfg.carrier_hz > 0.0) || !(cfg.wave_speed > 0.0))
        throw std::invalid_argument("radar config: bandwidth, carrier, wave speed must be positive");
}

void check_frames(const std::vector<CVec>& frames, const RadarConfig& cfg,
                  const char* what) {
    if (static_cast<int>(frames.size()) != cfg.n_sym)
        throw std::invalid_argument(std::string(what) + ": expected n_sym = " +
                                    std::to_string(cfg.n_sym) + " frames, got " +
                                    std::to_string(frames.size()));
    const size_t mn = static_cast<size_t>(cfg.frame_size());
    for (const CVec& f : frames)
        if (f.size() != mn)
            throw std::invalid_argument(std::string(what) +
                                        ": frame length must be M*N");
}

}  // namespace

std::vector<CVec> simulate_echo(const std::vector<CVec>& tx_frames,
                                const std::vector<Target>& targets,
                                const RadarConfig& cfg, double snr_db,
                                std::uint64_t seed) {
    check_config(cfg);
    check_frames(tx_frames, cfg, "simulate_echo");

    const int mn = cfg.frame_size();
    const double dr = cfg.range_resolution();
    const double dv = cfg.velocity_resolution();

    struct Reflector {
        int delay;
        double doppler_cycles;  // (v/dv)/n_sym, phase turns per symbol
        Complex gain;
    };
    std::vector<Reflector> refl;
    refl.reserve(targets.size());
    for (const Target& t : targets) {
        // Round-trip delay in fast-time samples; the range grid step c/(2B)
        // already encodes the two-way path, so d = r / dr.
        const int delay = static_cast<int>(std::lround(2.0 * t.range_m /
                                                       (cfg.wave_speed * cfg.sample_interval())));
        if (t.range_m < 0.0 || delay >= mn)
            throw std::invalid_argument("simulate_echo: target range outside [0, unambiguous range)");
        if (std::abs(t.velocity_mps) >= 0.5 * cfg.velocity_span())
            throw std::invalid_argument("simulate_echo: target velocity outside the unambiguous span");
        refl.push_back({delay, t.velocity_mps / dv / cfg.n_sym, t.reflectivity});
    }

    std::vector<CVec> rx(tx_frames.size(), CVec(static_cast<size_t>(mn)));
    double echo_power = 0.0;
    for (int n = 0; n < cfg.n_sym; ++n) {
        const CVec& tx = tx_frames[static_cast<size_t>(n)];
        CVec& out = rx[static_cast<size_t>(n)];
        for (const Reflector& r : refl) {
            const double angle = 2.0 * std::numbers::pi * r.doppler_cycles * n;
            const Complex rot = r.gain * Complex(std::cos(angle), std::sin(angle));
            for (int p = 0; p < mn; ++p) {
                int src = p - r.delay;
                if (src < 0) src += mn;
                out[static_cast<size_t>(p)] += rot * tx[static_cast<size_t>(src)];
            }
        }
        echo_power += energy(out);
    }
    echo_power /= static_cast<double>(cfg.n_sym) * mn;

    if (std::isinf(snr_db)) return rx;

    const double ref_power = echo_power > 0.0 ? echo_power : 1.0;
    const double sigma2 = ref_power * std::pow(10.0, -snr_db / 10.0);
    Rng rng(seed);
    for (CVec& frame : rx)
        for (Complex& v : frame) v += rng.cgaussian(sigma2);
    return rx;
}

RangeDopplerMap dechirp_process(const std::vector<CVec>& rx_frames,
                                const CVec& reference, const RadarConfig& cfg,
                                int beat_rate) {
    check_config(cfg);
    check_frames(rx_frames, cfg, "dechirp_process");
    const int mn = cfg.frame_size();
    if (reference.size() != static_cast<size_t>(mn))
        throw std::invalid_argument("dechirp_process: reference length must be M*N");
    if (beat_rate == 0)
        throw std::invalid_argument("dechirp_process: beat_rate must be nonzero");

    // Fast time: conjugate mixing turns a delay-d echo of the reference into
    // a tone at bin [beat_rate * d] of the inverse DFT.
    std::vector<CVec> beat(rx_frames.size());
    CVec mixed(static_cast<size_t>(mn));
    for (size_t n = 0; n < rx_frames.size(); ++n) {
        const CVec& rx = rx_frames[n];
        for (int p = 0; p < mn; ++p)
            mixed[static_cast<size_t>(p)] =
                std::conj(reference[static_cast<size_t>(p)]) * rx[static_cast<size_t>(p)];
        beat[n] = fft::inverse_unitary(mixed);
    }

    // Slow time: a forward DFT across symbols per beat bin.
    RangeDopplerMap map;
    map.n_range = mn;
    map.n_doppler = cfg.n_sym;
    map.beat_rate = beat_rate;
    map.power.assign(static_cast<size_t>(mn) * cfg.n_sym, 0.0);
    CVec slow_in(static_cast<size_t>(cfg.n_sym));
    CVec slow_out(static_cast<size_t>(cfg.n_sym));
    for (int q = 0; q < mn; ++q) {
        for (int n = 0; n < cfg.n_sym; ++n)
            slow_in[static_cast<size_t>(n)] = beat[static_cast<size_t>(n)][static_cast<size_t>(q)];
        fft::forward_unitary(slow_in.data(), slow_out.data(), cfg.n_sym);
        for (int u = 0; u < cfg.n_sym; ++u)
            map.power[static_cast<size_t>(q) + static_cast<size_t>(mn) * u] =
                std::norm(slow_out[static_cast<size_t>(u)]);
    }
    return map;
}

EstimationResult estimate_targets(const RangeDopplerMap& map, int k,
                                  const RadarConfig& cfg) {
    check_config(cfg);
    if (k < 1) throw std::invalid_argument("estimate_targets: k must be >= 1");
    if (map.n_range != cfg.frame_size() || map.n_doppler != cfg.n_sym)
        throw std::invalid_argument("estimate_targets: map dimensions disagree with config");
    if (map.beat_rate == 0)
        throw std::invalid_argument("estimate_targets: beat_rate must be nonzero");

    const int mn = map.n_range;
    const int ns = map.n_doppler;

    // Beat bin -> smallest delay reproducing it. When gcd(|rate|, MN) > 1
    // only every gcd-th bin is reachable and the delay is known modulo
    // MN/gcd; unreachable bins stay -1 and are never selected as peaks of a
    // well-formed map, but are defensively skipped.
    std::vector<int> delay_of_bin(static_cast<size_t>(mn), -1);
    for (int d = mn - 1; d >= 0; --d) {
        const long long q =
            ((static_cast<long long>(map.beat_rate) * d) % mn + mn) % mn;
        delay_of_bin[static_cast<size_t>(q)] = d;
    }

    std::vector<double> sorted(map.power);
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double floor = 25.0 * median;

    EstimationResult result;
    std::vector<char> excluded(map.power.size(), 0);
    const double dr = cfg.range_resolution();
    const double dv = cfg.velocity_resolution();
    for (int picked = 0; picked < k; ++picked) {
        double best = -1.0;
        int best_q = -1;
        int best_u = -1;
        for (int u = 0; u < ns; ++u) {
            for (int q = 0; q < mn; ++q) {
                const size_t idx = static_cast<size_t>(q) + static_cast<size_t>(mn) * u;
                if (excluded[idx] || delay_of_bin[static_cast<size_t>(q)] < 0) continue;
                if (map.power[idx] > best) {
                    best = map.power[idx];
                    best_q = q;
                    best_u = u;
                }
            }
        }
        if (best_q < 0 || best <= floor) {
            result.found_all = false;
            break;
        }
        const int unwrapped = best_u > ns / 2 ? best_u - ns : best_u;
        result.targets.push_back({delay_of_bin[static_cast<size_t>(best_q)] * dr,
                                  unwrapped * dv, best});
        for (int du = -1; du <= 1; ++du) {
            for (int dq = -1; dq <= 1; ++dq) {
                const int q = ((best_q + dq) % mn + mn) % mn;
                const int u = ((best_u + du) % ns + ns) % ns;
                excluded[static_cast<size_t>(q) + static_cast<size_t>(mn) * u] = 1;
            }
        }
    }
    return result;
}

SensingMetrics sensing_metrics(const std::vector<TargetEstimate>& estimates,
                               const std::vector<Target>& truth,
                               const RadarConfig& cfg) {
    check_config(cfg);
    SensingMetrics m;
    if (truth.empty()) return m;

    const double dr = cfg.range_resolution();
    const double dv = cfg.velocity_resolution();
    std::vector<char> est_used(estimates.size(), 0);
    std::vector<char> truth_used(truth.size(), 0);
    double sum_r2 = 0.0;
    double sum_v2 = 0.0;

    const size_t pairs = std::min(estimates.size(), truth.size());
    for (size_t step = 0; step < pairs; ++step) {
        double best = std::numeric_limits<double>::infinity();
        size_t bi = 0, bj = 0;
        for (size_t i = 0; i < truth.size(); ++i) {
            if (truth_used[i]) continue;
            for (size_t j = 0; j < estimates.size(); ++j) {
                if (est_used[j]) continue;
                const double er = (truth[i].range_m - estimates[j].range_m) / dr;
                const double ev = (truth[i].velocity_mps - estimates[j].velocity_mps) / dv;
                const double d2 = er * er + ev * ev;
                if (d2 < best) {
                    best = d2;
                    bi = i;
                    bj = j;
                }
            }
        }
        truth_used[bi] = 1;
        est_used[bj] = 1;
        const double er = truth[bi].range_m - estimates[bj].range_m;
        const double ev = truth[bi].velocity_mps - estimates[bj].velocity_mps;
        sum_r2 += er * er;
        sum_v2 += ev * ev;
    }

    // Misses are scored at half the unambiguous span: the worst distance the
    // cyclic measurement grid can express.
    const double miss_r = 0.5 * cfg.unambiguous_range();
    const double miss_v = 0.5 * cfg.velocity_span();
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth_used[i]) continue;
        ++m.unmatched;
        sum_r2 += miss_r * miss_r;
        sum_v2 += miss_v * miss_v;
    }

    m.range_rmse_m = std::sqrt(sum_r2 / truth.size());
    m.velocity_rmse_mps = std::sqrt(sum_v2 / truth.size());
    return m;
}

}  // namespace mwf
