// mwfsim - scenario runner for the mother-waveform toolkit
//
// Subcommands pick the experiment; a scenario file supplies the parameters
// and every knob has a sane default, so `mwfsim rate` alone produces output.
// Results go to --out as CSV, or to stdout when no path is given. Exit
// codes: 0 success, 2 configuration problem, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mwf/config.hpp"
#include "mwf/experiments.hpp"
#include "mwf/lattice.hpp"
#include "mwf/waveforms.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out_path;
    long trials = -1;
    long long seed = -1;
    int threads = -1;
};

void add_common(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("-c,--config", ov.config_path, "scenario file (defaults apply without it)");
    cmd->add_option("-o,--out", ov.out_path, "output CSV path (stdout when omitted)");
    cmd->add_option("--trials", ov.trials, "override the trial count");
    cmd->add_option("--seed", ov.seed, "override the base seed");
    cmd->add_option("--threads", ov.threads, "override the worker thread count");
}

mwf::ScenarioConfig load(const Overrides& ov, mwf::Experiment kind) {
    mwf::ScenarioConfig cfg =
        ov.config_path.empty()
            ? mwf::load_scenario(mwf::parse_config("", "defaults"))
            : mwf::load_scenario_file(ov.config_path);
    cfg.experiment = kind;
    if (ov.trials >= 0) cfg.trials = ov.trials;
    if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.threads >= 1) cfg.threads = ov.threads;
    if (!ov.out_path.empty()) cfg.out_path = ov.out_path;
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

std::string map_dump_path(const std::string& out_path) {
    const size_t dot = out_path.rfind('.');
    const size_t slash = out_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out_path + "_map.csv";
    return out_path.substr(0, dot) + "_map.csv";
}

// Owner map of the configured scheme's resources. Coexistence schemes show
// the actual partition; a standalone chirp kind shows its sparse support;
// dense kinds own every bin.
std::string occupancy_csv(const mwf::ScenarioConfig& cfg) {
    using namespace mwf;
    std::string out;
    switch (cfg.scheme) {
        case Scheme::otfs_ofdm: {
            out = "block,owner\n";
            for (int n = 0; n < cfg.otfs_ofdm.N; ++n) {
                out += std::to_string(n);
                out += ',';
                out += otfs_owns_block(cfg.otfs_ofdm, n) ? "otfs" : "ofdm";
                out += '\n';
            }
            return out;
        }
        case Scheme::scifdm_afdm:
        case Scheme::scifdm_chirp: {
            const ScifdmAfdmLayout layout = scifdm_afdm_layout(cfg.scifdm_afdm);
            out = "k,l,owner\n";
            for (int k = 0; k < layout.N; ++k)
                for (int l = 0; l < layout.M; ++l) {
                    const size_t b = static_cast<size_t>(l) +
                                     static_cast<size_t>(layout.M) * static_cast<size_t>(k);
                    const char* owner = layout.owner[b] == BinOwner::data    ? "data"
                                        : layout.owner[b] == BinOwner::chirp ? "chirp"
                                                                             : "guard";
                    out += std::to_string(k);
                    out += ',';
                    out += std::to_string(l);
                    out += ',';
                    out += owner;
                    out += '\n';
                }
            return out;
        }
        case Scheme::fmcw:
        case Scheme::ocdm:
        case Scheme::afdm: {
            const ChirpKind kind = cfg.scheme == Scheme::fmcw   ? ChirpKind::fmcw
                                   : cfg.scheme == Scheme::ocdm ? ChirpKind::ocdm
                                                                : ChirpKind::afdm;
            std::vector<std::string> owner(
                static_cast<size_t>(cfg.M) * static_cast<size_t>(cfg.N), "empty");
            for (const int idx : cfg.chirp_indices) {
                const ChirpIndexMap map = chirp_index_map(kind, cfg.M, cfg.N, idx, cfg.afdm);
                for (int l = 0; l < cfg.M; ++l) {
                    const size_t b =
                        static_cast<size_t>(l) +
                        static_cast<size_t>(cfg.M) *
                            static_cast<size_t>(map.doppler_of_delay[static_cast<size_t>(l)]);
                    owner[b] = "chirp_" + std::to_string(idx);
                }
            }
            out = "k,l,owner\n";
            for (int k = 0; k < cfg.N; ++k)
                for (int l = 0; l < cfg.M; ++l) {
                    out += std::to_string(k);
                    out += ',';
                    out += std::to_string(l);
                    out += ',';
                    out += owner[static_cast<size_t>(l) +
                                 static_cast<size_t>(cfg.M) * static_cast<size_t>(k)];
                    out += '\n';
                }
            return out;
        }
        default: {
            out = "k,l,owner\n";
            for (int k = 0; k < cfg.N; ++k)
                for (int l = 0; l < cfg.M; ++l) {
                    out += std::to_string(k);
                    out += ',';
                    out += std::to_string(l);
                    out += ",data\n";
                }
            return out;
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mother-waveform simulation driver"};
    app.require_subcommand(1);

    Overrides ov;
    CLI::App* ber = app.add_subcommand("ber", "Monte-Carlo bit error rates");
    CLI::App* rate = app.add_subcommand("rate", "closed-form spectral-efficiency curves");
    CLI::App* sensing = app.add_subcommand("sensing", "range/velocity estimation error");
    CLI::App* verify =
        app.add_subcommand("verify", "shared-modulator vs defining-equation deviation");
    CLI::App* occupancy = app.add_subcommand("occupancy", "resource owner map of a scheme");
    for (CLI::App* cmd : {ber, rate, sensing, verify, occupancy}) add_common(cmd, ov);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ber->parsed()) {
            const mwf::ScenarioConfig cfg = load(ov, mwf::Experiment::ber);
            write_text(cfg.out_path, mwf::csv_string(mwf::run_ber(cfg)));
        } else if (rate->parsed()) {
            const mwf::ScenarioConfig cfg = load(ov, mwf::Experiment::rate);
            std::vector<std::string> warnings;
            const std::string csv = mwf::csv_string(mwf::rate_curves(cfg.rate, &warnings));
            for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            write_text(cfg.out_path, csv);
        } else if (sensing->parsed()) {
            const mwf::ScenarioConfig cfg = load(ov, mwf::Experiment::sensing);
            const mwf::SensingRun run = mwf::run_sensing(cfg);
            write_text(cfg.out_path, mwf::csv_string(run.records));
            if (!cfg.out_path.empty() && !run.map_dump.empty()) {
                const std::string map_path = map_dump_path(cfg.out_path);
                write_text(map_path, run.map_dump);
                std::fprintf(stderr, "map dump (%s, %g dB SNR) -> %s\n",
                             run.map_scheme.c_str(), run.map_snr_db, map_path.c_str());
            }
        } else if (verify->parsed()) {
            mwf::ScenarioConfig cfg = load(ov, mwf::Experiment::equivalence);
            if (ov.trials < 0 && ov.config_path.empty()) cfg.trials = 50;
            const auto records = mwf::run_equivalence(cfg);
            write_text(cfg.out_path, mwf::csv_string(records));
            double worst = 0.0;
            for (const auto& r : records) worst = std::max(worst, r.value);
            if (worst > 1e-10) {
                std::fprintf(stderr, "verification FAILED: max deviation %.3g > 1e-10\n",
                             worst);
                return 3;
            }
            std::fprintf(stderr, "verified: max deviation %.3g\n", worst);
        } else if (occupancy->parsed()) {
            const mwf::ScenarioConfig cfg = load(ov, mwf::Experiment::equivalence);
            write_text(cfg.out_path, occupancy_csv(cfg));
        }
    } catch (const mwf::ConfigError& e) {
        for (const auto& v : e.violations()) std::fprintf(stderr, "config: %s\n", v.c_str());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config: %s\n", e.what());
        return 2;
    } catch (const mwf::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
