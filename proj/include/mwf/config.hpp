// config.hpp - flat key-value scenario configuration
//
// Grammar (one construct per line):
//   [section]        section header; every key lives in exactly one section
//   key = value      key: [a-z0-9_]+; value: rest of line, trimmed
//   # comment        full-line comments and blank lines are ignored
// Lists are comma-separated inside a value. Duplicate keys, keys outside a
// section, and unknown keys are all errors. parse/validate collect every
// violation (each tagged "origin:line:") before throwing, so a broken file
// reports all of its problems in one pass. serialize_config emits the
// canonical form: sections in order, "key = value" lines, one blank line
// between sections, no comments; parse(serialize(x)) == x byte-for-byte.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwf/channel.hpp"
#include "mwf/coexistence.hpp"
#include "mwf/modulation.hpp"
#include "mwf/sensing.hpp"

namespace mwf {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct ConfigSection {
    std::string name;
    int line = 0;
    std::vector<ConfigEntry> entries;
};

struct RawConfig {
    std::string origin;  // file path, or a caller-chosen tag for in-memory text
    std::vector<ConfigSection> sections;

    const ConfigSection* find_section(const std::string& name) const;
    const ConfigEntry* find(const std::string& section, const std::string& key) const;
};

RawConfig parse_config(const std::string& text, const std::string& origin);
RawConfig load_config_file(const std::string& path);
std::string serialize_config(const RawConfig& cfg);

enum class Experiment { ber, rate, sensing, equivalence };

// Transmission schemes the experiment drivers understand. The first six are
// standalone waveforms; the last three are the coexistence composites
// (scifdm_chirp is the lattice partition carrying a plain ramp).
enum class Scheme {
    ofdm,
    sc_ifdm,
    otfs,
    ocdm,
    afdm,
    fmcw,
    otfs_ofdm,
    scifdm_afdm,
    scifdm_chirp,
};

const char* to_string(Experiment e);
const char* to_string(Scheme s);

// Inputs of the five closed-form rate expressions. T is the OFDM frame
// duration in samples (defaults to M*N); overheads are symbol counts.
struct RateParams {
    int M = 32;
    int N = 32;
    int alpha = 2;
    int l_fcp = 4;
    double T = 1024.0;
    double T_cp = 128.0;
    double phi_otfs = 32.0;
    double phi_ofdm = 16.0;
    double theta_ofdm = 32.0;
    double theta_otfs = 1.0;
    double theta_ocdm = 32.0;
    double theta_afdm = 32.0;
    std::vector<double> gamma_db;
};

// Overhead defaults declared by this artifact (the reference text gives
// none): one pilot column for OTFS (M bins), one pilot subcarrier per OFDM
// symbol, one pilot chirp (M bins) for OCDM/AFDM; T = MN, T_cp = N*l_fcp.
RateParams default_rate_params(int M, int N, int alpha, int l_fcp);

struct SensingScenario {
    RadarConfig radar;
    std::vector<Scheme> schemes;
    int n_targets = 3;
    double max_range_m = 100.0;
    double max_speed_mps = 80.0;
    bool bin_centered = true;
    std::vector<double> snr_db;
    std::vector<double> power_ratios_db{15.0, 20.0};
    std::vector<int> chirp_indices{0};
    AfdmParams afdm{2, 0.0};
    int guard_delay = 1;
    int guard_doppler = 1;
    int map_dump_snr_index = -1;  // -1: last grid point
};

struct ScenarioConfig {
    Experiment experiment = Experiment::ber;
    long trials = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_path;

    // waveform/coexistence selection (ber and equivalence experiments)
    Scheme scheme = Scheme::otfs;
    int M = 32;
    int N = 32;
    Constellation constellation = Constellation::qpsk;
    AfdmParams afdm{2, 0.0};
    std::vector<int> chirp_indices{0};
    int prefix_len = 0;  // cp for ofdm, whole-frame rcp otherwise
    CoexOtfsOfdmConfig otfs_ofdm;
    CoexScifdmAfdmConfig scifdm_afdm;

    ChannelSpec channel;
    std::vector<double> snr_db;

    RateParams rate;
    SensingScenario sensing;
};

// Builds the typed scenario from parsed text, checking every module-level
// precondition up front; throws ConfigError listing all violations.
ScenarioConfig load_scenario(const RawConfig& raw);
ScenarioConfig load_scenario_file(const std::string& path);

// Canonical serialization of a scenario's raw form is exercised by tests via
// serialize_config; this emits a scenario back to canonical text.
std::string serialize_scenario(const ScenarioConfig& cfg);

}  // namespace mwf
