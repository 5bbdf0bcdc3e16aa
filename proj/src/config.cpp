#include "mwf/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace mwf {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "configuration invalid (" + std::to_string(v.size()) +
                      (v.size() == 1 ? " violation)" : " violations)");
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string cur;
    std::stringstream ss(value);
    while (std::getline(ss, cur, ',')) items.push_back(trim(cur));
    if (!value.empty() && value.back() == ',') items.push_back("");
    return items;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

const ConfigSection* RawConfig::find_section(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

const ConfigEntry* RawConfig::find(const std::string& section, const std::string& key) const {
    const ConfigSection* s = find_section(section);
    if (!s) return nullptr;
    for (const auto& e : s->entries)
        if (e.key == key) return &e;
    return nullptr;
}

RawConfig parse_config(const std::string& text, const std::string& origin) {
    RawConfig cfg;
    cfg.origin = origin;
    std::vector<std::string> violations;
    auto at = [&](int line) { return origin + ":" + std::to_string(line) + ": "; };

    std::stringstream ss(text);
    std::string raw_line;
    int line_no = 0;
    ConfigSection* current = nullptr;
    while (std::getline(ss, raw_line)) {
        ++line_no;
        const std::string line = trim(raw_line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                violations.push_back(at(line_no) + "unterminated section header");
                continue;
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (!valid_name(name)) {
                violations.push_back(at(line_no) + "invalid section name '" + name + "'");
                continue;
            }
            if (cfg.find_section(name)) {
                violations.push_back(at(line_no) + "duplicate section [" + name + "]");
                continue;
            }
            cfg.sections.push_back(ConfigSection{name, line_no, {}});
            current = &cfg.sections.back();
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            violations.push_back(at(line_no) + "expected 'key = value' or '[section]'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_name(key)) {
            violations.push_back(at(line_no) + "invalid key '" + key + "'");
            continue;
        }
        if (!current) {
            violations.push_back(at(line_no) + "key '" + key + "' appears before any [section]");
            continue;
        }
        bool dup = false;
        for (const auto& e : current->entries)
            if (e.key == key) dup = true;
        if (dup) {
            violations.push_back(at(line_no) + "duplicate key '" + key + "' in [" +
                                 current->name + "]");
            continue;
        }
        current->entries.push_back(ConfigEntry{key, value, line_no});
    }
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

RawConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({path + ":0: cannot open file"});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string serialize_config(const RawConfig& cfg) {
    std::string out;
    for (size_t i = 0; i < cfg.sections.size(); ++i) {
        if (i) out += "\n";
        out += "[" + cfg.sections[i].name + "]\n";
        for (const auto& e : cfg.sections[i].entries) out += e.key + " = " + e.value + "\n";
    }
    return out;
}

const char* to_string(Experiment e) {
    switch (e) {
        case Experiment::ber: return "ber";
        case Experiment::rate: return "rate";
        case Experiment::sensing: return "sensing";
        case Experiment::equivalence: return "equivalence";
    }
    return "?";
}

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::ofdm: return "ofdm";
        case Scheme::sc_ifdm: return "sc_ifdm";
        case Scheme::otfs: return "otfs";
        case Scheme::ocdm: return "ocdm";
        case Scheme::afdm: return "afdm";
        case Scheme::fmcw: return "fmcw";
        case Scheme::otfs_ofdm: return "otfs_ofdm";
        case Scheme::scifdm_afdm: return "scifdm_afdm";
        case Scheme::scifdm_chirp: return "scifdm_chirp";
    }
    return "?";
}

RateParams default_rate_params(int M, int N, int alpha, int l_fcp) {
    RateParams p;
    p.M = M;
    p.N = N;
    p.alpha = alpha;
    p.l_fcp = l_fcp;
    p.T = static_cast<double>(M) * N;
    p.T_cp = static_cast<double>(N) * l_fcp;
    p.phi_otfs = M;                                   // one pilot column
    p.phi_ofdm = static_cast<double>(N) / alpha;      // one pilot subcarrier per symbol
    p.theta_ofdm = N;
    p.theta_otfs = 1.0;
    p.theta_ocdm = M;                                 // one pilot chirp
    p.theta_afdm = M;
    p.gamma_db.clear();
    for (int g = 0; g <= 30; ++g) p.gamma_db.push_back(g);
    return p;
}

namespace {

// Typed access over RawConfig that records one violation per problem instead
// of stopping, and tracks key consumption so typos surface as unknown-key
// errors with their line numbers.
class Reader {
public:
    Reader(const RawConfig& raw, std::vector<std::string>& out) : raw_(raw), out_(out) {}

    bool has(const std::string& sec, const std::string& key) const {
        return raw_.find(sec, key) != nullptr;
    }

    void fail(const std::string& sec, const std::string& key, const std::string& msg) {
        const ConfigEntry* e = raw_.find(sec, key);
        const ConfigSection* s = raw_.find_section(sec);
        const int line = e ? e->line : (s ? s->line : 0);
        out_.push_back(raw_.origin + ":" + std::to_string(line) + ": [" + sec + "] " + key +
                       ": " + msg);
    }

    std::string get_string(const std::string& sec, const std::string& key,
                           const std::string& def) {
        const ConfigEntry* e = consume(sec, key);
        return e ? e->value : def;
    }

    long long get_int(const std::string& sec, const std::string& key, long long def,
                      long long lo, long long hi) {
        const ConfigEntry* e = consume(sec, key);
        if (!e) return def;
        long long v = 0;
        if (!parse_int(e->value, v)) {
            fail(sec, key, "expected an integer, got '" + e->value + "'");
            return def;
        }
        if (v < lo || v > hi) {
            fail(sec, key, "value " + std::to_string(v) + " outside [" + std::to_string(lo) +
                               ", " + std::to_string(hi) + "]");
            return def;
        }
        return v;
    }

    std::uint64_t get_u64(const std::string& sec, const std::string& key, std::uint64_t def) {
        const ConfigEntry* e = consume(sec, key);
        if (!e) return def;
        errno = 0;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(e->value.c_str(), &end, 10);
        if (errno || end == e->value.c_str() || *end != '\0' ||
            e->value.find('-') != std::string::npos) {
            fail(sec, key, "expected an unsigned integer, got '" + e->value + "'");
            return def;
        }
        return v;
    }

    double get_double(const std::string& sec, const std::string& key, double def) {
        const ConfigEntry* e = consume(sec, key);
        if (!e) return def;
        double v = 0;
        if (!parse_double(e->value, v)) {
            fail(sec, key, "expected a number, got '" + e->value + "'");
            return def;
        }
        return v;
    }

    bool get_bool(const std::string& sec, const std::string& key, bool def) {
        const ConfigEntry* e = consume(sec, key);
        if (!e) return def;
        if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
        if (e->value == "false" || e->value == "no" || e->value == "0") return false;
        fail(sec, key, "expected true/false, got '" + e->value + "'");
        return def;
    }

    std::vector<double> get_doubles(const std::string& sec, const std::string& key,
                                    std::vector<double> def) {
        const ConfigEntry* e = consume(sec, key);
        if (!e) return def;
        std::vector<double> out;
        for (const std::string& item : split_list(e->value)) {
            double v = 0;
            if (!parse_double(item, v)) {
                fail(sec, key, "list item '" + item + "' is not a number");
                return def;
            }
            out.push_back(v);
        }
        if (out.empty()) {
            fail(sec, key, "list must not be empty");
            return def;
        }
        return out;
    }

    std::vector<int> get_ints(const std::string& sec, const std::string& key,
                              std::vector<int> def) {
        const ConfigEntry* e = consume(sec, key);
        if (!e) return def;
        std::vector<int> out;
        for (const std::string& item : split_list(e->value)) {
            long long v = 0;
            if (!parse_int(item, v) || v < -(1LL << 31) || v >= (1LL << 31)) {
                fail(sec, key, "list item '" + item + "' is not an integer");
                return def;
            }
            out.push_back(static_cast<int>(v));
        }
        if (out.empty()) {
            fail(sec, key, "list must not be empty");
            return def;
        }
        return out;
    }

    template <typename T>
    T get_enum(const std::string& sec, const std::string& key,
               const std::vector<std::pair<std::string, T>>& names, T def) {
        const ConfigEntry* e = consume(sec, key);
        if (!e) return def;
        for (const auto& [name, v] : names)
            if (e->value == name) return v;
        std::string allowed;
        for (const auto& [name, v] : names) {
            (void)v;
            if (!allowed.empty()) allowed += ", ";
            allowed += name;
        }
        fail(sec, key, "unknown value '" + e->value + "' (expected one of: " + allowed + ")");
        return def;
    }

    // Every key not consumed by a getter is unknown: report each with its line.
    void flag_unknown() {
        for (const auto& s : raw_.sections) {
            if (!known_sections_.count(s.name)) {
                out_.push_back(raw_.origin + ":" + std::to_string(s.line) + ": unknown section [" +
                               s.name + "]");
                continue;
            }
            for (const auto& e : s.entries)
                if (!consumed_.count(s.name + "\n" + e.key))
                    out_.push_back(raw_.origin + ":" + std::to_string(e.line) + ": [" + s.name +
                                   "] unknown key '" + e.key + "'");
        }
    }

    void know_section(const std::string& sec) { known_sections_.insert(sec); }

private:
    const ConfigEntry* consume(const std::string& sec, const std::string& key) {
        known_sections_.insert(sec);
        consumed_.insert(sec + "\n" + key);
        return raw_.find(sec, key);
    }

    static bool parse_int(const std::string& s, long long& v) {
        errno = 0;
        char* end = nullptr;
        v = std::strtoll(s.c_str(), &end, 10);
        return !errno && end != s.c_str() && *end == '\0';
    }

    static bool parse_double(const std::string& s, double& v) {
        errno = 0;
        char* end = nullptr;
        v = std::strtod(s.c_str(), &end);
        return !errno && end != s.c_str() && *end == '\0';
    }

    const RawConfig& raw_;
    std::vector<std::string>& out_;
    std::set<std::string> consumed_;
    std::set<std::string> known_sections_;
};

int max_path_delay(const ChannelSpec& spec) {
    int d = 0;
    for (const auto& p : spec.paths) d = std::max(d, p.delay);
    return d;
}

int max_path_doppler(const ChannelSpec& spec) {
    int k = 0;
    for (const auto& p : spec.paths) k = std::max(k, std::abs(p.doppler));
    return k;
}

}  // namespace

ScenarioConfig load_scenario(const RawConfig& raw) {
    std::vector<std::string> violations;
    Reader r(raw, violations);
    ScenarioConfig cfg;

    // [experiment]
    cfg.experiment = r.get_enum<Experiment>("experiment", "kind",
                                            {{"ber", Experiment::ber},
                                             {"rate", Experiment::rate},
                                             {"sensing", Experiment::sensing},
                                             {"equivalence", Experiment::equivalence}},
                                            Experiment::ber);
    cfg.trials = r.get_int("experiment", "trials", 1000, 1, 100000000);
    cfg.seed = r.get_u64("experiment", "seed", 1);
    cfg.threads = static_cast<int>(r.get_int("experiment", "threads", 1, 1, 256));
    cfg.out_path = r.get_string("experiment", "out", "");

    // [waveform]
    cfg.scheme = r.get_enum<Scheme>("waveform", "scheme",
                                    {{"ofdm", Scheme::ofdm},
                                     {"sc_ifdm", Scheme::sc_ifdm},
                                     {"otfs", Scheme::otfs},
                                     {"ocdm", Scheme::ocdm},
                                     {"afdm", Scheme::afdm},
                                     {"fmcw", Scheme::fmcw},
                                     {"otfs_ofdm", Scheme::otfs_ofdm},
                                     {"scifdm_afdm", Scheme::scifdm_afdm},
                                     {"scifdm_chirp", Scheme::scifdm_chirp}},
                                    Scheme::otfs);
    cfg.M = static_cast<int>(r.get_int("waveform", "m", 32, 1, 4096));
    cfg.N = static_cast<int>(r.get_int("waveform", "n", 32, 1, 4096));
    cfg.constellation = r.get_enum<Constellation>(
        "waveform", "constellation",
        {{"qpsk", Constellation::qpsk}, {"16qam", Constellation::qam16},
         {"qam16", Constellation::qam16}},
        Constellation::qpsk);
    cfg.afdm.c1_prime = static_cast<int>(r.get_int("waveform", "c1_prime", 2, 0, 1 << 20));
    cfg.afdm.c2 = r.get_double("waveform", "c2", 0.0);
    cfg.chirp_indices = r.get_ints("waveform", "chirp_indices", {0});
    cfg.prefix_len = static_cast<int>(r.get_int("waveform", "prefix_len", 0, 0, 1 << 20));

    const int alpha = static_cast<int>(r.get_int("waveform", "alpha", 2, 1, 4096));
    const int q1 = static_cast<int>(r.get_int("waveform", "q1", 0, 0, 4095));
    const int l_fcp = static_cast<int>(r.get_int("waveform", "l_fcp", 4, 0, 1 << 20));
    const int guard_delay = static_cast<int>(r.get_int("waveform", "guard_delay", 1, 0, 4096));
    const int guard_doppler = static_cast<int>(r.get_int("waveform", "guard_doppler", 1, 0, 4096));
    const double ratio_db = r.get_double("waveform", "power_ratio_db", 20.0);
    const int l_rcp = static_cast<int>(r.get_int("waveform", "l_rcp", 4, 0, 1 << 20));
    const ChirpKind coex_kind = r.get_enum<ChirpKind>(
        "waveform", "chirp_kind",
        {{"afdm", ChirpKind::afdm}, {"ocdm", ChirpKind::ocdm}, {"fmcw", ChirpKind::fmcw}},
        ChirpKind::afdm);

    cfg.otfs_ofdm.M = cfg.M;
    cfg.otfs_ofdm.N = cfg.N;
    cfg.otfs_ofdm.alpha = alpha;
    cfg.otfs_ofdm.q1 = q1;
    cfg.otfs_ofdm.l_fcp = l_fcp;

    cfg.scifdm_afdm.M = cfg.M;
    cfg.scifdm_afdm.N = cfg.N;
    cfg.scifdm_afdm.chirp_kind =
        cfg.scheme == Scheme::scifdm_chirp ? ChirpKind::fmcw : coex_kind;
    cfg.scifdm_afdm.afdm = cfg.afdm;
    cfg.scifdm_afdm.chirp_indices = cfg.chirp_indices;
    cfg.scifdm_afdm.guard_delay = guard_delay;
    cfg.scifdm_afdm.guard_doppler = guard_doppler;
    cfg.scifdm_afdm.power_ratio_db = ratio_db;
    cfg.scifdm_afdm.l_rcp = l_rcp;

    // [channel]
    const std::vector<double> gains = r.get_doubles("channel", "gains", {1.0});
    const std::vector<int> delays = r.get_ints("channel", "delays", {0});
    const std::vector<int> dopplers = r.get_ints("channel", "dopplers", {0});
    cfg.channel.normalization = r.get_enum<ChannelNormalization>(
        "channel", "normalization",
        {{"unit_power", ChannelNormalization::unit_power}, {"raw", ChannelNormalization::raw}},
        ChannelNormalization::unit_power);
    cfg.snr_db = r.get_doubles("channel", "snr_db", {0, 5, 10, 15, 20});
    if (gains.size() != delays.size() || gains.size() != dopplers.size()) {
        r.fail("channel", "gains",
               "gains/delays/dopplers must have the same length (got " +
                   std::to_string(gains.size()) + "/" + std::to_string(delays.size()) + "/" +
                   std::to_string(dopplers.size()) + ")");
    } else {
        for (size_t i = 0; i < gains.size(); ++i)
            cfg.channel.paths.push_back({Complex{gains[i], 0.0}, delays[i], dopplers[i]});
    }

    // [rate]
    {
        const int rm = static_cast<int>(r.get_int("rate", "m", 32, 1, 1 << 20));
        const int rn = static_cast<int>(r.get_int("rate", "n", 32, 1, 1 << 20));
        const int ra = static_cast<int>(r.get_int("rate", "alpha", 2, 1, 1 << 20));
        const int rl = static_cast<int>(r.get_int("rate", "l_fcp", 4, 0, 1 << 20));
        RateParams def = default_rate_params(rm, rn, ra, rl);
        def.T = r.get_double("rate", "t", def.T);
        def.T_cp = r.get_double("rate", "t_cp", def.T_cp);
        def.phi_otfs = r.get_double("rate", "phi_otfs", def.phi_otfs);
        def.phi_ofdm = r.get_double("rate", "phi_ofdm", def.phi_ofdm);
        def.theta_ofdm = r.get_double("rate", "theta_ofdm", def.theta_ofdm);
        def.theta_otfs = r.get_double("rate", "theta_otfs", def.theta_otfs);
        def.theta_ocdm = r.get_double("rate", "theta_ocdm", def.theta_ocdm);
        def.theta_afdm = r.get_double("rate", "theta_afdm", def.theta_afdm);
        def.gamma_db = r.get_doubles("rate", "gamma_db", def.gamma_db);
        cfg.rate = def;
    }

    // [sensing]
    {
        SensingScenario& s = cfg.sensing;
        s.radar.carrier_hz = r.get_double("sensing", "f_c", 77.0e9);
        s.radar.bandwidth_hz = r.get_double("sensing", "bandwidth", 200.0e6);
        s.radar.M = static_cast<int>(r.get_int("sensing", "m", 32, 1, 4096));
        s.radar.N = static_cast<int>(r.get_int("sensing", "n", 32, 1, 4096));
        s.radar.n_sym = static_cast<int>(r.get_int("sensing", "n_sym", 200, 1, 1 << 20));
        s.radar.wave_speed = r.get_double("sensing", "wave_speed", 2.998e8);
        const std::string scheme_list = r.get_string("sensing", "schemes", "");
        if (!scheme_list.empty()) {
            s.schemes.clear();
            for (const std::string& item : split_list(scheme_list)) {
                if (item == "fmcw") s.schemes.push_back(Scheme::fmcw);
                else if (item == "scifdm_chirp") s.schemes.push_back(Scheme::scifdm_chirp);
                else if (item == "scifdm_afdm") s.schemes.push_back(Scheme::scifdm_afdm);
                else r.fail("sensing", "schemes",
                            "unknown sensing scheme '" + item +
                                "' (expected fmcw, scifdm_chirp or scifdm_afdm)");
            }
        } else {
            s.schemes = {Scheme::fmcw, Scheme::scifdm_chirp, Scheme::scifdm_afdm};
        }
        s.n_targets = static_cast<int>(r.get_int("sensing", "n_targets", 3, 1, 64));
        s.max_range_m = r.get_double("sensing", "max_range", 100.0);
        s.max_speed_mps = r.get_double("sensing", "max_speed", 80.0);
        s.bin_centered = r.get_bool("sensing", "bin_centered", true);
        s.snr_db = r.get_doubles("sensing", "snr_db", {-10, -5, 0, 5, 10, 15, 20});
        s.power_ratios_db = r.get_doubles("sensing", "power_ratios_db", {15, 20});
        s.chirp_indices = r.get_ints("sensing", "chirp_indices", {0});
        s.afdm.c1_prime = static_cast<int>(r.get_int("sensing", "c1_prime", 2, 0, 1 << 20));
        s.afdm.c2 = r.get_double("sensing", "c2", 0.0);
        s.guard_delay = static_cast<int>(r.get_int("sensing", "guard_delay", 1, 0, 4096));
        s.guard_doppler = static_cast<int>(r.get_int("sensing", "guard_doppler", 1, 0, 4096));
        s.map_dump_snr_index = static_cast<int>(
            r.get_int("sensing", "map_dump_snr_index", -1, -1,
                      static_cast<long long>(s.snr_db.size()) - 1));
    }

    // ---- cross-field validation (line numbers point at the nearest key) ----
    const bool coex_otfs = cfg.scheme == Scheme::otfs_ofdm;
    const bool coex_chirp =
        cfg.scheme == Scheme::scifdm_afdm || cfg.scheme == Scheme::scifdm_chirp;

    if (coex_otfs || r.has("waveform", "alpha") || r.has("waveform", "q1") ||
        r.has("waveform", "l_fcp")) {
        try {
            validate(cfg.otfs_ofdm);
        } catch (const std::exception& e) {
            r.fail("waveform", "alpha", e.what());
        }
    }
    if (coex_chirp || r.has("waveform", "chirp_kind") || r.has("waveform", "guard_delay") ||
        r.has("waveform", "guard_doppler") || r.has("waveform", "l_rcp")) {
        try {
            scifdm_afdm_layout(cfg.scifdm_afdm);
        } catch (const std::exception& e) {
            r.fail("waveform", "scheme", e.what());
        }
    }
    if (cfg.experiment == Experiment::ber &&
        (cfg.scheme == Scheme::ocdm || cfg.scheme == Scheme::afdm ||
         cfg.scheme == Scheme::fmcw)) {
        const ChirpKind kind = cfg.scheme == Scheme::ocdm   ? ChirpKind::ocdm
                               : cfg.scheme == Scheme::afdm ? ChirpKind::afdm
                                                            : ChirpKind::fmcw;
        for (int idx : cfg.chirp_indices) {
            try {
                chirp_index_map(kind, cfg.M, cfg.N, idx, cfg.afdm);
            } catch (const std::exception& e) {
                r.fail("waveform", "chirp_indices", e.what());
                break;
            }
        }
    }

    if (cfg.experiment == Experiment::ber) {
        const int delay = max_path_delay(cfg.channel);
        if (coex_otfs) {
            if (cfg.otfs_ofdm.l_fcp < delay)
                r.fail("waveform", "l_fcp",
                       "must cover the longest channel delay (" + std::to_string(delay) + ")");
        } else if (coex_chirp) {
            if (cfg.scifdm_afdm.l_rcp < delay)
                r.fail("waveform", "l_rcp",
                       "must cover the longest channel delay (" + std::to_string(delay) + ")");
            if (cfg.scifdm_afdm.guard_delay < delay ||
                cfg.scifdm_afdm.guard_doppler < max_path_doppler(cfg.channel))
                r.fail("waveform", "guard_delay",
                       "guard radii must cover the channel spread for orthogonal coexistence");
        } else if (cfg.prefix_len < delay) {
            r.fail("waveform", "prefix_len",
                   "must cover the longest channel delay (" + std::to_string(delay) + ")");
        }
        for (const auto& p : cfg.channel.paths) {
            if (p.delay < 0 || p.delay >= cfg.M * cfg.N) {
                r.fail("channel", "delays", "path delays must lie in [0, m*n)");
                break;
            }
        }
        if (cfg.channel.paths.empty()) r.fail("channel", "gains", "at least one path required");
    }

    {
        const RateParams& p = cfg.rate;
        if (p.N % p.alpha != 0)
            r.fail("rate", "alpha",
                   "must divide n (alpha=" + std::to_string(p.alpha) + ", n=" +
                       std::to_string(p.N) + ")");
        if (!(p.T > 0)) r.fail("rate", "t", "must be positive");
        if (p.T_cp < 0) r.fail("rate", "t_cp", "must be nonnegative");
        const double mn = static_cast<double>(p.M) * p.N;
        if (p.phi_otfs > mn / p.alpha)
            r.fail("rate", "phi_otfs", "exceeds the OTFS share MN/alpha");
        if (p.phi_ofdm > p.T / p.alpha) r.fail("rate", "phi_ofdm", "exceeds the OFDM share T/alpha");
        if (p.theta_ofdm > p.T) r.fail("rate", "theta_ofdm", "exceeds T");
        if (p.theta_otfs > p.M) r.fail("rate", "theta_otfs", "exceeds M");
        if (p.theta_ocdm > mn) r.fail("rate", "theta_ocdm", "exceeds MN");
        if (p.theta_afdm > mn) r.fail("rate", "theta_afdm", "exceeds MN");
    }

    if (cfg.experiment == Experiment::sensing) {
        const SensingScenario& s = cfg.sensing;
        if (!(s.radar.bandwidth_hz > 0)) r.fail("sensing", "bandwidth", "must be positive");
        if (!(s.radar.carrier_hz > 0)) r.fail("sensing", "f_c", "must be positive");
        if (!(s.radar.wave_speed > 0)) r.fail("sensing", "wave_speed", "must be positive");
        if (s.radar.bandwidth_hz > 0 && s.radar.carrier_hz > 0 && s.radar.wave_speed > 0) {
            if (s.max_range_m >= s.radar.unambiguous_range())
                r.fail("sensing", "max_range",
                       "exceeds the unambiguous range " + fmt_double(s.radar.unambiguous_range()));
            if (s.max_speed_mps >= 0.5 * s.radar.velocity_span())
                r.fail("sensing", "max_speed",
                       "exceeds half the velocity span " +
                           fmt_double(0.5 * s.radar.velocity_span()));
        }
        bool needs_coex = false;
        for (Scheme sch : s.schemes)
            if (sch != Scheme::fmcw) needs_coex = true;
        if (needs_coex) {
            CoexScifdmAfdmConfig probe;
            probe.M = s.radar.M;
            probe.N = s.radar.N;
            probe.chirp_kind = ChirpKind::afdm;
            probe.afdm = s.afdm;
            probe.chirp_indices = s.chirp_indices;
            probe.guard_delay = s.guard_delay;
            probe.guard_doppler = s.guard_doppler;
            for (Scheme sch : s.schemes) {
                if (sch == Scheme::fmcw) continue;
                probe.chirp_kind =
                    sch == Scheme::scifdm_chirp ? ChirpKind::fmcw : ChirpKind::afdm;
                if (sch == Scheme::scifdm_chirp && s.chirp_indices.size() > 1) {
                    r.fail("sensing", "chirp_indices", "the plain ramp admits a single chirp");
                    continue;
                }
                try {
                    scifdm_afdm_layout(probe);
                } catch (const std::exception& e) {
                    r.fail("sensing", "schemes", e.what());
                }
                // a beat rate sharing a factor g with M*N folds the delay
                // axis g-fold; ranges beyond the folded span alias
                if (sch == Scheme::scifdm_afdm && s.afdm.c1_prime >= 1) {
                    const int g = std::gcd(s.afdm.c1_prime, s.radar.M * s.radar.N);
                    if (g > 1 && s.max_range_m >= s.radar.unambiguous_range() / g)
                        r.fail("sensing", "max_range",
                               "aliases under the affine beat rate; keep it below " +
                                   fmt_double(s.radar.unambiguous_range() / g));
                }
            }
        }
    }

    if (cfg.experiment == Experiment::equivalence || cfg.experiment == Experiment::ber) {
        if (cfg.scheme == Scheme::fmcw && cfg.experiment == Experiment::ber)
            r.fail("waveform", "scheme", "fmcw carries no payload; use the sensing experiment");
    }

    r.know_section("experiment");
    r.know_section("waveform");
    r.know_section("channel");
    r.know_section("rate");
    r.know_section("sensing");
    r.flag_unknown();
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    return load_scenario(load_config_file(path));
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt_double(v[i]);
    }
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace

std::string serialize_scenario(const ScenarioConfig& cfg) {
    RawConfig raw;
    auto sec = [&](const std::string& name) -> ConfigSection& {
        raw.sections.push_back(ConfigSection{name, 0, {}});
        return raw.sections.back();
    };
    auto put = [](ConfigSection& s, const std::string& key, const std::string& value) {
        s.entries.push_back(ConfigEntry{key, value, 0});
    };

    ConfigSection& e = sec("experiment");
    put(e, "kind", to_string(cfg.experiment));
    put(e, "trials", std::to_string(cfg.trials));
    put(e, "seed", std::to_string(cfg.seed));
    put(e, "threads", std::to_string(cfg.threads));
    if (!cfg.out_path.empty()) put(e, "out", cfg.out_path);

    ConfigSection& w = sec("waveform");
    put(w, "scheme", to_string(cfg.scheme));
    put(w, "m", std::to_string(cfg.M));
    put(w, "n", std::to_string(cfg.N));
    put(w, "constellation", cfg.constellation == Constellation::qpsk ? "qpsk" : "16qam");
    put(w, "c1_prime", std::to_string(cfg.afdm.c1_prime));
    put(w, "c2", fmt_double(cfg.afdm.c2));
    put(w, "chirp_indices", join_ints(cfg.chirp_indices));
    put(w, "prefix_len", std::to_string(cfg.prefix_len));
    put(w, "alpha", std::to_string(cfg.otfs_ofdm.alpha));
    put(w, "q1", std::to_string(cfg.otfs_ofdm.q1));
    put(w, "l_fcp", std::to_string(cfg.otfs_ofdm.l_fcp));
    const char* kind_name = cfg.scifdm_afdm.chirp_kind == ChirpKind::afdm   ? "afdm"
                            : cfg.scifdm_afdm.chirp_kind == ChirpKind::ocdm ? "ocdm"
                                                                            : "fmcw";
    put(w, "chirp_kind", kind_name);
    put(w, "guard_delay", std::to_string(cfg.scifdm_afdm.guard_delay));
    put(w, "guard_doppler", std::to_string(cfg.scifdm_afdm.guard_doppler));
    put(w, "power_ratio_db", fmt_double(cfg.scifdm_afdm.power_ratio_db));
    put(w, "l_rcp", std::to_string(cfg.scifdm_afdm.l_rcp));

    ConfigSection& c = sec("channel");
    std::vector<double> gains;
    std::vector<int> delays, dopplers;
    for (const auto& p : cfg.channel.paths) {
        gains.push_back(p.gain.real());
        delays.push_back(p.delay);
        dopplers.push_back(p.doppler);
    }
    put(c, "gains", join_doubles(gains));
    put(c, "delays", join_ints(delays));
    put(c, "dopplers", join_ints(dopplers));
    put(c, "normalization",
        cfg.channel.normalization == ChannelNormalization::unit_power ? "unit_power" : "raw");
    put(c, "snr_db", join_doubles(cfg.snr_db));

    ConfigSection& rt = sec("rate");
    put(rt, "m", std::to_string(cfg.rate.M));
    put(rt, "n", std::to_string(cfg.rate.N));
    put(rt, "alpha", std::to_string(cfg.rate.alpha));
    put(rt, "l_fcp", std::to_string(cfg.rate.l_fcp));
    put(rt, "t", fmt_double(cfg.rate.T));
    put(rt, "t_cp", fmt_double(cfg.rate.T_cp));
    put(rt, "phi_otfs", fmt_double(cfg.rate.phi_otfs));
    put(rt, "phi_ofdm", fmt_double(cfg.rate.phi_ofdm));
    put(rt, "theta_ofdm", fmt_double(cfg.rate.theta_ofdm));
    put(rt, "theta_otfs", fmt_double(cfg.rate.theta_otfs));
    put(rt, "theta_ocdm", fmt_double(cfg.rate.theta_ocdm));
    put(rt, "theta_afdm", fmt_double(cfg.rate.theta_afdm));
    put(rt, "gamma_db", join_doubles(cfg.rate.gamma_db));

    ConfigSection& s = sec("sensing");
    put(s, "f_c", fmt_double(cfg.sensing.radar.carrier_hz));
    put(s, "bandwidth", fmt_double(cfg.sensing.radar.bandwidth_hz));
    put(s, "m", std::to_string(cfg.sensing.radar.M));
    put(s, "n", std::to_string(cfg.sensing.radar.N));
    put(s, "n_sym", std::to_string(cfg.sensing.radar.n_sym));
    put(s, "wave_speed", fmt_double(cfg.sensing.radar.wave_speed));
    std::string schemes;
    for (size_t i = 0; i < cfg.sensing.schemes.size(); ++i) {
        if (i) schemes += ", ";
        schemes += to_string(cfg.sensing.schemes[i]);
    }
    put(s, "schemes", schemes);
    put(s, "n_targets", std::to_string(cfg.sensing.n_targets));
    put(s, "max_range", fmt_double(cfg.sensing.max_range_m));
    put(s, "max_speed", fmt_double(cfg.sensing.max_speed_mps));
    put(s, "bin_centered", cfg.sensing.bin_centered ? "true" : "false");
    put(s, "snr_db", join_doubles(cfg.sensing.snr_db));
    put(s, "power_ratios_db", join_doubles(cfg.sensing.power_ratios_db));
    put(s, "chirp_indices", join_ints(cfg.sensing.chirp_indices));
    put(s, "c1_prime", std::to_string(cfg.sensing.afdm.c1_prime));
    put(s, "c2", fmt_double(cfg.sensing.afdm.c2));
    put(s, "guard_delay", std::to_string(cfg.sensing.guard_delay));
    put(s, "guard_doppler", std::to_string(cfg.sensing.guard_doppler));
    put(s, "map_dump_snr_index", std::to_string(cfg.sensing.map_dump_snr_index));

    return serialize_config(raw);
}

}  // namespace mwf
