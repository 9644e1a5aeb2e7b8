#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "multiflow/errors.hpp"
#include "multiflow/scenarios.hpp"

namespace multiflow {

namespace {

const std::set<std::string> kScenarios = {
    "taylor_green",    "equal_velocity", "two_phase_shear",
    "one_d_two_phase", "continuum",      "potential"};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail_at(const std::string& path, int line, const std::string& what) {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + what);
}

// Cuts a trailing comment, honoring '#' inside double quotes.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        else if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

std::string parse_string(const std::string& path, int line, const std::string& key,
                         const std::string& raw) {
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
        fail_at(path, line, "value for '" + key + "' must be a quoted string");
    std::string body = raw.substr(1, raw.size() - 2);
    if (body.find('"') != std::string::npos)
        fail_at(path, line, "value for '" + key + "' has a stray quote");
    return body;
}

bool parse_bool(const std::string& path, int line, const std::string& key,
                const std::string& raw) {
    if (raw == "true") return true;
    if (raw == "false") return false;
    fail_at(path, line, "value for '" + key + "' must be true or false");
}

long long parse_int(const std::string& path, int line, const std::string& key,
                    const std::string& raw) {
    long long v = 0;
    auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || p != raw.data() + raw.size())
        fail_at(path, line, "value for '" + key + "' must be an integer");
    return v;
}

std::uint64_t parse_u64(const std::string& path, int line, const std::string& key,
                        const std::string& raw) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || p != raw.data() + raw.size())
        fail_at(path, line, "value for '" + key + "' must be a non-negative integer");
    return v;
}

double parse_float(const std::string& path, int line, const std::string& key,
                   const std::string& raw) {
    try {
        std::size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        fail_at(path, line, "value for '" + key + "' must be a number");
    }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[')
            fail_at(path, lineno, "sections are not supported; use flat key = value lines");
        std::size_t eq = body.find('=');
        if (eq == std::string::npos) fail_at(path, lineno, "expected key = value");
        std::string key = trim(body.substr(0, eq));
        std::string raw = trim(body.substr(eq + 1));
        if (key.empty()) fail_at(path, lineno, "missing key before '='");
        if (raw.empty()) fail_at(path, lineno, "missing value for '" + key + "'");
        if (!seen.insert(key).second) fail_at(path, lineno, "duplicate key '" + key + "'");

        if (key == "scenario") cfg.scenario = parse_string(path, lineno, key, raw);
        else if (key == "dim") cfg.dim = static_cast<int>(parse_int(path, lineno, key, raw));
        else if (key == "N") cfg.N = static_cast<int>(parse_int(path, lineno, key, raw));
        else if (key == "phases") cfg.phases = static_cast<int>(parse_int(path, lineno, key, raw));
        else if (key == "weights") cfg.weights = parse_string(path, lineno, key, raw);
        else if (key == "dt") cfg.dt = parse_float(path, lineno, key, raw);
        else if (key == "T") cfg.T = parse_float(path, lineno, key, raw);
        else if (key == "snapshot_stride")
            cfg.snapshot_stride = static_cast<int>(parse_int(path, lineno, key, raw));
        else if (key == "out_dir") cfg.out_dir = parse_string(path, lineno, key, raw);
        else if (key == "check_kelvin") cfg.check_kelvin = parse_bool(path, lineno, key, raw);
        else if (key == "check_pushforward")
            cfg.check_pushforward = parse_bool(path, lineno, key, raw);
        else if (key == "check_consistency")
            cfg.check_consistency = parse_bool(path, lineno, key, raw);
        else if (key == "seed") cfg.seed = parse_u64(path, lineno, key, raw);
        else fail_at(path, lineno, "unknown key '" + key + "'");
    }
    if (cfg.scenario.empty()) throw ConfigError(path + ": missing required key 'scenario'");
    resolve_config(cfg);
    return cfg;
}

ScenarioConfig default_config(const std::string& scenario) {
    ScenarioConfig cfg;
    cfg.scenario = scenario;
    resolve_config(cfg);
    return cfg;
}

void resolve_config(ScenarioConfig& cfg) {
    if (!kScenarios.count(cfg.scenario)) {
        std::string names;
        for (const auto& s : kScenarios) names += (names.empty() ? "" : ", ") + s;
        throw ConfigError("scenario: unknown scenario '" + cfg.scenario + "' (known: " + names + ")");
    }

    const bool one_dimensional = cfg.scenario == "one_d_two_phase";
    if (cfg.dim == 0) cfg.dim = one_dimensional ? 1 : (cfg.scenario == "continuum" ? 1 : 2);
    if (cfg.dim != 1 && cfg.dim != 2)
        throw ConfigError("dim: must be 1 or 2, got " + std::to_string(cfg.dim));
    if (one_dimensional && cfg.dim != 1)
        throw ConfigError("dim: scenario 'one_d_two_phase' is one-dimensional");
    if ((cfg.scenario == "taylor_green" || cfg.scenario == "equal_velocity" ||
         cfg.scenario == "two_phase_shear") &&
        cfg.dim != 2)
        throw ConfigError("dim: scenario '" + cfg.scenario + "' is two-dimensional");

    if (cfg.phases == 0) {
        if (cfg.scenario == "taylor_green") cfg.phases = 1;
        else if (cfg.scenario == "continuum") cfg.phases = 8;
        else cfg.phases = 2;
    }
    if (cfg.phases < 1) throw ConfigError("phases: must be at least 1");
    if (cfg.scenario == "taylor_green" && cfg.phases != 1)
        throw ConfigError("phases: scenario 'taylor_green' has exactly 1 phase");
    if ((cfg.scenario == "equal_velocity" || cfg.scenario == "two_phase_shear" ||
         cfg.scenario == "one_d_two_phase") &&
        cfg.phases != 2)
        throw ConfigError("phases: scenario '" + cfg.scenario + "' has exactly 2 phases");
    if (cfg.scenario == "continuum" && cfg.phases < 2)
        throw ConfigError("phases: scenario 'continuum' needs at least 2 label nodes");

    if (cfg.weights.empty()) cfg.weights = cfg.scenario == "continuum" ? "trapezoid" : "unit";
    if (cfg.weights != "unit" && cfg.weights != "trapezoid")
        throw ConfigError("weights: must be \"unit\" or \"trapezoid\", got \"" + cfg.weights + "\"");
    if (cfg.scenario == "continuum" && cfg.weights != "trapezoid")
        throw ConfigError("weights: scenario 'continuum' uses trapezoid weights");
    if (cfg.scenario != "continuum" && cfg.weights != "unit")
        throw ConfigError("weights: scenario '" + cfg.scenario + "' uses unit weights");

    if (!is_power_of_two(cfg.N) || cfg.N < 16)
        throw ConfigError("N: must be a power of two and at least 16, got " + std::to_string(cfg.N));
    if (!(cfg.dt > 0.0)) throw ConfigError("dt: must be positive");
    if (!(cfg.T > 0.0)) throw ConfigError("T: must be positive");
    if (cfg.snapshot_stride < 1) throw ConfigError("snapshot_stride: must be at least 1");
    if (cfg.out_dir.empty()) throw ConfigError("out_dir: must not be empty");
}

}  // namespace multiflow
