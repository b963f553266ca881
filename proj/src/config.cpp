#include "shearlab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace shearlab {

double RunConfig::resolved_amp_omega() const { return amp_omega >= 0 ? amp_omega : eps0 * std::cbrt(nu); }
double RunConfig::resolved_amp_theta() const {
    return amp_theta >= 0 ? amp_theta : eps0 * std::cbrt(nu) * std::cbrt(nu);
}
double RunConfig::resolved_horizon() const { return horizon > 0 ? horizon : 5.0 / std::cbrt(nu); }

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& v) {
    double x = 0;
    const char* e = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), e, x);
    if (ec != std::errc() || p != e || !std::isfinite(x)) throw ConfigError("expected a finite number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& v) {
    long long x = 0;
    const char* e = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), e, x);
    if (ec != std::errc() || p != e) throw ConfigError("expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t to_u64(const std::string& v) {
    std::uint64_t x = 0;
    const char* e = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), e, x);
    if (ec != std::errc() || p != e) throw ConfigError("expected a non-negative integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (out.empty() || (out.size() == 1 && out[0].empty())) throw ConfigError("expected a comma-separated list");
    return out;
}

std::vector<double> to_doubles(const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(to_double(s));
    return out;
}

std::vector<std::uint64_t> to_u64s(const std::string& v) {
    std::vector<std::uint64_t> out;
    for (const auto& s : split_list(v)) out.push_back(to_u64(s));
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& f) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + f(v[i]);
    return s;
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define DBL(key, field) \
    Key{key, [](RunConfig& c, const std::string& v) { c.field = to_double(v); }, [](const RunConfig& c) { return fmt(c.field); }}
#define INT(key, field) \
    Key{key, [](RunConfig& c, const std::string& v) { c.field = static_cast<decltype(c.field)>(to_int(v)); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }}
#define U64(key, field) \
    Key{key, [](RunConfig& c, const std::string& v) { c.field = static_cast<decltype(c.field)>(to_u64(v)); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }}
#define BOOL(key, field) \
    Key{key, [](RunConfig& c, const std::string& v) { c.field = to_bool(v); }, \
        [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }}
#define STR(key, field) \
    Key{key, [](RunConfig& c, const std::string& v) { c.field = v; }, [](const RunConfig& c) { return c.field; }}
#define DLIST(key, field) \
    Key{key, [](RunConfig& c, const std::string& v) { c.field = to_doubles(v); }, \
        [](const RunConfig& c) { return join(c.field, fmt); }}
#define ULIST(key, field) \
    Key{key, [](RunConfig& c, const std::string& v) { c.field = to_u64s(v); }, \
        [](const RunConfig& c) { return join(c.field, [](std::uint64_t x) { return std::to_string(x); }); }}

const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        STR("mode", mode),
        INT("grid.nx", grid.nx),
        INT("grid.ny", grid.ny),
        DBL("grid.half_length_y", grid.half_length_y),
        DBL("grid.dealias_fraction", grid.dealias_fraction),
        DBL("physics.nu", nu),
        DBL("physics.kappa", kappa),
        BOOL("physics.linear", linear),
        DBL("multiplier.mu", mu),
        INT("multiplier.l_max", l_max),
        DBL("index.m", m),
        DBL("index.n", n),
        DBL("index.m1", m1),
        U64("init.seed", seed),
        DBL("init.eps0", eps0),
        DBL("init.amp_omega", amp_omega),
        DBL("init.amp_theta", amp_theta),
        DBL("init.width", profile.width),
        INT("init.kx_max", profile.kx_max),
        INT("init.degree", profile.degree),
        STR("run.system", system),
        DBL("run.horizon", horizon),
        DBL("run.output_dt", output_dt),
        DBL("run.c_adv", step.c_adv),
        DBL("run.dt_max", step.dt_max),
        DBL("run.dt_fixed", step.dt_fixed),
        BOOL("diagnostics.envelopes", envelopes),
        BOOL("diagnostics.weighted", weighted),
        BOOL("diagnostics.forcing", forcing),
        DBL("diagnostics.b", b),
        DBL("diagnostics.b1", b1),
        STR("output.dir", output_dir),
        STR("output.prefix", prefix),
        BOOL("output.checkpoint", checkpoint),
        DLIST("scan.nu", scan_nu),
        DLIST("scan.alpha", scan_alpha),
        DLIST("scan.beta", scan_beta),
        DLIST("scan.a", scan_a),
        ULIST("scan.seeds", scan_seeds),
        DBL("scan.horizon_factor", scan_horizon_factor),
        DBL("scan.gamma", scan_gamma),
        INT("scan.workers", scan_workers),
        BOOL("scan.bisect", scan_bisect),
        STR("scan.target", scan_target),
        DBL("scan.a_lo", scan_a_lo),
        DBL("scan.a_hi", scan_a_hi),
        DBL("scan.tol", scan_tol),
        U64("checks.samples", check_samples),
        U64("checks.seed", check_seed),
        U64("checks.identity_samples", identity_samples),
        DBL("toy.eta_max", toy_eta_max),
        INT("toy.points", toy_points),
        STR("fit.input", fit_input),
        STR("fit.column", fit_column),
        DBL("fit.efoldings", fit_efoldings),
        DBL("fit.t_lo", fit_t_lo),
        DBL("fit.t_hi", fit_t_hi),
        INT("suite.members", suite_members),
        INT("suite.nx", suite_nx),
        INT("suite.ny", suite_ny),
        DBL("suite.half_length_y", suite_half_length_y),
        U64("suite.seed", suite_seed),
        DBL("suite.b", suite_b),
        DBL("suite.d", suite_d),
        DBL("suite.t_span", suite_t_span),
    };
    return k;
}

const Key* find_key(const std::string& name) {
    for (const auto& k : keys())
        if (k.name == name) return &k;
    return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& k : keys()) v.push_back(k.name);
        return v;
    }();
    return names;
}

const std::vector<std::string>& run_modes() {
    static const std::vector<std::string> m = {"simulate",        "decompose", "scan",      "check-multipliers",
                                               "toy-model",       "fit-decay", "lemma-suite"};
    return m;
}

std::pair<std::string, std::string> split_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not of the form key=value");
    return {trim(kv.substr(0, eq)), trim(kv.substr(eq + 1))};
}

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
    struct Entry {
        std::string value;
        std::string where;
    };
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        if (!find_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (entries.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        entries[key] = {trim(line.substr(eq + 1)), where};
        order.push_back(key);
    }
    for (const auto& [key, value] : overrides) {
        if (!find_key(key)) throw ConfigError("override: unknown key '" + key + "'");
        if (!entries.count(key)) order.push_back(key);
        entries[key] = {value, "override"};
    }
    RunConfig c;
    for (const auto& key : order) {
        const Entry& e = entries.at(key);
        try {
            find_key(key)->set(c, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError(e.where + ": " + key + ": " + err.what());
        }
    }
    if (!entries.count("physics.kappa")) c.kappa = c.nu;
    return c;
}

RunConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), overrides);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string config_to_text(const RunConfig& c) {
    std::string s;
    for (const auto& k : keys()) s += k.name + " = " + k.get(c) + "\n";
    return s;
}

void validate_config(const RunConfig& c) {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    bool known = false;
    for (const auto& m : run_modes()) known = known || m == c.mode;
    if (!known) fail("mode: unknown mode '" + c.mode + "'");
    try {
        make_grid(c.grid);
    } catch (const std::invalid_argument& e) {
        fail(std::string("grid: ") + e.what());
    }
    if (!(c.nu > 0 && c.nu <= 1)) fail("physics.nu must lie in (0, 1]");
    if (!(c.kappa > 0)) fail("physics.kappa must be > 0");
    if (!(c.mu >= 2.0 / 3.0 && c.mu < 1.0)) fail("multiplier.mu must lie in [2/3, 1)");
    if (c.l_max < 8) fail("multiplier.l_max must be >= 8");
    if (c.envelopes && !(c.m > 5)) fail("index.m must exceed 5 when diagnostics.envelopes is on");
    const bool error_diag = (c.mode == "decompose" && c.weighted) || c.forcing;
    if (error_diag && !(c.n > 2 && c.n <= c.m - 3))
        fail("index.n must satisfy 2 < n <= m - 3 for error-system and forcing diagnostics");
    if (!(c.m1 >= 0)) fail("index.m1 must be >= 0");
    if (!(c.eps0 >= 0)) fail("init.eps0 must be >= 0");
    if (!(c.profile.width > 0) || c.profile.kx_max < 0 || c.profile.degree < 0) fail("init: bad profile");
    if (c.system != "full" && c.system != "interior") fail("run.system must be full or interior");
    if (c.forcing && c.system != "interior") fail("diagnostics.forcing needs run.system = interior");
    if (!(c.horizon >= 0)) fail("run.horizon must be >= 0");
    if (!(c.output_dt > 0)) fail("run.output_dt must be > 0");
    if (!(c.step.c_adv > 0) || !(c.step.dt_max > 0) || !(c.step.dt_fixed >= 0)) fail("run: bad step control");
    if (!(c.b >= 2) || !(c.b1 > 0)) fail("diagnostics: need b >= 2 and b1 > 0");
    if (c.prefix.empty() || c.prefix.find('/') != std::string::npos) fail("output.prefix must be a plain file name");
    if (c.mode == "scan") {
        for (double nu : c.scan_nu)
            if (!(nu > 0 && nu <= 1)) fail("scan.nu values must lie in (0, 1]");
        if (!(c.scan_gamma > 1)) fail("scan.gamma must exceed 1");
        if (!(c.scan_horizon_factor > 0)) fail("scan.horizon_factor must be > 0");
        if (c.scan_workers < 1) fail("scan.workers must be >= 1");
        for (double a : c.scan_a)
            if (!(a >= 0)) fail("scan.a values must be >= 0");
        if (c.scan_bisect) {
            if (c.scan_target != "omega" && c.scan_target != "theta") fail("scan.target must be omega or theta");
            if (!(c.scan_a_lo > 0 && c.scan_a_hi > c.scan_a_lo)) fail("scan: need 0 < a_lo < a_hi");
            if (!(c.scan_tol > 0)) fail("scan.tol must be > 0");
            if (c.scan_nu.size() < 3) fail("scan.bisect needs at least 3 values in scan.nu");
        }
    }
    if (c.mode == "check-multipliers" && (c.check_samples < 1 || c.identity_samples < 1))
        fail("checks: sample counts must be >= 1");
    if (c.mode == "toy-model" && (!(c.toy_eta_max >= 1) || c.toy_points < 1)) fail("toy: need eta_max >= 1, points >= 1");
    if (c.mode == "fit-decay") {
        if (c.fit_input.empty()) fail("fit.input is required for fit-decay");
        if (!(c.fit_efoldings > 0)) fail("fit.efoldings must be > 0");
        if ((c.fit_t_lo >= 0) != (c.fit_t_hi >= 0) || (c.fit_t_lo >= 0 && !(c.fit_t_hi > c.fit_t_lo)))
            fail("fit.t_lo and fit.t_hi must both be set with t_lo < t_hi");
    }
    if (c.mode == "lemma-suite") {
        if (c.suite_members < 1) fail("suite.members must be >= 1");
        if (!(c.suite_b > 2) || c.suite_d < c.suite_b) fail("suite: need d >= b > 2");
        try {
            make_grid(c.suite_nx, c.suite_ny, c.suite_half_length_y, 2.0 / 3.0);
        } catch (const std::invalid_argument& e) {
            fail(std::string("suite grid: ") + e.what());
        }
    }
}

}  // namespace shearlab
