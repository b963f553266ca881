#include "shearlab/runner.hpp"

#include "shearlab/checkpoint.hpp"
#include "shearlab/inequality_suite.hpp"
#include "shearlab/multiplier_checks.hpp"
#include "shearlab/threshold.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace shearlab {

#ifndef SHEARLAB_VERSION
#define SHEARLAB_VERSION "0.0.0"
#endif
const char* const kVersion = SHEARLAB_VERSION;

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Ctx {
    const RunConfig& cfg;
    fs::path dir;
    std::string manifest_name;
    json results = json::object();
    std::vector<std::string> outputs;

    void write(const std::string& suffix, const std::string& body) {
        const std::string name = cfg.prefix + suffix;
        std::string content;
        if (suffix.size() >= 4 && suffix.substr(suffix.size() - 4) == ".csv")
            content = "# manifest: " + manifest_name + "\n" + body;
        else
            content = body;
        write_file_atomic((dir / name).string(), content);
        outputs.push_back(name);
    }
    void write_json(const std::string& suffix, json j) {
        j["manifest"] = manifest_name;
        write(suffix, j.dump(2) + "\n");
    }
};

// NaN is not representable in JSON; it becomes null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string record_csv(const DiagnosticsRecord& rec) {
    std::string s = csv_header() + "\n";
    for (const auto& r : rec.rows) s += csv_row(r) + "\n";
    return s;
}

MultiplierParams params_for(const RunConfig& c) { return make_multiplier_params(c.nu, c.mu, c.l_max); }

DiagnosticsOptions diag_options(const RunConfig& c, const MultiplierParams* p) {
    DiagnosticsOptions o;
    o.params = p;
    o.weighted = c.weighted;
    o.forcing = c.forcing;
    o.m = c.m;
    o.n = c.n;
    o.m1 = c.m1;
    o.b = c.b;
    o.b1 = c.b1;
    return o;
}

RunControl run_control(const RunConfig& c) {
    RunControl rc;
    rc.step = c.step;
    rc.horizon = c.resolved_horizon();
    rc.output_dt = c.output_dt;
    return rc;
}

json fit_json(const FitResult& f) {
    return {{"rate", num(f.rate)},      {"prefactor", num(f.prefactor)}, {"r_squared", num(f.r_squared)},
            {"t_lo", f.t_lo},           {"t_hi", f.t_hi},                {"points", f.points}};
}

json record_summary(const DiagnosticsRecord& rec, const RunConfig& c, const MultiplierParams& p) {
    json s;
    s["system"] = rec.system;
    s["nu"] = c.nu;
    s["mu"] = c.mu;
    s["delta0"] = p.delta0;
    s["c_mu"] = p.c_mu;
    s["c1_mu"] = p.c1_mu;
    s["envelope_rate"] = p.delta0 * p.nu13;  // the figures overlay slope is minus this
    if (c.envelopes) {
        const Envelopes e = theorem_envelopes(rec, c.nu, c.eps0);
        s["eps0"] = c.eps0;
        s["envelope_constants"] = {{"C1", num(e.c1)}, {"C2", num(e.c2)}, {"C3", num(e.c3)}};
    }
    double r1 = 0, r2 = 0;
    double forcing = 0;
    bool have_forcing = false;
    for (const auto& r : rec.rows) {
        if (std::isfinite(r.r1)) r1 = std::max(r1, r.r1);
        if (std::isfinite(r.r2)) r2 = std::max(r2, r.r2);
        if (std::isfinite(r.forcing) && c.eps0 > 0) {
            have_forcing = true;
            forcing = std::max(forcing, r.forcing * (r.t * r.t + 1.0) / (c.eps0 * c.eps0 * c.nu));
        }
    }
    s["damping_sup"] = {{"r1", r1}, {"r2", r2}};
    if (have_forcing) s["forcing_sup_scaled"] = forcing;
    std::vector<double> t, w;
    for (const auto& r : rec.rows) {
        t.push_back(r.t);
        w.push_back(r.omega_neq);
    }
    try {
        const auto [lo, hi] = last_efoldings_window(t, w, 3.0, 1e-300);
        s["omega_neq_decay_fit"] = fit_json(fit_decay_rate(t, w, lo, hi));
    } catch (const std::invalid_argument&) {
        s["omega_neq_decay_fit"] = nullptr;
    }
    if (c.weighted && rec.system != "full") {
        const KReport k = smallest_K(rec);
        s["smallest_K"] = {{"k_min", k.k_min}, {"k_max", num(k.k_max)}, {"feasible", k.feasible}, {"intervals", k.intervals}};
    }
    return s;
}

void mode_simulate(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const GridPtr grid = make_grid(c.grid);
    const InitialData d = make_initial_data(grid, c.seed, c.resolved_amp_omega(), c.resolved_amp_theta(), c.m, c.profile);
    const MultiplierParams p = params_for(c);
    const PhysicsParams phys{c.nu, c.kappa, c.linear};
    const SystemTag tag = c.system == "interior" ? SystemTag::interior : SystemTag::full;
    const SimState s0 = make_state(d.omega, d.theta, tag);
    DiagnosticsRecord partial;
    partial.system = to_string(tag);
    try {
        SimulationResult r = simulate(s0, phys, run_control(c), diag_options(c, &p),
                                      [&](const SimState&, const DiagnosticsRow& row) { partial.rows.push_back(row); });
        r.record.eps0 = c.eps0;
        ctx.write(".csv", record_csv(r.record));
        json s = record_summary(r.record, c, p);
        s["steps"] = r.steps;
        s["initial_redraws"] = d.redraws;
        ctx.write_json(".summary.json", s);
        ctx.results = s;
        if (c.checkpoint) {
            Checkpoint ck;
            ck.states.push_back(r.final_state);
            ck.metadata_json = json{{"config", config_to_text(c)}}.dump();
            write_checkpoint((ctx.dir / (c.prefix + ".ckpt")).string(), ck);
            ctx.outputs.push_back(c.prefix + ".ckpt");
        }
    } catch (const BlowUpError& e) {
        ctx.write(".csv", record_csv(partial));
        ctx.results = {{"blowup_time", e.time}};
        throw;
    }
}

void mode_decompose(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const GridPtr grid = make_grid(c.grid);
    const InitialData d = make_initial_data(grid, c.seed, c.resolved_amp_omega(), c.resolved_amp_theta(), c.m, c.profile);
    const MultiplierParams p = params_for(c);
    const PhysicsParams phys{c.nu, c.kappa, c.linear};
    DiagnosticsOptions diag = diag_options(c, &p);
    const DecompositionResult r = run_decomposition(d.omega, d.theta, phys, run_control(c), diag);
    std::string csv = decomposition_csv_header() + "\n";
    for (const auto& row : r.rows) csv += decomposition_csv_row(row) + "\n";
    ctx.write(".csv", csv);
    ctx.write(".full.csv", record_csv(r.full));
    ctx.write(".interior.csv", record_csv(r.interior));
    ctx.write(".error.csv", record_csv(r.error));
    json s;
    s["max_residual"] = r.max_residual;
    s["steps"] = r.steps;
    s["full"] = record_summary(r.full, c, p);
    s["interior"] = record_summary(r.interior, c, p);
    s["error"] = record_summary(r.error, c, p);
    ctx.write_json(".summary.json", s);
    ctx.results = {{"max_residual", r.max_residual}, {"steps", r.steps}};
}

ScanConfig scan_config(const RunConfig& c) {
    ScanConfig s;
    s.nu_list = c.scan_nu;
    s.alpha_list = c.scan_alpha;
    s.beta_list = c.scan_beta;
    s.a_list = c.scan_a;
    s.seeds = c.scan_seeds;
    s.horizon_factor = c.scan_horizon_factor;
    s.gamma = c.scan_gamma;
    s.workers = c.scan_workers;
    s.mu = c.mu;
    s.cell.grid = c.grid;
    s.cell.m = c.m;
    s.cell.profile = c.profile;
    s.cell.step = c.step;
    s.cell.output_dt = c.output_dt;
    return s;
}

void mode_scan(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const ScanConfig sc = scan_config(c);
    json s;
    s["classification_note"] =
        "operational classification; only the stable side is a proven statement, transient and unstable are lab "
        "definitions";
    s["gamma"] = sc.gamma;
    if (!c.scan_bisect) {
        const ScanResult r = run_scan(sc);
        std::string csv = scan_csv_header() + "\n";
        for (const auto& cell : r.cells) csv += scan_csv_row(cell) + "\n";
        ctx.write(".csv", csv);
        std::map<std::string, int> counts;
        for (const auto& cell : r.cells) ++counts[to_string(cell.stability)];
        s["counts"] = counts;
        json flags = json::array();
        for (const auto& f : r.monotonicity_flags)
            flags.push_back({{"nu", f.nu}, {"alpha", f.alpha}, {"beta", f.beta}, {"seed", f.seed}, {"a_lo", f.a_lo},
                             {"a_hi", f.a_hi}, {"amplification_lo", f.amp_lo}, {"amplification_hi", f.amp_hi}});
        s["monotonicity_flags"] = flags;
    } else {
        // Amplitude law for the target: A = a nu^exponent; the other field stays at scan.a[0].
        const bool omega = c.scan_target == "omega";
        const double al = sc.alpha_list.front(), be = sc.beta_list.front(), a0 = sc.a_list.front();
        std::map<double, double> delta0;
        std::string csv = "nu,a,amp_omega,amp_theta,amplification_omega,classification\n";
        auto oracle = [&](double nu, double a) {
            if (!delta0.count(nu)) delta0[nu] = make_multiplier_params(nu, c.mu, c.l_max).delta0;
            CellSpec spec{nu, 0, 0, sc.seeds.front(), a, sc.horizon_factor / std::cbrt(nu)};
            spec.amp_omega = (omega ? a : a0) * std::pow(nu, al);
            spec.amp_theta = (omega ? a0 : a) * std::pow(nu, be);
            CellOptions opt = sc.cell;
            opt.delta0 = delta0[nu];
            const CellRecord rec = run_cell(spec, opt);
            const Stability st = classify(rec, sc.gamma);
            char buf[256];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", nu, a, spec.amp_omega, spec.amp_theta,
                          rec.amplification_omega, to_string(st));
            csv += buf;
            return st == Stability::stable;
        };
        // The fitted slope is for the prefactor a; add the law's exponent back.
        std::vector<Boundary> bs;
        json per_nu = json::array();
        for (double nu : sc.nu_list) {
            try {
                Boundary b = locate_boundary(nu, oracle, c.scan_a_lo, c.scan_a_hi, c.scan_tol);
                const double e = omega ? al : be;
                b.amp_stable *= std::pow(nu, e);
                b.amp_unstable *= std::pow(nu, e);
                bs.push_back(b);
                per_nu.push_back({{"nu", nu}, {"amp_stable", b.amp_stable}, {"amp_unstable", b.amp_unstable}});
            } catch (const std::runtime_error& e) {
                per_nu.push_back({{"nu", nu}, {"error", e.what()}});
            }
        }
        ctx.write(".csv", csv);
        s["boundaries"] = per_nu;
        if (bs.size() >= 3) {
            const ExponentFit f = regress_boundaries(bs);
            s[omega ? "alpha_hat" : "beta_hat"] = {{"exponent", f.exponent}, {"std_error", f.std_error},
                                                   {"ci95", {f.ci95_lo, f.ci95_hi}}};
        } else {
            s["fit_error"] = "insufficient boundaries located for a regression";
        }
    }
    ctx.write_json(".summary.json", s);
    ctx.results = s;
}

void mode_check_multipliers(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const MultiplierParams p = params_for(c);
    const auto kmax = static_cast<int>(std::ceil(4.0 / std::sqrt(c.nu)));
    const double tmax = 5.0 / p.nu13;
    const auto samples = random_symbol_samples(c.check_samples, c.check_seed, tmax, kmax);
    const DissipationReport dr = check_dissipation_lower_bound(p, samples);
    const auto id_samples = random_symbol_samples(c.identity_samples, c.check_seed + 1, tmax, kmax);
    const double id = check_upsilon_identity(p, id_samples);
    const DerivativeReport der = check_derivative_bounds(p, id_samples);
    std::mt19937_64 rng(c.check_seed + 2);
    std::uniform_real_distribution<double> ua(0.1, 10.0), uz(-20.0, 20.0);
    double lor = 0.0;
    for (int i = 0; i < 100; ++i) {
        const LorentzianPair lp = lorentzian_convolution_identity(ua(rng), ua(rng), uz(rng));
        lor = std::max(lor, std::abs(lp.lhs - lp.rhs));
    }
    std::string csv = "t,k,xi,slack\n";
    char buf[160];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.t, s.k, s.xi, dissipation_slack(p, s.t, s.k, s.xi));
        csv += buf;
    }
    ctx.write(".csv", csv);
    json s;
    s["nu"] = c.nu;
    s["mu"] = c.mu;
    s["c_mu"] = p.c_mu;
    s["c1_mu"] = p.c1_mu;
    s["delta0"] = p.delta0;
    s["dissipation"] = {{"samples", dr.samples},
                        {"min_slack", dr.min_slack},
                        {"min_relative_slack", dr.min_relative_slack},
                        {"worst", {dr.worst.t, dr.worst.k, dr.worst.xi}},
                        {"min_km1_margin", dr.min_km1_margin},
                        {"max_tail_residual", dr.max_tail_residual}};
    s["upsilon_identity_max_error"] = id;
    s["derivative_bounds"] = {{"c_xi", der.c_xi}, {"c_k", der.c_k}, {"max_fd_mismatch", der.max_fd_mismatch}};
    s["lorentzian_max_error"] = lor;
    ctx.write_json(".summary.json", s);
    ctx.results = s;
}

void mode_toy(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const double bound = std::exp(3.0 * 3.14159265358979323846);
    std::string csv = "eta,product,bound\n";
    double worst = 0.0;
    char buf[128];
    const int n = c.toy_points;
    for (int i = 0; i < n; ++i) {
        const double eta = n == 1 ? c.toy_eta_max : std::pow(c.toy_eta_max, static_cast<double>(i) / (n - 1));
        const double v = toy_growth_product(eta);
        worst = std::max(worst, v);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", eta, v, bound);
        csv += buf;
    }
    ctx.write(".csv", csv);
    json s{{"max_product", worst}, {"bound", bound}, {"within_bound", worst <= bound}, {"eta_max", c.toy_eta_max}};
    ctx.write_json(".summary.json", s);
    ctx.results = s;
}

void mode_fit(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const CsvTable tab = read_csv(c.fit_input);
    const std::vector<double> t = tab.column("t"), v = tab.column(c.fit_column);
    double lo = c.fit_t_lo, hi = c.fit_t_hi;
    if (lo < 0) std::tie(lo, hi) = last_efoldings_window(t, v, c.fit_efoldings, 1e-300);
    const FitResult f = fit_decay_rate(t, v, lo, hi);
    json s = fit_json(f);
    s["input"] = c.fit_input;
    s["column"] = c.fit_column;
    ctx.write_json(".fit.json", s);
    ctx.results = s;
}

void mode_suite(Ctx& ctx) {
    const RunConfig& c = ctx.cfg;
    const MultiplierParams p = params_for(c);
    EnsembleConfig e;
    e.nu = c.nu;
    e.mu = c.mu;
    e.nx = c.suite_nx;
    e.ny = c.suite_ny;
    e.half_length_y = c.suite_half_length_y;
    e.members = c.suite_members;
    e.seed = c.suite_seed;
    e.b = c.suite_b;
    e.d = c.suite_d;
    e.t_span = c.suite_t_span;
    e.profile = c.profile;
    const auto reps = run_inequality_suites(e, p);
    std::string csv = "suite,member,t,lhs,rhs,ratio\n";
    char buf[256];
    json s = json::object();
    for (const auto& r : reps) {
        for (std::size_t i = 0; i < r.samples.size(); ++i) {
            const auto& m = r.samples[i];
            std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%.17g,%.17g\n", to_string(r.suite), i, m.t, m.lhs, m.rhs,
                          m.ratio);
            csv += buf;
        }
        s[to_string(r.suite)] = {{"max_ratio", num(r.max_ratio)}, {"mean_ratio", num(r.mean_ratio)}, {"finite", r.finite}};
    }
    ctx.write(".csv", csv);
    ctx.write_json(".summary.json", s);
    ctx.results = s;
}

}  // namespace

std::vector<double> CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
        if (columns[j] == name) {
            std::vector<double> v;
            for (const auto& r : rows) v.push_back(r[j]);
            return v;
        }
    throw std::invalid_argument("csv: no column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    CsvTable t;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header) {
            t.columns = cells;
            header = false;
            continue;
        }
        if (cells.size() != t.columns.size()) throw IoError("csv: ragged row in " + path);
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            row.push_back(end && *end == '\0' && !c.empty() ? v : NAN);
        }
        t.rows.push_back(std::move(row));
    }
    if (header) throw IoError("csv: no header in " + path);
    return t;
}

int run(const RunConfig& cfg, std::ostream& log) {
    try {
        validate_config(cfg);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    }
    Ctx ctx{cfg, fs::path(cfg.output_dir), cfg.prefix + ".manifest.json", json::object(), {}};
    std::error_code ec;
    fs::create_directories(ctx.dir, ec);
    if (ec) {
        log << "i/o error: cannot create " << cfg.output_dir << ": " << ec.message() << "\n";
        return exit_io;
    }
    const auto t0 = std::chrono::steady_clock::now();
    int code = exit_ok;
    std::string status = "ok", message;
    try {
        if (cfg.mode == "simulate") mode_simulate(ctx);
        else if (cfg.mode == "decompose") mode_decompose(ctx);
        else if (cfg.mode == "scan") mode_scan(ctx);
        else if (cfg.mode == "check-multipliers") mode_check_multipliers(ctx);
        else if (cfg.mode == "toy-model") mode_toy(ctx);
        else if (cfg.mode == "fit-decay") mode_fit(ctx);
        else if (cfg.mode == "lemma-suite") mode_suite(ctx);
    } catch (const BlowUpError& e) {
        code = exit_blowup;
        status = "blowup";
        message = e.what();
    } catch (const IoError& e) {
        code = exit_io;
        status = "io_error";
        message = e.what();
    } catch (const ConfigError& e) {
        code = exit_config;
        status = "config_error";
        message = e.what();
    } catch (const std::invalid_argument& e) {
        code = exit_config;
        status = "invalid_argument";
        message = e.what();
    } catch (const std::exception& e) {
        code = exit_other;
        status = "error";
        message = e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!message.empty()) log << status << ": " << message << "\n";
    json m;
    m["tool"] = "shearlab";
    m["version"] = kVersion;
    m["mode"] = cfg.mode;
    m["config"] = config_to_text(cfg);
    m["status"] = status;
    m["exit_code"] = code;
    if (!message.empty()) m["message"] = message;
    m["outputs"] = ctx.outputs;
    m["timing"] = {{"wall_seconds", wall}};
    m["results"] = ctx.results;
    try {
        write_file_atomic((ctx.dir / ctx.manifest_name).string(), m.dump(2) + "\n");
    } catch (const IoError& e) {
        log << "i/o error: " << e.what() << "\n";
        return exit_io;
    }
    return code;
}

namespace {

void apply_out_dir(RunConfig& c, const std::string& out_dir) {
    if (!out_dir.empty()) {
        c.output_dir = out_dir;
    } else if (const char* env = std::getenv("SHEARLAB_OUTPUT_DIR"); env && *env) {
        c.output_dir = env;
    }
}

}  // namespace

int run_from_file(const std::string& mode, const std::string& path, const ConfigOverrides& overrides,
                  const std::string& out_dir, std::ostream& log) {
    RunConfig c;
    try {
        ConfigOverrides ov = overrides;
        if (!path.empty()) {
            // The subcommand names the mode; a file that names another one is an error.
            const RunConfig probe = load_config(path, overrides);
            RunConfig defaults;
            if (probe.mode != defaults.mode && probe.mode != mode)
                throw ConfigError("config file mode '" + probe.mode + "' does not match subcommand '" + mode + "'");
        }
        ov.emplace_back("mode", mode);
        c = path.empty() ? parse_config("", ov) : load_config(path, ov);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    }
    apply_out_dir(c, out_dir);
    return run(c, log);
}

int replay_manifest(const std::string& manifest_path, const std::string& out_dir, std::ostream& log) {
    std::ifstream in(manifest_path);
    if (!in) {
        log << "i/o error: cannot read " << manifest_path << "\n";
        return exit_io;
    }
    RunConfig c;
    try {
        const json m = json::parse(in);
        c = parse_config(m.at("config").get<std::string>());
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        log << "manifest error: " << e.what() << "\n";
        return exit_config;
    }
    apply_out_dir(c, out_dir);
    return run(c, log);
}

}  // namespace shearlab
