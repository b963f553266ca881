#include "shearlab/threshold.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace shearlab {

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::transient: return "transient";
        case Stability::unstable: return "unstable";
    }
    return "?";
}

namespace {

double energy(const DiagnosticsRow& r, double nu) {
    const double e = r.omega_neq + r.theta_neq / std::cbrt(nu);
    return e * e;
}

}  // namespace

CellRecord run_cell(const CellSpec& spec, const CellOptions& opt) {
    if (!(spec.nu > 0.0 && spec.nu <= 1.0)) throw std::invalid_argument("run_cell: nu must lie in (0, 1]");
    CellRecord c;
    c.spec = spec;
    const GridPtr grid = make_grid(opt.grid);
    const InitialData d = make_initial_data(grid, spec.seed, spec.amp_omega, spec.amp_theta, opt.m, opt.profile);
    const PhysicsParams phys{spec.nu, spec.nu, false};
    RunControl rc;
    rc.step = opt.step;
    rc.horizon = spec.horizon > 0 ? spec.horizon : 5.0 / std::cbrt(spec.nu);
    rc.output_dt = opt.output_dt;
    c.spec.horizon = rc.horizon;
    c.record.system = "full";
    c.record.nu = spec.nu;
    c.record.eps0 = spec.eps0;
    c.record.delta0 = opt.delta0;
    const SimState s0 = make_state(d.omega, d.theta, SystemTag::full);
    try {
        const SimulationResult r =
            simulate(s0, phys, rc, DiagnosticsOptions{},
                     [&](const SimState&, const DiagnosticsRow& row) { c.record.rows.push_back(row); });
        c.steps = r.steps;
    } catch (const BlowUpError& e) {
        c.diverged = true;
        c.blowup_time = e.time;
    }
    if (!c.record.rows.empty()) {
        const DiagnosticsRow& r0 = c.record.rows.front();
        double sw = 0.0, st = 0.0;
        for (const auto& r : c.record.rows) {
            sw = std::max(sw, r.omega_neq);
            st = std::max(st, r.theta_neq);
        }
        c.amplification_omega = r0.omega_neq > 0 ? sw / r0.omega_neq : 1.0;
        c.amplification_theta = r0.theta_neq > 0 ? st / r0.theta_neq : 1.0;
        c.energy_initial = energy(r0, spec.nu);
        c.energy_final = energy(c.record.rows.back(), spec.nu);
        c.envelopes = theorem_envelopes(c.record, spec.nu, spec.eps0);
    }
    return c;
}

Stability classify(const CellRecord& c, double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("classify: Gamma must exceed 1");
    const double a = c.amplification_omega;
    if (c.diverged || !std::isfinite(a) || a > gamma * gamma) return Stability::unstable;
    // A zero perturbation neither grows nor decays; it counts as stable.
    const bool decays = c.energy_final < c.energy_initial || c.energy_initial == 0.0;
    if (a <= gamma && decays) return Stability::stable;
    return Stability::transient;
}

void run_pool(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
    const std::size_t w = std::min<std::size_t>(std::max(1, workers), std::max<std::size_t>(n, 1));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < w; ++k)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

ScanResult run_scan(const ScanConfig& cfg) {
    if (cfg.nu_list.empty() || cfg.a_list.empty() || cfg.seeds.empty() || cfg.alpha_list.empty() ||
        cfg.beta_list.empty())
        throw std::invalid_argument("run_scan: empty parameter list");
    for (double nu : cfg.nu_list)
        if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("run_scan: nu must lie in (0, 1]");
    if (!(cfg.gamma > 1.0)) throw std::invalid_argument("run_scan: Gamma must exceed 1");
    std::map<double, double> delta0;
    for (double nu : cfg.nu_list)
        if (!delta0.count(nu)) delta0[nu] = make_multiplier_params(nu, cfg.mu).delta0;

    ScanResult res;
    for (double nu : cfg.nu_list)
        for (double al : cfg.alpha_list)
            for (double be : cfg.beta_list)
                for (double a : cfg.a_list)
                    for (std::uint64_t seed : cfg.seeds) {
                        ScanCell c;
                        c.alpha = al;
                        c.beta = be;
                        c.a = a;
                        c.record.spec = CellSpec{nu, a * std::pow(nu, al), a * std::pow(nu, be), seed, a,
                                                 cfg.horizon_factor / std::cbrt(nu)};
                        res.cells.push_back(c);
                    }
    run_pool(res.cells.size(), cfg.workers, [&](std::size_t i) {
        ScanCell& c = res.cells[i];
        CellOptions opt = cfg.cell;
        opt.delta0 = delta0.at(c.record.spec.nu);
        c.record = run_cell(c.record.spec, opt);
        c.stability = classify(c.record, cfg.gamma);
    });

    // Amplification should not drop as a grows with everything else fixed.
    using Key = std::tuple<double, double, double, std::uint64_t>;
    std::map<Key, std::vector<const ScanCell*>> groups;
    for (const auto& c : res.cells) groups[{c.record.spec.nu, c.alpha, c.beta, c.record.spec.seed}].push_back(&c);
    for (auto& [key, v] : groups) {
        std::sort(v.begin(), v.end(), [](const ScanCell* x, const ScanCell* y) { return x->a < y->a; });
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const double lo = v[i]->record.amplification_omega, hi = v[i + 1]->record.amplification_omega;
            if (hi < lo * (1.0 - 1e-3))
                res.monotonicity_flags.push_back(
                    {std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), v[i]->a, v[i + 1]->a, lo, hi});
        }
    }
    return res;
}

std::string scan_csv_header() {
    return "nu,alpha,beta,a,seed,amp_omega,amp_theta,horizon,amplification_omega,amplification_theta,"
           "energy_initial,energy_final,classification,blowup_time,c1,c2,c3,steps";
}

std::string scan_csv_row(const ScanCell& c) {
    const CellRecord& r = c.record;
    char buf[640];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%zu",
                  r.spec.nu, c.alpha, c.beta, c.a, static_cast<unsigned long long>(r.spec.seed), r.spec.amp_omega,
                  r.spec.amp_theta, r.spec.horizon, r.amplification_omega, r.amplification_theta, r.energy_initial,
                  r.energy_final, to_string(c.stability), r.blowup_time, r.envelopes.c1, r.envelopes.c2,
                  r.envelopes.c3, r.steps);
    return buf;
}

double Boundary::estimate() const { return std::sqrt(amp_stable * amp_unstable); }

Boundary locate_boundary(double nu, const StabilityOracle& stable, double amp_lo, double amp_hi, double tol) {
    if (!(amp_lo > 0.0) || !(amp_hi > amp_lo)) throw std::invalid_argument("locate_boundary: need 0 < amp_lo < amp_hi");
    if (!(tol > 0.0)) throw std::invalid_argument("locate_boundary: tol must be > 0");
    Boundary b;
    b.nu = nu;
    b.evaluations = 2;
    if (!stable(nu, amp_lo))
        throw std::runtime_error("no stability boundary in range: lower amplitude already non-stable at nu = " +
                                 std::to_string(nu));
    if (stable(nu, amp_hi))
        throw std::runtime_error("no stability boundary in range: upper amplitude still stable at nu = " +
                                 std::to_string(nu));
    double lo = amp_lo, hi = amp_hi;
    while (hi / lo > 1.0 + tol) {
        const double mid = std::sqrt(lo * hi);
        ++b.evaluations;
        (stable(nu, mid) ? lo : hi) = mid;
    }
    b.amp_stable = lo;
    b.amp_unstable = hi;
    return b;
}

ExponentFit regress_boundaries(const std::vector<Boundary>& bs) {
    if (bs.size() < 3) throw std::invalid_argument("fit_exponents: insufficient data (need at least 3 viscosities)");
    const double n = static_cast<double>(bs.size());
    double sx = 0, sy = 0;
    for (const auto& b : bs) {
        sx += std::log(b.nu);
        sy += std::log(b.estimate());
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& b : bs) {
        const double dx = std::log(b.nu) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(b.estimate()) - my);
    }
    if (!(sxx > 0)) throw std::invalid_argument("fit_exponents: viscosities must differ");
    ExponentFit f;
    f.boundaries = bs;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    double ssr = 0;
    for (const auto& b : bs) {
        const double r = std::log(b.estimate()) - (f.intercept + f.exponent * std::log(b.nu));
        ssr += r * r;
    }
    f.std_error = std::sqrt(ssr / (n - 2.0) / sxx);
    const boost::math::students_t dist(n - 2.0);
    const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    f.ci95_lo = f.exponent - q * f.std_error;
    f.ci95_hi = f.exponent + q * f.std_error;
    return f;
}

ExponentFit fit_exponents(const std::vector<double>& nu_list, const StabilityOracle& stable, double amp_lo,
                          double amp_hi, double tol) {
    if (nu_list.size() < 3) throw std::invalid_argument("fit_exponents: insufficient data (need at least 3 viscosities)");
    std::vector<Boundary> bs;
    for (double nu : nu_list) bs.push_back(locate_boundary(nu, stable, amp_lo, amp_hi, tol));
    return regress_boundaries(bs);
}

}  // namespace shearlab
