#include "shearlab/diagnostics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace shearlab {

MultiplierTable::MultiplierTable(const MultiplierParams& p, const GridPtr& grid, double t, bool retained_only,
                                 Exec exec)
    : grid_(grid), t_(t), M_(grid->n_modes(), 0.0), U_(grid->n_modes(), 0.0), have_(grid->n_modes(), 0) {
    const Grid& g = *grid;
    kernels::for_each_index(g.ny(), exec, [&](std::ptrdiff_t jj) {
        const int j = static_cast<int>(jj);
        for (int ik = 0; ik < g.nkx(); ++ik) {
            if (retained_only && !g.retained(ik, j)) continue;
            const double k = g.kx(ik);
            const MultiplierPoint mp = evaluate_multiplier(p, t, k, g.eta(j) - t * k);
            const std::size_t idx = g.index(ik, j);
            M_[idx] = mp.M;
            U_[idx] = mp.upsilon;
            have_[idx] = 1;
        }
    });
}

double x_weight(XWeight w, double k) {
    switch (w) {
        case XWeight::none: return 1.0;
        case XWeight::abs_dx_third: return std::cbrt(std::abs(k));
        case XWeight::bracket_dx: return std::sqrt(1.0 + k * k);
        case XWeight::bracket_dx_third: return std::pow(1.0 + k * k, 1.0 / 6.0);
        case XWeight::dx: return std::abs(k);
    }
    return 1.0;
}

namespace {

// Sum over modes of mult(k) * w(idx, k, eta, xi) * |c|^2, times Area.
template <class W>
double mode_sum(const SpectralField& f, W&& w) {
    const Grid& g = f.grid();
    const double t = f.frame_time();
    const auto& c = f.coeffs();
    const double s = kernels::ordered_sum(g.ny(), default_exec(), [&](std::ptrdiff_t jj) {
        const int j = static_cast<int>(jj);
        const double eta = g.eta(j);
        double acc = 0.0;
        for (int ik = 0; ik < g.nkx(); ++ik) {
            const std::size_t idx = g.index(ik, j);
            const double a2 = std::norm(c[idx]);
            if (a2 == 0.0) continue;
            const double k = g.kx(ik);
            acc += g.multiplicity(ik) * w(idx, k, eta, eta - t * k) * a2;
        }
        return acc;
    });
    return g.area() * s;
}

void require_table(const MultiplierTable& tab, const SpectralField& f) {
    if (!tab.grid().same_as(f.grid())) throw std::invalid_argument("multiplier table built on another grid");
    if (tab.t() != f.frame_time()) throw std::invalid_argument("multiplier table built at another time");
    const auto& c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!tab.has(i) && c[i] != cplx(0.0, 0.0))
            throw std::logic_error("multiplier table lacks a mode the field occupies");
}

double lam2(double k, double eta) { return 1.0 + k * k + eta * eta; }

}  // namespace

double weighted_norm(const SpectralField& f, double m, const MultiplierTable* table, XWeight extra) {
    const double h = 0.5 * m;
    if (!table)
        return weighted_l2(f, [&](double k, double eta, double) { return std::pow(lam2(k, eta), h) * x_weight(extra, k); });
    require_table(*table, f);
    return std::sqrt(mode_sum(f, [&](std::size_t idx, double k, double eta, double) {
        const double x = x_weight(extra, k);
        return table->M(idx) * std::pow(lam2(k, eta), m) * x * x;
    }));
}

double weighted_norm(const SpectralField& f, double m, const MultiplierParams& p, bool with_M, XWeight extra) {
    if (!with_M) return weighted_norm(f, m, nullptr, extra);
    const MultiplierTable tab(p, f.grid_ptr(), f.frame_time(), false);
    return weighted_norm(f, m, &tab, extra);
}

CKValues ck_functionals(const SimState& state, SystemTag which, const MultiplierParams& p,
                        const MultiplierTable& table, double index, double m1) {
    if (which == SystemTag::full) throw std::invalid_argument("ck_functionals: interior or error system expected");
    require_table(table, state.omega);
    require_table(table, state.theta);
    const bool interior = which == SystemTag::interior;
    const double pref = interior ? 0.5 * p.delta0 : 0.25 * p.delta0;
    const double nu = p.nu, nu13 = p.nu13;
    CKValues ck;
    // Each term: sum of a per-mode symbol times W = M Lambda^{2s} X^2 |f|^2.
    auto term = [&](const SpectralField& f, bool theta, auto&& sym) {
        return mode_sum(f, [&](std::size_t idx, double k, double eta, double xi) {
            double x2 = 1.0;
            if (theta) x2 = interior ? std::pow(1.0 + k * k, m1) : std::pow(1.0 + k * k, 1.0 / 3.0);
            return sym(idx, k, xi) * table.M(idx) * std::pow(lam2(k, eta), index) * x2;
        });
    };
    auto one = [](std::size_t, double, double) { return 1.0; };
    auto diss = [&](std::size_t, double k, double xi) { return nu * (k * k + xi * xi); };
    auto enh = [&](std::size_t, double k, double) { return nu13 * std::pow(std::abs(k), 2.0 / 3.0); };
    auto damp = [](std::size_t, double k, double xi) {
        const double d = k * k + xi * xi;
        return (k != 0.0 && d > 0) ? k * k / d : 0.0;
    };
    auto ups = [&](std::size_t idx, double, double) { return table.upsilon(idx); };

    const SpectralField theta_e = interior ? nonzero_modes(state.theta) : state.theta;
    ck.energy_omega = term(state.omega, false, one);
    ck.energy_theta = term(theta_e, true, one);
    ck.omega_terms[0] = term(state.omega, false, diss);
    ck.omega_terms[1] = term(state.omega, false, enh);
    ck.omega_terms[2] = term(state.omega, false, damp);
    ck.omega_terms[3] = term(state.omega, false, ups);
    ck.theta_terms[0] = term(theta_e, true, diss);
    ck.theta_terms[1] = term(theta_e, true, enh);
    ck.theta_terms[2] = interior ? 0.0 : term(theta_e, true, ups);
    ck.ck_omega = pref * (ck.omega_terms[0] + ck.omega_terms[1] + ck.omega_terms[2] + ck.omega_terms[3]);
    ck.ck_theta = pref * (ck.theta_terms[0] + ck.theta_terms[1] + ck.theta_terms[2]);
    return ck;
}

DampingRatios inviscid_damping_ratios(const SpectralField& omega_neq, double b, double b1) {
    const double t = omega_neq.frame_time();
    const SpectralField w = nonzero_modes(omega_neq);
    const Velocity v = velocity_from_vorticity(w);
    const double den = weighted_norm(w, b + b1, nullptr, XWeight::none);
    DampingRatios r;
    if (!(den > 0.0)) {
        r.degenerate = true;
        return r;
    }
    r.r1 = (1.0 + t) * weighted_norm(v.u1, b1, nullptr, XWeight::none) / den;
    r.r2 = (1.0 + t) * (1.0 + t) * weighted_norm(v.u2, b1, nullptr, XWeight::none) / den;
    return r;
}

double toy_growth_product(double eta) {
    if (!(eta >= 1.0)) throw std::invalid_argument("toy_growth_product: eta must be >= 1");
    long n = static_cast<long>(std::floor(std::sqrt(eta)));
    while (static_cast<double>(n + 1) * (n + 1) <= eta) ++n;
    while (static_cast<double>(n) * n > eta) --n;
    // Sum smallest terms first.
    double s = 0.0;
    for (long k = n; k >= 1; --k) s += std::pow(static_cast<double>(k), -5.0 / 3.0);
    return std::exp(3.14159265358979323846 * s);
}

double forcing_norm(const SimState& interior, double n) {
    const SpectralField wneq = nonzero_modes(interior.omega);
    const Velocity v = velocity_from_vorticity(wneq);
    SpectralField th = interior.theta;
    th.set_frame_time(interior.omega.frame_time());
    const SpectralField prod = nonlinear_advection(v, th);
    return weighted_norm(prod, n, nullptr, XWeight::bracket_dx);
}

double wrap_fraction(const SpectralField& f, double frac) {
    const PhysicalField p = transform_to_physical(f);
    const Grid& g = f.grid();
    double outer = 0.0, total = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        const bool out = std::abs(g.y(j)) > frac * g.ly();
        double row = 0.0;
        for (int i = 0; i < g.nx(); ++i) {
            const double v = p.v[static_cast<std::size_t>(j) * g.nx() + i];
            row += v * v;
        }
        total += row;
        if (out) outer += row;
    }
    return total > 0 ? outer / total : 0.0;
}

DiagnosticsRow compute_row(const SimState& s, double nu, const DiagnosticsOptions& opt) {
    DiagnosticsRow r;
    r.t = s.t;
    r.long_time = s.t > std::pow(nu, -1.0 / 6.0);
    const SpectralField w0 = zero_mode(s.omega), wn = nonzero_modes(s.omega);
    r.omega0 = l2_norm(w0);
    r.omega_neq = l2_norm(wn);
    r.theta0 = l2_norm(zero_mode(s.theta));
    r.theta_neq = l2_norm(nonzero_modes(s.theta));
    const Velocity vn = velocity_from_vorticity(wn);
    r.u1_neq = l2_norm(vn.u1);
    r.u2 = l2_norm(vn.u2);
    const DampingRatios d = inviscid_damping_ratios(wn, opt.b, opt.b1);
    if (!d.degenerate) {
        r.r1 = d.r1;
        r.r2 = d.r2;
    }
    r.wrap_fraction = wrap_fraction(s.omega);
    if (opt.weighted && s.tag != SystemTag::full) {
        if (!opt.params) throw std::invalid_argument("compute_row: weighted diagnostics need multiplier params");
        const MultiplierTable tab(*opt.params, s.omega.grid_ptr(), s.t, true);
        const double idx = s.tag == SystemTag::interior ? opt.m : opt.n;
        const CKValues ck = ck_functionals(s, s.tag, *opt.params, tab, idx, opt.m1);
        r.energy_omega = ck.energy_omega;
        r.energy_theta = ck.energy_theta;
        r.ck_omega = ck.ck_omega;
        r.ck_theta = ck.ck_theta;
    } else if (opt.weighted && opt.params) {
        const MultiplierTable tab(*opt.params, s.omega.grid_ptr(), s.t, true);
        const double e = weighted_norm(s.omega, opt.m, &tab, XWeight::none);
        const double th = weighted_norm(nonzero_modes(s.theta), opt.m, &tab, XWeight::bracket_dx);
        r.energy_omega = e * e;
        r.energy_theta = th * th;
    }
    if (opt.forcing && s.tag == SystemTag::interior) r.forcing = forcing_norm(s, opt.n);
    return r;
}

std::string csv_header() {
    return "t,regime,omega0,theta0,omega_neq,theta_neq,u1_neq,u2,energy_omega,energy_theta,ck_omega,ck_theta,"
           "forcing,r1,r2,wrap_fraction";
}

std::string csv_row(const DiagnosticsRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                  r.t, r.long_time ? "long" : "short", r.omega0, r.theta0, r.omega_neq, r.theta_neq, r.u1_neq, r.u2,
                  r.energy_omega, r.energy_theta, r.ck_omega, r.ck_theta, r.forcing, r.r1, r.r2, r.wrap_fraction);
    return buf;
}

Envelopes theorem_envelopes(const DiagnosticsRecord& rec, double nu, double eps0) {
    if (rec.rows.empty()) throw std::invalid_argument("theorem_envelopes: empty record");
    Envelopes e;
    const double nu13 = std::cbrt(nu);
    const double scale = eps0 * nu13;
    if (!(scale > 0.0)) return e;
    for (const auto& r : rec.rows) {
        const double g = std::exp(rec.delta0 * nu13 * r.t);
        e.c1 = std::max(e.c1, (r.omega0 + r.theta0 / nu13) / scale);
        e.c2 = std::max(e.c2, (r.u1_neq + (1.0 + r.t) * r.u2) * (1.0 + r.t) * g / scale);
        e.c3 = std::max(e.c3, (r.omega_neq + r.theta_neq / nu13) * g / scale);
    }
    return e;
}

FitResult fit_decay_rate(const std::vector<double>& t, const std::vector<double>& v, double t_lo, double t_hi) {
    if (t.size() != v.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        if (!(v[i] > 0.0)) throw std::invalid_argument("fit_decay_rate: non-positive value in window");
        const double x = t[i], y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("fit_decay_rate: fewer than two points in window");
    const double dn = static_cast<double>(n);
    const double vx = sxx - sx * sx / dn, vy = syy - sy * sy / dn, cxy = sxy - sx * sy / dn;
    if (!(vx > 0)) throw std::invalid_argument("fit_decay_rate: degenerate window");
    const double slope = cxy / vx;
    FitResult f;
    f.rate = -slope;
    f.prefactor = std::exp((sy - slope * sx) / dn);
    f.r_squared = vy > 1e-300 * dn ? std::clamp(cxy * cxy / (vx * vy), 0.0, 1.0) : 1.0;
    f.t_lo = t_lo;
    f.t_hi = t_hi;
    f.points = n;
    return f;
}

std::pair<double, double> last_efoldings_window(const std::vector<double>& t, const std::vector<double>& v,
                                                double efoldings, double floor) {
    std::ptrdiff_t end = -1;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(v.size()) - 1; i >= 0; --i)
        if (v[i] > floor && std::isfinite(v[i])) {
            end = i;
            break;
        }
    if (end < 1) throw std::invalid_argument("last_efoldings_window: no positive tail");
    const double target = v[end] * std::exp(efoldings);
    std::ptrdiff_t start = end;
    while (start > 0 && v[start - 1] <= target && v[start - 1] > floor) --start;
    if (start > 0 && start == end) --start;
    return {t[start], t[end]};
}

KReport smallest_K(const DiagnosticsRecord& rec) {
    KReport k;
    k.k_max = std::numeric_limits<double>::infinity();
    const double w = std::pow(rec.nu, -2.0 / 3.0);
    const double t0 = std::pow(rec.nu, -1.0 / 6.0);
    for (std::size_t i = 0; i + 1 < rec.rows.size(); ++i) {
        const auto& a = rec.rows[i];
        const auto& b = rec.rows[i + 1];
        if (a.t < t0) continue;
        if (!std::isfinite(a.energy_omega) || !std::isfinite(b.energy_omega) || !std::isfinite(a.ck_omega) ||
            !std::isfinite(b.ck_omega))
            continue;
        const double dt = b.t - a.t;
        const double A = (b.energy_omega - a.energy_omega) / dt + 0.5 * (a.ck_omega + b.ck_omega);
        const double B = w * ((b.energy_theta - a.energy_theta) / dt + 0.5 * (a.ck_theta + b.ck_theta));
        ++k.intervals;
        if (B < 0) {
            k.k_min = std::max(k.k_min, A / -B);
        } else if (B > 0) {
            k.k_max = std::min(k.k_max, -A / B);
        } else if (A > 0) {
            k.feasible = false;
        }
    }
    if (k.k_min > k.k_max) k.feasible = false;
    return k;
}

}  // namespace shearlab
