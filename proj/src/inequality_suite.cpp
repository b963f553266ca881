#include "shearlab/inequality_suite.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace shearlab {

const char* to_string(LemmaSuite s) {
    switch (s) {
        case LemmaSuite::transport: return "transport";
        case LemmaSuite::reaction: return "reaction";
        case LemmaSuite::zero_mode_commutator: return "zero_mode_commutator";
        case LemmaSuite::nonzero_commutator: return "nonzero_commutator";
        case LemmaSuite::l1: return "l1";
    }
    return "?";
}

std::vector<LemmaSuite> all_lemma_suites() {
    return {LemmaSuite::transport, LemmaSuite::reaction, LemmaSuite::zero_mode_commutator,
            LemmaSuite::nonzero_commutator, LemmaSuite::l1};
}

namespace {

double lam(double k, double eta) { return std::sqrt(1.0 + k * k + eta * eta); }

SpectralField lambda_b(const SpectralField& f, double b) {
    return apply_real_symbol(f, [b](double k, double eta, double) { return std::pow(lam(k, eta), b); });
}

// sqrt(M) Lambda^b X(k) f.
SpectralField weigh(const SpectralField& f, const MultiplierTable& tab, double b, XWeight x = XWeight::none) {
    if (!tab.grid().same_as(f.grid()) || tab.t() != f.frame_time())
        throw std::invalid_argument("inequality suite: table does not match field");
    SpectralField out(f.grid_ptr(), f.frame_time());
    const Grid& g = f.grid();
    const auto& in = f.coeffs();
    auto& o = out.coeffs();
    for (int j = 0; j < g.ny(); ++j)
        for (int ik = 0; ik < g.nkx(); ++ik) {
            const std::size_t idx = g.index(ik, j);
            if (in[idx] == cplx(0.0, 0.0)) continue;
            if (!tab.has(idx)) throw std::logic_error("inequality suite: field outside the multiplier table");
            const double k = g.kx(ik);
            o[idx] = in[idx] * (std::sqrt(tab.M(idx)) * std::pow(lam(k, g.eta(j)), b) * x_weight(x, k));
        }
    return out;
}

SpectralField dx(const SpectralField& f) {
    return apply_imag_symbol(f, [](double k, double, double) { return k; });
}
SpectralField dy(const SpectralField& f) {
    return apply_imag_symbol(f, [](double, double, double xi) { return xi; });
}

double grad_norm(const SpectralField& f) {
    return weighted_l2(f, [](double k, double, double xi) { return std::sqrt(k * k + xi * xi); });
}

double upsilon_norm(const SpectralField& wf, const MultiplierTable& tab) {
    // wf already carries sqrt(M) Lambda^b.
    SpectralField s = wf;
    for (std::size_t i = 0; i < s.coeffs().size(); ++i)
        if (tab.has(i)) s.coeffs()[i] *= std::sqrt(tab.upsilon(i));
    return l2_norm(s);
}

SpectralField commutator(const SpectralField& v, const SpectralField& f, const MultiplierTable& tab, double b) {
    return weigh(dealiased_product(v, dx(f)), tab, b) - dealiased_product(v, dx(weigh(f, tab, b)));
}

LemmaSample finish(double t, double lhs, double rhs) {
    LemmaSample s;
    s.t = t;
    s.lhs = std::abs(lhs);
    s.rhs = rhs;
    if (rhs > 0)
        s.ratio = s.lhs / rhs;
    else
        s.ratio = s.lhs == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return s;
}

}  // namespace

LemmaSample evaluate_lemma(LemmaSuite s, const SpectralField& w, const SpectralField& f, const SpectralField& g,
                           const MultiplierParams& p, const MultiplierTable* table, double b, double d) {
    require_same_grid(w, f);
    require_same_grid(w, g);
    const double t = w.frame_time();
    if (f.frame_time() != t || g.frame_time() != t) throw std::invalid_argument("evaluate_lemma: frame time mismatch");
    const bool needs_table = s != LemmaSuite::transport && s != LemmaSuite::l1;
    if (needs_table && !table) throw std::invalid_argument("evaluate_lemma: multiplier table required");
    const Velocity v = velocity_from_vorticity(w);
    switch (s) {
        case LemmaSuite::transport: {
            const double lhs = inner(lambda_b(nonlinear_advection(v, f), d), lambda_b(f, d));
            const double fd = l2_norm(lambda_b(f, d)), fb = l2_norm(lambda_b(f, b));
            const double rhs = (1.0 + t) * (l2_norm(lambda_b(w, b)) * fd * fd + l2_norm(lambda_b(w, d)) * fd * fb);
            return finish(t, lhs, rhs);
        }
        case LemmaSuite::reaction: {
            const SpectralField wg = weigh(g, *table, b);
            const double lhs = inner(weigh(dealiased_product(v.u2, dy(f)), *table, b), wg);
            const double rhs = grad_norm(weigh(v.u2, *table, b)) *
                               (l2_norm(weigh(f, *table, b)) * upsilon_norm(wg, *table) / p.nu13 +
                                std::sqrt(p.nu13) * l2_norm(dy(lambda_b(f, b))) * l2_norm(wg));
            return finish(t, lhs, rhs);
        }
        case LemmaSuite::zero_mode_commutator: {
            const double lhs = inner(commutator(zero_mode(v.u1), f, *table, b), weigh(g, *table, b));
            const double rhs = l2_norm(lambda_b(w, b)) * l2_norm(weigh(f, *table, b, XWeight::abs_dx_third)) *
                               l2_norm(weigh(g, *table, b, XWeight::abs_dx_third));
            return finish(t, lhs, rhs);
        }
        case LemmaSuite::nonzero_commutator: {
            const double lhs = inner(commutator(nonzero_modes(v.u1), f, *table, b), weigh(f, *table, b));
            const double fx = l2_norm(weigh(f, *table, b, XWeight::abs_dx_third));
            const double rhs = l2_norm(weigh(w, *table, b)) *
                               (fx * fx + p.nu13 * p.nu13 * l2_norm(dy(lambda_b(f, b))) * fx);
            return finish(t, lhs, rhs);
        }
        case LemmaSuite::l1: {
            const SpectralField fn = nonzero_modes(f);
            const Grid& gr = fn.grid();
            double l1 = 0.0;
            for (int j = 0; j < gr.ny(); ++j)
                for (int ik = 0; ik < gr.nkx(); ++ik) l1 += gr.multiplicity(ik) * std::abs(fn.at(ik, j));
            const double rhs = weighted_l2(fn, [](double k, double eta, double xi) {
                                   return std::sqrt(k * k + xi * xi) * lam(k, eta);
                               }) / (1.0 + t);
            return finish(t, l1, rhs);
        }
    }
    throw std::logic_error("evaluate_lemma: unknown suite");
}

SuiteReport run_inequality_suite(LemmaSuite s, const EnsembleConfig& cfg, const MultiplierParams& p) {
    if (cfg.members < 1) throw std::invalid_argument("run_inequality_suite: members must be >= 1");
    if (!(cfg.b > 2.0) || cfg.d < cfg.b) throw std::invalid_argument("run_inequality_suite: need d >= b > 2");
    const GridPtr grid = make_grid(cfg.nx, cfg.ny, cfg.half_length_y, 2.0 / 3.0);
    const bool long_time = s == LemmaSuite::reaction || s == LemmaSuite::nonzero_commutator;
    const double t0 = long_time ? std::pow(cfg.nu, -1.0 / 6.0) : 0.0;
    const bool needs_table = s != LemmaSuite::transport && s != LemmaSuite::l1;
    SuiteReport rep;
    rep.suite = s;
    double sum = 0.0;
    for (int i = 0; i < cfg.members; ++i) {
        const double t = t0 + cfg.t_span * (i + 0.5) / cfg.members;
        const auto seed = cfg.seed + 2 * static_cast<std::uint64_t>(i);
        InitialData a = make_initial_data(grid, seed, 1.0, 1.0, 0.0, cfg.profile);
        InitialData c = make_initial_data(grid, seed + 1, 1.0, 1.0, 0.0, cfg.profile);
        a.omega.set_frame_time(t);
        a.theta.set_frame_time(t);
        c.omega.set_frame_time(t);
        std::unique_ptr<MultiplierTable> tab;
        if (needs_table) tab = std::make_unique<MultiplierTable>(p, grid, t, true);
        const LemmaSample smp = evaluate_lemma(s, a.omega, a.theta, c.omega, p, tab.get(), cfg.b, cfg.d);
        rep.samples.push_back(smp);
        if (!std::isfinite(smp.ratio)) rep.finite = false;
        rep.max_ratio = std::max(rep.max_ratio, smp.ratio);
        sum += smp.ratio;
    }
    rep.mean_ratio = sum / cfg.members;
    return rep;
}

std::vector<SuiteReport> run_inequality_suites(const EnsembleConfig& cfg, const MultiplierParams& p) {
    std::vector<SuiteReport> out;
    for (LemmaSuite s : all_lemma_suites()) out.push_back(run_inequality_suite(s, cfg, p));
    return out;
}

}  // namespace shearlab
