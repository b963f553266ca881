#include "doctest.h"

#include "shearlab/diagnostics.hpp"
#include "shearlab/inequality_suite.hpp"
#include "shearlab/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace shearlab;

namespace {

int row_of(const Grid& g, int m) {
    for (int j = 0; j < g.ny(); ++j)
        if (g.eta_index(j) == m) return j;
    return -1;
}

// Real field with a single conjugate pair at (k, m), coefficient c.
SpectralField single_mode(const GridPtr& g, int k, int m, cplx c, double t) {
    SpectralField f(g, t);
    f.at(k, row_of(*g, m)) = c;
    if (k == 0) f.at(0, row_of(*g, -m)) = std::conj(c);
    return f;
}

const MultiplierParams& params_1e2() {
    static const MultiplierParams p = make_multiplier_params(1e-2, 2.0 / 3.0);
    return p;
}

DiagnosticsRow row_at(double t, double e_w, double e_th, double ck_w, double ck_th) {
    DiagnosticsRow r;
    r.t = t;
    r.energy_omega = e_w;
    r.energy_theta = e_th;
    r.ck_omega = ck_w;
    r.ck_theta = ck_th;
    return r;
}

}  // namespace

TEST_CASE("weighted norm: trivial weights and single modes") {
    const GridPtr g = make_grid(32, 64, 4.0);
    const InitialData d = make_initial_data(g, 3, 1.0, 1.0, 0.0);
    CHECK(weighted_norm(d.omega, 0.0, nullptr, XWeight::none) == doctest::Approx(l2_norm(d.omega)).epsilon(1e-14));
    CHECK(weighted_norm(d.omega, 1.0, nullptr, XWeight::none) < weighted_norm(d.omega, 2.0, nullptr, XWeight::none));

    const double t = 0.7;
    const SpectralField f = single_mode(g, 2, 3, cplx(0.3, 0.4), t);
    const double eta = 3 * M_PI / 4.0;
    const double base = 0.5 * std::sqrt(2.0 * g->area());
    CHECK(l2_norm(f) == doctest::Approx(base).epsilon(1e-14));
    CHECK(weighted_norm(f, 2.0, nullptr, XWeight::bracket_dx) ==
          doctest::Approx(base * (1 + 4 + eta * eta) * std::sqrt(5.0)).epsilon(1e-13));
    CHECK(weighted_norm(f, 0.0, nullptr, XWeight::abs_dx_third) == doctest::Approx(base * std::cbrt(2.0)).epsilon(1e-13));

    const MultiplierParams& p = params_1e2();
    const MultiplierPoint mp = evaluate_multiplier(p, t, 2.0, eta - 2.0 * t);
    const MultiplierTable tab(p, g, t);
    CHECK(weighted_norm(f, 1.0, &tab, XWeight::none) ==
          doctest::Approx(base * std::sqrt(mp.M * (1 + 4 + eta * eta))).epsilon(1e-13));
    CHECK(weighted_norm(f, 1.0, p, true, XWeight::none) == doctest::Approx(weighted_norm(f, 1.0, &tab, XWeight::none)));
}

TEST_CASE("multiplier table refuses modes it does not cover") {
    const GridPtr g = make_grid(16, 32, 2.0);
    const MultiplierTable tab(params_1e2(), g, 0.0);
    const SpectralField outside = single_mode(g, 7, 1, 1.0, 0.0);  // beyond the 2/3 mask
    CHECK_THROWS_AS(weighted_norm(outside, 1.0, &tab, XWeight::none), std::logic_error);
    const SpectralField late = single_mode(g, 1, 1, 1.0, 0.5);
    CHECK_THROWS_AS(weighted_norm(late, 1.0, &tab, XWeight::none), std::invalid_argument);
}

TEST_CASE("CK functionals: zero state, single mode, sign") {
    const GridPtr g = make_grid(32, 64, 4.0);
    const MultiplierParams& p = params_1e2();
    const double t = 1.0;
    const MultiplierTable tab(p, g, t);
    const SpectralField z(g, t);

    const CKValues zero = ck_functionals(make_state(z, z, SystemTag::interior), SystemTag::interior, p, tab, 6.0);
    CHECK(zero.ck_omega == 0.0);
    CHECK(zero.ck_theta == 0.0);
    CHECK(zero.energy_omega == 0.0);

    const cplx c(0.2, -0.1);
    const SpectralField w = single_mode(g, 1, 2, c, t);
    const double k = 1.0, eta = 2 * M_PI / 4.0, xi = eta - t * k;
    const MultiplierPoint mp = evaluate_multiplier(p, t, k, xi);
    const double W = g->area() * 2.0 * std::norm(c) * mp.M * std::pow(1 + k * k + eta * eta, 6.0);
    const double terms = p.nu * (k * k + xi * xi) + p.nu13 + k * k / (k * k + xi * xi) + mp.upsilon;
    const CKValues one = ck_functionals(make_state(w, z, SystemTag::interior), SystemTag::interior, p, tab, 6.0);
    CHECK(one.energy_omega == doctest::Approx(W).epsilon(1e-12));
    CHECK(one.ck_omega == doctest::Approx(0.5 * p.delta0 * W * terms).epsilon(1e-12));
    CHECK(one.ck_theta == 0.0);

    // Error system: quarter prefactor, index n, theta weight <dx>^{1/3} with Upsilon.
    const CKValues er = ck_functionals(make_state(z, w, SystemTag::error), SystemTag::error, p, tab, 3.0);
    const double Wt = g->area() * 2.0 * std::norm(c) * mp.M * std::pow(1 + k * k + eta * eta, 3.0) * std::cbrt(2.0);
    CHECK(er.energy_theta == doctest::Approx(Wt).epsilon(1e-12));
    CHECK(er.ck_theta ==
          doctest::Approx(0.25 * p.delta0 * Wt * (p.nu * (k * k + xi * xi) + p.nu13 + mp.upsilon)).epsilon(1e-12));

    // Interior theta energy ignores the zero mode.
    const SpectralField th0 = single_mode(g, 0, 3, cplx(1.0, 0.5), t);
    const CKValues i0 = ck_functionals(make_state(z, th0, SystemTag::interior), SystemTag::interior, p, tab, 6.0);
    CHECK(i0.energy_theta == 0.0);
    CHECK(i0.ck_theta == 0.0);

    const InitialData d = make_initial_data(g, 17, 1.0, 1.0, 0.0);
    SimState s = make_state(d.omega, d.theta, SystemTag::error);
    s.t = t;
    s.omega.set_frame_time(t);
    s.theta.set_frame_time(t);
    const CKValues r = ck_functionals(s, SystemTag::error, p, tab, 3.0);
    for (double x : r.omega_terms) CHECK(x >= 0.0);
    for (double x : r.theta_terms) CHECK(x >= 0.0);
    CHECK(r.ck_omega > 0.0);
    CHECK_THROWS_AS(ck_functionals(s, SystemTag::full, p, tab, 3.0), std::invalid_argument);
}

TEST_CASE("theorem envelopes") {
    DiagnosticsRecord rec;
    rec.nu = 1e-3;
    rec.delta0 = 0.01;
    CHECK_THROWS_AS(theorem_envelopes(rec, 1e-3, 0.05), std::invalid_argument);
    rec.rows.push_back({});
    rec.rows.push_back({});
    rec.rows.back().t = 10;
    const Envelopes zero = theorem_envelopes(rec, 1e-3, 0.05);
    CHECK(zero.c1 == 0.0);
    CHECK(zero.c2 == 0.0);
    CHECK(zero.c3 == 0.0);

    DiagnosticsRow& r = rec.rows.back();
    r.omega0 = 2e-3;
    r.theta0 = 1e-4;
    r.u1_neq = 1e-4;
    r.u2 = 1e-6;
    r.omega_neq = 3e-3;
    r.theta_neq = 2e-4;
    const double s = 0.05 * 0.1, gr = std::exp(0.01 * 0.1 * 10);
    const Envelopes e = theorem_envelopes(rec, 1e-3, 0.05);
    CHECK(e.c1 == doctest::Approx((2e-3 + 1e-3) / s));
    CHECK(e.c2 == doctest::Approx((1e-4 + 11 * 1e-6) * 11 * gr / s));
    CHECK(e.c3 == doctest::Approx((3e-3 + 2e-3) * gr / s));
}

TEST_CASE("decay-rate fit") {
    std::vector<double> t, a, b, c;
    for (int i = 0; i <= 500; ++i) {
        const double x = 0.1 * i;
        t.push_back(x);
        a.push_back(2.0 * std::exp(-3.0 * x));
        b.push_back((2.0 + std::sin(x)) * std::exp(-x));
        c.push_back(5.0);
    }
    const FitResult fa = fit_decay_rate(t, a, 0.0, 50.0);
    CHECK(fa.rate == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fa.prefactor == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fa.r_squared == doctest::Approx(1.0));
    CHECK(fa.points == 501);
    CHECK(fit_decay_rate(t, b, 0.0, 50.0).rate == doctest::Approx(1.0).epsilon(0.1));
    CHECK(fit_decay_rate(t, c, 0.0, 50.0).rate == doctest::Approx(0.0).scale(1.0));
    std::vector<double> bad = a;
    bad[10] = 0.0;
    CHECK_THROWS_AS(fit_decay_rate(t, bad, 0.0, 50.0), std::invalid_argument);
    CHECK_NOTHROW(fit_decay_rate(t, bad, 2.0, 50.0));
    CHECK_THROWS_AS(fit_decay_rate(t, a, 0.0, 0.05), std::invalid_argument);
}

TEST_CASE("last e-foldings window") {
    std::vector<double> t, v;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.1 * i);
        v.push_back(i <= 80 ? std::exp(-0.1 * i) : 0.0);
    }
    const auto [lo, hi] = last_efoldings_window(t, v, 3.0);
    CHECK(hi == doctest::Approx(8.0));
    CHECK(lo == doctest::Approx(5.0));
    CHECK_THROWS_AS(last_efoldings_window({0.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("inviscid damping ratios") {
    const GridPtr g = make_grid(32, 64, 4.0);
    const double t = 2.5;
    const double k = 1.0, eta = 3 * M_PI / 4.0, xi = eta - t * k;
    const SpectralField w = single_mode(g, 1, 3, cplx(0.4, 0.1), t);
    const DampingRatios d = inviscid_damping_ratios(w, 2.0, 1.0);
    REQUIRE_FALSE(d.degenerate);
    const double lam2 = 1 + k * k + eta * eta, d2 = k * k + xi * xi;
    CHECK(d.r1 == doctest::Approx((1 + t) * std::abs(xi) / d2 / lam2).epsilon(1e-13));
    CHECK(d.r2 == doctest::Approx((1 + t) * (1 + t) * k / d2 / lam2).epsilon(1e-13));

    const DampingRatios z = inviscid_damping_ratios(single_mode(g, 0, 2, 1.0, t), 2.0, 1.0);
    CHECK(z.degenerate);
}

TEST_CASE("toy growth product") {
    CHECK(toy_growth_product(1.0) == doctest::Approx(std::exp(M_PI)).epsilon(1e-12));
    CHECK(toy_growth_product(3.99) == toy_growth_product(1.0));
    CHECK(toy_growth_product(4.0) == doctest::Approx(std::exp(M_PI * (1.0 + std::pow(2.0, -5.0 / 3.0)))).epsilon(1e-13));
    double prev = 0;
    for (double e : {1.0, 1e2, 1e4, 1e8, 1e12}) {
        const double v = toy_growth_product(e);
        CHECK(v >= prev);
        CHECK(v <= std::exp(3 * M_PI));
        prev = v;
    }
    CHECK_THROWS_AS(toy_growth_product(0.5), std::invalid_argument);
}

TEST_CASE("forcing norm of cos x against sin y") {
    const GridPtr g = make_grid(32, 64, M_PI);
    // omega = cos x gives u2 = sin x; theta = sin y, so u . grad theta = sin x cos y.
    const SpectralField w = single_mode(g, 1, 0, 0.5, 0.0);
    SpectralField th(g, 0.0);
    th.at(0, row_of(*g, 1)) = cplx(0, -0.5);
    th.at(0, row_of(*g, -1)) = cplx(0, 0.5);
    const SimState s = make_state(w, th, SystemTag::interior);
    for (double n : {0.0, 3.0})
        CHECK(forcing_norm(s, n) == doctest::Approx(std::sqrt(2.0) * std::pow(3.0, n / 2) * M_PI).epsilon(1e-12));
    CHECK(forcing_norm(make_state(w, SpectralField(g, 0.0), SystemTag::interior), 3.0) == 0.0);
}

TEST_CASE("wrap fraction") {
    const GridPtr g = make_grid(16, 64, 4.0);
    CHECK(wrap_fraction(SpectralField(g, 0.0)) == 0.0);
    const double f = wrap_fraction(single_mode(g, 1, 0, 1.0, 0.0), 0.9);
    int outer = 0;
    for (int j = 0; j < g->ny(); ++j) outer += std::abs(g->y(j)) > 0.9 * g->ly();
    CHECK(f == doctest::Approx(outer / double(g->ny())).epsilon(1e-12));
    const InitialData d = make_initial_data(g, 1, 1.0, 0.0, 0.0, {0.5, 2, 1});
    CHECK(wrap_fraction(d.omega) < 1e-8);
}

TEST_CASE("L1 suite on a single mode and transport with v = 0") {
    const GridPtr g = make_grid(32, 64, 4.0);
    const double t = 3.0;
    const cplx c(0.3, -0.4);
    const SpectralField f = single_mode(g, 1, 0, c, t);
    const SpectralField z(g, t);
    const LemmaSample s = evaluate_lemma(LemmaSuite::l1, z, f, z, params_1e2(), nullptr, 3.0, 4.0);
    CHECK(s.lhs == doctest::Approx(2 * std::abs(c)).epsilon(1e-15));
    const double rhs = std::sqrt(2 * g->area()) * std::abs(c) * std::sqrt(1 + t * t) * std::sqrt(2.0) / (1 + t);
    CHECK(s.rhs == doctest::Approx(rhs).epsilon(1e-13));
    CHECK(s.ratio == doctest::Approx(s.lhs / s.rhs));

    const LemmaSample tr = evaluate_lemma(LemmaSuite::transport, z, f, z, params_1e2(), nullptr, 3.0, 4.0);
    CHECK(tr.lhs == 0.0);
    CHECK(tr.ratio == 0.0);
    CHECK_THROWS_AS(evaluate_lemma(LemmaSuite::reaction, z, f, z, params_1e2(), nullptr, 3.0, 4.0),
                    std::invalid_argument);
}

TEST_CASE("transport suite: u . grad omega is orthogonal to omega") {
    const GridPtr g = make_grid(64, 128, 8.0);
    const InitialData d = make_initial_data(g, 5, 1.0, 0.0, 0.0, {2.0, 2, 2});
    const LemmaSample s = evaluate_lemma(LemmaSuite::transport, d.omega, d.omega, d.omega, params_1e2(), nullptr, 0.0, 0.0);
    CHECK(s.lhs < 1e-10 * s.rhs);
}

TEST_CASE("smallest K from a synthetic record") {
    DiagnosticsRecord rec;
    rec.nu = 1e-3;
    const double w = std::pow(1e-3, -2.0 / 3.0);
    // Energies constant, so A = mean ck_omega and B = w mean ck_theta per interval.
    // (4,5): A = 1, B = -2 -> K >= 0.5. (5,6): A = 3, B = -1 -> K >= 3. (6,7): A = -4, B = 1 -> K <= 4.
    rec.rows = {row_at(1.0, 0, 0, 100, 0),  // before nu^{-1/6}: skipped
                row_at(4.0, 0, 0, 1, -2 / w), row_at(5.0, 0, 0, 1, -2 / w), row_at(6.0, 0, 0, 5, 0),
                row_at(7.0, 0, 0, -13, 2 / w)};
    const KReport k = smallest_K(rec);
    CHECK(k.intervals == 3);
    CHECK(k.feasible);
    CHECK(k.k_min == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(k.k_max == doctest::Approx(4.0).epsilon(1e-12));
    rec.rows.back().ck_omega = 40;
    CHECK_FALSE(smallest_K(rec).feasible);
}

TEST_CASE("diagnostics rows and CSV") {
    const GridPtr g = make_grid(32, 64, 4.0);
    const InitialData d = make_initial_data(g, 2, 1e-3, 1e-4, 4);
    DiagnosticsOptions opt;
    const DiagnosticsRow full = compute_row(make_state(d.omega, d.theta, SystemTag::full), 1e-2, opt);
    CHECK(full.omega_neq > 0);
    CHECK(std::isnan(full.ck_omega));
    CHECK(std::isnan(full.forcing));
    CHECK_FALSE(full.long_time);
    opt.params = &params_1e2();
    opt.weighted = true;
    opt.forcing = true;
    const DiagnosticsRow in = compute_row(make_state(d.omega, d.theta, SystemTag::interior), 1e-2, opt);
    CHECK(in.ck_omega > 0);
    CHECK(std::isfinite(in.forcing));
    auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(csv_header()) == count(csv_row(in)));
    opt.params = nullptr;
    CHECK_THROWS_AS(compute_row(make_state(d.omega, d.theta, SystemTag::interior), 1e-2, opt), std::invalid_argument);
}
