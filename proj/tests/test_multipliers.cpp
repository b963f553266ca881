#include "doctest.h"

#include "shearlab/multiplier_checks.hpp"
#include "shearlab/multipliers.hpp"
#include "shearlab/phi.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>

using namespace shearlab;

namespace {

// Direct partial sums of the l-series written from the definitions, with
// four-level Richardson extrapolation in N.
struct Oracle {
    double mu, t, k, xi;
    double term_m3(long l) const {
        const double L = static_cast<double>(std::abs(l));
        const double s = l > 0 ? 1.0 : -1.0;
        return std::pow(L, mu - 2.0) *
               (s * std::atan((xi + t * (k - l)) / (1.0 + std::abs(k - l) + L)) + M_PI / 2);
    }
    double term_ups(long l) const {
        const double L = static_cast<double>(std::abs(l));
        const double a = 1.0 + std::abs(k - l) + L, z = xi + t * (k - l);
        return std::pow(L, mu - 1.0) * a / (a * a + z * z);
    }
    template <class F>
    double richardson(F&& term, double p) const {
        // s_N = S - sum_j A_j N^{p-j}, j = 0..2, on N = N0, 2N0, 4N0, 8N0.
        constexpr int L = 4;
        const long N0 = 40000;
        double A[L][L + 1];
        double s = 0;
        long done = 0;
        for (int i = 0; i < L; ++i) {
            const long N = N0 << i;
            for (long l = N; l > done; --l) s += term(l) + term(-l);
            done = N;
            A[i][0] = 1.0;
            for (int j = 1; j < L; ++j) A[i][j] = -std::pow(static_cast<double>(N), p - (j - 1));
            A[i][L] = s;
        }
        for (int c = 0; c < L; ++c)
            for (int r = c + 1; r < L; ++r) {
                const double f = A[r][c] / A[c][c];
                for (int j = c; j <= L; ++j) A[r][j] -= f * A[c][j];
            }
        double x[L];
        for (int r = L - 1; r >= 0; --r) {
            double v = A[r][L];
            for (int j = r + 1; j < L; ++j) v -= A[r][j] * x[j];
            x[r] = v / A[r][r];
        }
        return x[0];
    }
};

}  // namespace

TEST_CASE("phi profile") {
    CHECK(phi(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(chi(0.5) == 1.0);
    CHECK(chi(2.5) == 0.0);
    CHECK(chi(1.5) == doctest::Approx(std::exp(1.0 - 1.0 / (1.0 - 0.25))));
    boost::math::quadrature::tanh_sinh<double> q;
    for (double x : {0.3, 1.0, 1.4, 1.9, 3.0, -1.7}) {
        // piecewise across the kinks of chi at |s| = 1, 2
        const double ax = std::abs(x);
        double area = 0;
        for (auto [lo, hi] : {std::pair{0.0, 1.0}, {1.0, 2.0}})
            if (ax > lo) area += q.integrate([](double s) { return chi(s); }, lo, std::min(ax, hi));
        const double want = 0.5 + 0.25 * std::copysign(area, x);
        CHECK(phi(x) == doctest::Approx(want).epsilon(1e-11));
        CHECK(phi_prime(x) == doctest::Approx(0.25 * chi(x)));
    }
    CHECK(phi(100.0) == doctest::Approx(phi_sup()));
    CHECK(phi_sup() < 1.0);
}

TEST_CASE("M1 and M2 closed forms") {
    const MultiplierParams p = base_multiplier_params(1e-3, 2.0 / 3.0);
    CHECK(m1(p, 0.0, 3.0) == 0.0);
    CHECK(m1(p, 8.0, 40.0) == doctest::Approx(phi(0.1 * 0.5 * 40.0)));
    CHECK(m1(p, -8.0, 40.0) == doctest::Approx(phi(-0.1 * 0.5 * 40.0)));
    CHECK(m2(p, 3.0, 4.0) == doctest::Approx(M_PI / 2 + std::atan(4.0 / 3.0)));
    CHECK(m2(p, 0.0, 4.0) == 0.0);
    CHECK(m2(p, 40.0, 4.0) == 0.0);  // beyond nu^{-1/2}
    CHECK(m3(p, 1.0, 40.0, 4.0) == 0.0);
    // k d_xi M1 identity.
    CHECK(8.0 * dxi_m1(p, 8.0, 3.0) == doctest::Approx(0.1 * 4.0 * phi_prime(0.1 * 0.5 * 3.0)));
    CHECK(3.0 * dxi_m2(p, 3.0, 4.0) == doctest::Approx(9.0 / 25.0));
}

TEST_CASE("M3 at the origin is pi zeta(2 - mu)") {
    for (double mu : {2.0 / 3.0, 0.8}) {
        const MultiplierParams p = base_multiplier_params(1e-2, mu);
        CHECK(m3(p, 0.0, 0.0, 0.0) == doctest::Approx(M_PI * boost::math::zeta(2.0 - mu)).epsilon(1e-12));
    }
}

TEST_CASE("series agrees with an extrapolated direct sum") {
    for (double mu : {2.0 / 3.0, 0.8}) {
        const MultiplierParams p = base_multiplier_params(1e-2, mu);
        for (auto [t, k, xi] : {std::array<double, 3>{0.0, 0.0, 0.3}, {1.3, 2.0, -5.0}, {4.5, -3.0, 17.0},
                                {3.0, 7.0, -21.0}, {0.2, 1.0, 60.0}}) {
            const Oracle o{mu, t, k, xi};
            const SeriesValues s = multiplier_series(p, t, k, xi);
            CHECK(s.m3 == doctest::Approx(o.richardson([&](long l) { return o.term_m3(l); }, mu - 1.0)).epsilon(1e-10));
            CHECK(s.upsilon == doctest::Approx(o.richardson([&](long l) { return o.term_ups(l); }, mu - 1.0)).epsilon(1e-10));
            CHECK(s.tail_residual < 1e-8);
        }
    }
}

TEST_CASE("Upsilon identity by central differences") {
    const MultiplierParams p = base_multiplier_params(1e-2, 2.0 / 3.0);
    const auto s = random_symbol_samples(300, 5, 5.0 / p.nu13, 10);
    CHECK(check_upsilon_identity(p, s, 1e-4) < 1e-6);
}

TEST_CASE("constants, delta0 and the dissipation lower bound") {
    const MultiplierParams p = make_multiplier_params(1e-2, 2.0 / 3.0);
    CHECK(p.c_mu > 1.0 + M_PI * boost::math::zeta(4.0 / 3.0));
    CHECK(p.delta0 == doctest::Approx(std::min(1.0 / (12.0 * p.c_mu), 1.0 / (4.0 * p.c1_mu))));
    const auto s = random_symbol_samples(3000, 7, 5.0 / p.nu13, 40);
    const DissipationReport r = check_dissipation_lower_bound(p, s);
    CHECK(r.samples == 3000);
    CHECK(r.min_slack >= -1e-10);
    CHECK(r.min_km1_margin >= -1e-12);
    // Sampled symbols respect 1 <= S <= c_mu.
    for (std::size_t i = 0; i < 200; ++i) {
        const double S = mult_S(p, s[i].t, s[i].k, s[i].xi);
        CHECK(S >= 1.0);
        CHECK(S <= p.c_mu * (1.0 + 1e-9));
    }
}

TEST_CASE("the pointwise bound fails at k = 0 for very large t") {
    const MultiplierParams p = make_multiplier_params(1e-2, 2.0 / 3.0);
    CHECK(dissipation_slack(p, 5.0 / p.nu13, 0.0, 0.1) > 0.0);
    CHECK(dissipation_slack(p, 2000.0, 0.0, 0.1) < 0.0);
}

TEST_CASE("select_delta0 needs estimated constants") {
    const MultiplierParams p = base_multiplier_params(1e-2, 2.0 / 3.0);
    CHECK_THROWS(select_delta0(p));
    CHECK_THROWS_AS(base_multiplier_params(0.0, 2.0 / 3.0), std::invalid_argument);
    CHECK_THROWS_AS(base_multiplier_params(1e-2, 0.5), std::invalid_argument);
}

TEST_CASE("derivative bounds are finite") {
    const MultiplierParams p = make_multiplier_params(1e-2, 2.0 / 3.0);
    const auto s = random_symbol_samples(500, 3, 5.0 / p.nu13, 40);
    const DerivativeReport d = check_derivative_bounds(p, s);
    CHECK(std::isfinite(d.c_xi));
    CHECK(std::isfinite(d.c_k));
    CHECK(d.n_xi > 0);
    CHECK(d.max_fd_mismatch < 1e-5);
}

TEST_CASE("Lorentzian convolution identity") {
    const LorentzianPair one = lorentzian_convolution_identity(1.0, 1.0, 0.0);
    CHECK(one.rhs == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(one.lhs == doctest::Approx(M_PI / 2).epsilon(1e-12));
    const LorentzianPair q = lorentzian_convolution_identity(0.3, 2.0, -7.0);
    CHECK(q.lhs == doctest::Approx(q.rhs).epsilon(1e-10));
    CHECK_THROWS(lorentzian_convolution_identity(0.0, 1.0, 0.0));
}

TEST_CASE("random symbol samples are reproducible") {
    const auto a = random_symbol_samples(100, 42, 10.0, 5), b = random_symbol_samples(100, 42, 10.0, 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].t == b[i].t);
        CHECK(a[i].xi == b[i].xi);
        CHECK(std::abs(a[i].k) <= 5.0);
    }
}
