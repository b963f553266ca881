#include "doctest.h"

#include "shearlab/field.hpp"

#include <cmath>
#include <map>
#include <random>

using namespace shearlab;

namespace {

int row_of(const Grid& g, int m) {
    for (int j = 0; j < g.ny(); ++j)
        if (g.eta_index(j) == m) return j;
    return -1;
}

SpectralField random_retained(const GridPtr& g, std::uint64_t seed, double t = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    SpectralField f(g, t);
    for (int j = 0; j < g->ny(); ++j)
        for (int ik = 0; ik < g->nkx(); ++ik)
            if (g->retained(ik, j)) f.at(ik, j) = cplx(n(rng), n(rng));
    enforce_reality(f);
    f.at(0, row_of(*g, 0)) = cplx(f.at(0, row_of(*g, 0)).real(), 0.0);
    return f;
}

}  // namespace

TEST_CASE("grid rejects bad sizes") {
    CHECK_THROWS_AS(make_grid(12, 16, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(8, 16, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(16, 16, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(16, 16, 1.0, 1.5), std::invalid_argument);
    CHECK_NOTHROW(make_grid(16, 32, 2.0));
}

TEST_CASE("grid lattice and dealias mask") {
    const GridPtr g = make_grid(32, 64, 4.0);
    CHECK(g->nkx() == 17);
    CHECK(g->eta_spacing() == doctest::Approx(M_PI / 4.0));
    CHECK(g->multiplicity(0) == 1.0);
    CHECK(g->multiplicity(16) == 1.0);
    CHECK(g->multiplicity(3) == 2.0);
    for (int j = 0; j < g->ny(); ++j)
        for (int ik = 0; ik < g->nkx(); ++ik) {
            const int m = g->eta_index(j);
            const bool keep = ik <= 32 / 3.0 && std::abs(m) <= 64 / 3.0 && ik != 16 && m != -32;
            CHECK(g->retained(ik, j) == keep);
        }
}

TEST_CASE("mode (k=1, eta=0) is 2 cos X in physical space") {
    const GridPtr g = make_grid(16, 16, 3.0);
    SpectralField f(g, 0.0);
    f.at(1, row_of(*g, 0)) = 1.0;
    const PhysicalField p = transform_to_physical(f);
    for (int j = 0; j < g->ny(); ++j)
        for (int i = 0; i < g->nx(); ++i) CHECK(p.v[j * g->nx() + i] == doctest::Approx(2.0 * std::cos(g->x(i))).epsilon(1e-13));
}

TEST_CASE("mode (k=0, m=1) is 2 cos(pi Y / Ly) with Y from -Ly") {
    const GridPtr g = make_grid(16, 16, 3.0);
    SpectralField f(g, 0.0);
    f.at(0, row_of(*g, 1)) = 1.0;
    f.at(0, row_of(*g, -1)) = 1.0;
    const PhysicalField p = transform_to_physical(f);
    for (int j = 0; j < g->ny(); ++j)
        CHECK(p.v[j * g->nx() + 5] == doctest::Approx(2.0 * std::cos(M_PI * g->y(j) / 3.0)).scale(1.0));
    CHECK(g->y(0) == doctest::Approx(-3.0));
}

TEST_CASE("transform round trip and Parseval") {
    const GridPtr g = make_grid(32, 32, 5.0);
    const SpectralField f = random_retained(g, 3);
    const PhysicalField p = transform_to_physical(f);
    const SpectralField back = transform_to_spectral(p, 0.0);
    double err = 0;
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) err = std::max(err, std::abs(back.coeffs()[i] - f.coeffs()[i]));
    CHECK(err < 1e-13);
    double s = 0;
    for (double v : p.v) s += v * v;
    const double phys = std::sqrt(s * g->area() / static_cast<double>(g->n_points()));
    CHECK(l2_norm(f) == doctest::Approx(phys).epsilon(1e-12));
}

TEST_CASE("dealiased product matches a brute-force convolution on 16x16") {
    const GridPtr g = make_grid(16, 16, 2.0);
    const SpectralField a = random_retained(g, 1), b = random_retained(g, 2);
    std::map<std::pair<int, int>, cplx> A, B;
    for (int j = 0; j < g->ny(); ++j)
        for (int ik = 0; ik < g->nkx(); ++ik) {
            if (!g->retained(ik, j)) continue;
            const int m = g->eta_index(j);
            A[{ik, m}] = a.at(ik, j);
            B[{ik, m}] = b.at(ik, j);
            if (ik > 0) {
                A[{-ik, -m}] = std::conj(a.at(ik, j));
                B[{-ik, -m}] = std::conj(b.at(ik, j));
            }
        }
    const SpectralField p = dealiased_product(a, b);
    double err = 0, scale = 0;
    for (int j = 0; j < g->ny(); ++j)
        for (int ik = 0; ik < g->nkx(); ++ik) {
            cplx want = 0;
            if (g->retained(ik, j)) {
                const int m = g->eta_index(j);
                for (const auto& [ka, ca] : A) {
                    const auto it = B.find({ik - ka.first, m - ka.second});
                    if (it != B.end()) want += ca * it->second;
                }
            }
            err = std::max(err, std::abs(p.at(ik, j) - want));
            scale = std::max(scale, std::abs(want));
        }
    CHECK(scale > 0);
    CHECK(err < 1e-13 * scale);
}

TEST_CASE("Lambda_t symbol and gradients") {
    CHECK(lambda_t_symbol(2.0, 3.0, -1.0) == doctest::Approx(std::sqrt(1 + 9 + 25)));
    const GridPtr g = make_grid(16, 32, 3.0);
    SpectralField f(g, 1.5);
    const int j = row_of(*g, 2);
    f.at(2, j) = cplx(0.3, -0.7);
    const double eta = g->eta(j), xi = eta - 1.5 * 2.0;
    auto [lx, ly] = lab_gradient(f);
    CHECK(std::abs(lx.at(2, j) - cplx(0, 2.0) * f.at(2, j)) < 1e-15);
    CHECK(std::abs(ly.at(2, j) - cplx(0, xi) * f.at(2, j)) < 1e-15);
    auto [mx, my] = grad_L(f);
    CHECK(std::abs(my.at(2, j) - cplx(0, eta) * f.at(2, j)) < 1e-15);
    const SpectralField lam = apply_lambda_power(f, 2.0);
    CHECK(std::abs(lam.at(2, j) - (1 + 4 + eta * eta) * f.at(2, j)) < 1e-14);
}

TEST_CASE("zero mode split and reality") {
    const GridPtr g = make_grid(16, 16, 2.0);
    const SpectralField f = random_retained(g, 9);
    const SpectralField z = zero_mode(f), n = nonzero_modes(f);
    CHECK(l2_norm(z + n - f) == 0.0);
    CHECK(l2_norm(f) * l2_norm(f) == doctest::Approx(l2_norm(z) * l2_norm(z) + l2_norm(n) * l2_norm(n)));
    CHECK(reality_defect(f) < 1e-15);
    SpectralField h = f;
    h.at(0, row_of(*g, 2)) += cplx(0.5, 0.5);
    CHECK(reality_defect(h) > 0.1);
    enforce_reality(h);
    CHECK(reality_defect(h) < 1e-15);
}

TEST_CASE("field arithmetic guards grids") {
    const SpectralField a(make_grid(16, 16, 2.0)), b(make_grid(16, 32, 2.0));
    CHECK_THROWS(require_same_grid(a, b));
    SpectralField c = a;
    CHECK_THROWS(c += b);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    const GridPtr g = make_grid(64, 64, 6.0);
    const SpectralField f = random_retained(g, 4);
    set_default_exec(Exec::serial);
    const double ns = l2_norm(f);
    const SpectralField ps = dealiased_product(f, f);
    set_default_exec(Exec::parallel);
    const double np = l2_norm(f);
    const SpectralField pp = dealiased_product(f, f);
    CHECK(ns == np);
    CHECK(ps.coeffs() == pp.coeffs());
}
