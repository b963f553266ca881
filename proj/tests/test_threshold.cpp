#include "doctest.h"

#include "shearlab/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

using namespace shearlab;

namespace {

CellOptions small_cell() {
    CellOptions o;
    o.grid = {32, 64, 4.0 * M_PI, 2.0 / 3.0};
    o.step = {0.5, 0.05, 0.0};
    o.output_dt = 0.5;
    o.m = 6;
    return o;
}

CellRecord synthetic(double amp, double e0, double e1, bool diverged = false) {
    CellRecord c;
    c.amplification_omega = amp;
    c.energy_initial = e0;
    c.energy_final = e1;
    c.diverged = diverged;
    return c;
}

}  // namespace

TEST_CASE("classification rules") {
    CHECK(classify(synthetic(1.0, 1.0, 0.5)) == Stability::stable);
    CHECK(classify(synthetic(10.0, 1.0, 0.5)) == Stability::stable);
    CHECK(classify(synthetic(10.5, 1.0, 0.5)) == Stability::transient);
    CHECK(classify(synthetic(2.0, 1.0, 1.5)) == Stability::transient);
    CHECK(classify(synthetic(100.0, 1.0, 0.5)) == Stability::transient);
    CHECK(classify(synthetic(100.5, 1.0, 0.5)) == Stability::unstable);
    CHECK(classify(synthetic(1.0, 1.0, 0.5, true)) == Stability::unstable);
    CHECK(classify(synthetic(NAN, 1.0, 0.5)) == Stability::unstable);
    CHECK(classify(synthetic(1.0, 0.0, 0.0)) == Stability::stable);
    CHECK(classify(synthetic(3.0, 1.0, 0.5), 2.0) == Stability::transient);
    CHECK_THROWS_AS(classify(synthetic(1.0, 1.0, 0.5), 1.0), std::invalid_argument);
    CHECK(std::string(to_string(Stability::transient)) == "transient");
}

TEST_CASE("zero perturbation is stable") {
    CellSpec s;
    s.nu = 1e-1;
    s.horizon = 2.0;
    const CellRecord c = run_cell(s, small_cell());
    CHECK_FALSE(c.diverged);
    CHECK(c.energy_initial == 0.0);
    CHECK(classify(c) == Stability::stable);
    CHECK(c.record.rows.size() == 5);
}

TEST_CASE("small perturbation decays and runs are deterministic") {
    CellSpec s;
    s.nu = 1e-1;
    s.amp_omega = 0.05 * std::cbrt(1e-1);
    s.amp_theta = 0.05 * std::cbrt(1e-2);
    s.seed = 4;
    s.horizon = 4.0;
    CellOptions o = small_cell();
    const CellRecord a = run_cell(s, o);
    const CellRecord b = run_cell(s, o);
    CHECK(classify(a) == Stability::stable);
    CHECK(a.energy_final < a.energy_initial);
    CHECK(a.amplification_omega >= 1.0);
    REQUIRE(a.record.rows.size() == b.record.rows.size());
    for (std::size_t i = 0; i < a.record.rows.size(); ++i)
        CHECK(csv_row(a.record.rows[i]) == csv_row(b.record.rows[i]));
    CHECK(a.steps == b.steps);
}

TEST_CASE("a blow-up is recorded as unstable with the partial record kept") {
    CellSpec s;
    s.nu = 1e-1;
    s.amp_omega = 1e6;  // H^m-normalized, so large
    s.amp_theta = 1e6;
    s.horizon = 20.0;
    CellOptions o = small_cell();
    o.step.dt_fixed = 0.5;
    const CellRecord c = run_cell(s, o);
    CHECK(c.diverged);
    CHECK(std::isfinite(c.blowup_time));
    CHECK_FALSE(c.record.rows.empty());
    CHECK(classify(c) == Stability::unstable);
}

TEST_CASE("run_pool covers every index once, in any worker count") {
    for (int workers : {1, 2, 4}) {
        std::vector<int> hits(37, 0);
        std::mutex mu;
        run_pool(hits.size(), workers, [&](std::size_t i) {
            std::lock_guard<std::mutex> lk(mu);
            ++hits[i];
        });
        for (int h : hits) CHECK(h == 1);
    }
    std::atomic<int> calls{0};
    run_pool(0, 3, [&](std::size_t) { ++calls; });
    CHECK(calls == 0);
    CHECK_THROWS_AS(run_pool(5, 2, [](std::size_t i) {
                        if (i == 3) throw std::runtime_error("job failed");
                    }),
                    std::runtime_error);
}

TEST_CASE("scan output does not depend on the worker count") {
    ScanConfig cfg;
    cfg.nu_list = {1e-1, 5e-2};
    cfg.a_list = {0.05, 0.5};
    cfg.horizon_factor = 1.0;
    cfg.cell = small_cell();
    cfg.workers = 1;
    const ScanResult one = run_scan(cfg);
    cfg.workers = 2;
    const ScanResult two = run_scan(cfg);
    REQUIRE(one.cells.size() == 4);
    REQUIRE(two.cells.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(scan_csv_row(one.cells[i]) == scan_csv_row(two.cells[i]));
    // Ordered by (nu, alpha, beta, a, seed).
    CHECK(one.cells[0].record.spec.nu == 1e-1);
    CHECK(one.cells[0].a == 0.05);
    CHECK(one.cells[1].a == 0.5);
    CHECK(one.cells[2].record.spec.nu == 5e-2);
    CHECK(one.cells[1].record.spec.amp_omega == doctest::Approx(0.5 * std::cbrt(1e-1)));
    CHECK(one.cells[1].record.spec.amp_theta == doctest::Approx(0.5 * std::pow(1e-1, 2.0 / 3.0)));
    auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(scan_csv_header()) == count(scan_csv_row(one.cells[0])));
}

TEST_CASE("boundary bisection and exponent regression on a synthetic oracle") {
    const double alpha = 1.0 / 3.0;
    int calls = 0;
    const StabilityOracle oracle = [&](double nu, double amp) {
        ++calls;
        return amp < 0.7 * std::pow(nu, alpha);
    };
    const Boundary b = locate_boundary(1e-2, oracle, 1e-6, 10.0, 0.01);
    CHECK(b.amp_stable < 0.7 * std::cbrt(1e-2));
    CHECK(b.amp_unstable >= 0.7 * std::cbrt(1e-2));
    CHECK(b.amp_unstable / b.amp_stable <= 1.01);
    CHECK(b.evaluations == calls);

    const ExponentFit f = fit_exponents({1e-1, 1e-2, 1e-3, 1e-4}, oracle, 1e-6, 10.0, 0.01);
    CHECK(f.exponent == doctest::Approx(alpha).epsilon(0.02 / alpha));
    CHECK(f.ci95_lo <= f.exponent);
    CHECK(f.ci95_hi >= f.exponent);
    CHECK(f.boundaries.size() == 4);
    CHECK(std::exp(f.intercept) == doctest::Approx(0.7).epsilon(0.02));

    CHECK_THROWS_AS(fit_exponents({1e-2}, oracle, 1e-6, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(locate_boundary(1e-2, oracle, 1.0, 10.0), std::runtime_error);
    CHECK_THROWS_AS(locate_boundary(1e-2, oracle, 1e-6, 1e-5), std::runtime_error);
}

TEST_CASE("exact regression through three boundaries") {
    std::vector<Boundary> bs;
    for (double nu : {1e-1, 1e-2, 1e-3}) {
        Boundary b;
        b.nu = nu;
        b.amp_stable = b.amp_unstable = 2.0 * std::pow(nu, 0.5);
        bs.push_back(b);
    }
    const ExponentFit f = regress_boundaries(bs);
    CHECK(f.exponent == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.std_error == doctest::Approx(0.0).scale(1.0));
}
