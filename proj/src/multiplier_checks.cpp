#include "shearlab/multiplier_checks.hpp"
#include "shearlab/phi.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace shearlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double default_t_max(const MultiplierParams& p, const ConstantSampling& s) {
    return s.t_max > 0 ? s.t_max : 5.0 / p.nu13;
}

std::vector<double> time_nodes(const MultiplierParams& p, const ConstantSampling& s) {
    const double tm = default_t_max(p, s);
    std::vector<double> ts;
    const int n = std::max(2, s.n_t);
    for (int i = 0; i < n; ++i) ts.push_back(tm * i / (n - 1));
    return ts;
}

std::vector<double> log_magnitudes(double lo_exp, double hi_exp, int n) {
    std::vector<double> v;
    n = std::max(2, n);
    for (int i = 0; i < n; ++i) v.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (n - 1)));
    return v;
}

// Distinct positive integers spread geometrically over [lo, hi].
std::vector<int> spread_integers(int lo, int hi, int n) {
    std::set<int> s;
    if (hi < lo) return {};
    n = std::max(1, n);
    for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        s.insert(static_cast<int>(std::lround(lo * std::pow(static_cast<double>(hi) / lo, f))));
    }
    return {s.begin(), s.end()};
}

}  // namespace

std::vector<SymbolSample> random_symbol_samples(std::size_t n, std::uint64_t seed, double t_max, int k_max) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> kd(-k_max, k_max);
    std::vector<SymbolSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t_max * u01(rng);
        const int k = u01(rng) < 0.1 ? 0 : kd(rng);
        const double mag = std::pow(10.0, -2.0 + 5.0 * u01(rng));
        const double sgn = u01(rng) < 0.5 ? -1.0 : 1.0;
        const bool critical = u01(rng) < 0.5;
        const double xi = sgn * mag + (critical ? -t * k : 0.0);
        out.push_back({t, static_cast<double>(k), xi});
    }
    return out;
}

double estimate_c_mu(const MultiplierParams& p, const ConstantSampling& s) {
    std::vector<int> ks{0};
    const int kb = static_cast<int>(std::floor(p.k_band));
    for (int k : spread_integers(1, std::max(1, kb), s.n_k)) ks.push_back(k);
    ks.push_back(kb + 1);
    const auto mags = log_magnitudes(-2.0, 4.0, s.n_xi);
    const auto far = log_magnitudes(4.0, 8.0, std::max(2, s.n_xi / 4));
    double sup = 1.0;
    for (double t : time_nodes(p, s)) {
        for (int k : ks) {
            std::vector<double> xis{0.0};
            for (double m : mags) {
                xis.push_back(m);
                xis.push_back(-m);
                if (k != 0 && t > 0) {
                    xis.push_back(-t * k + m);
                    xis.push_back(-t * k - m);
                }
            }
            // Far field only where the series stays short.
            if (t == 0.0)
                for (double m : far) {
                    xis.push_back(m);
                    xis.push_back(-m);
                }
            for (double xi : xis) sup = std::max(sup, mult_S(p, t, k, xi));
        }
    }
    return sup;
}

double estimate_c1_mu(const MultiplierParams& p, const ConstantSampling& s) {
    const int k0 = static_cast<int>(std::floor(p.k_band)) + 1;
    const auto ks = spread_integers(k0, 4 * k0, std::max(2, s.n_k / 2));
    if (ks.empty()) throw std::runtime_error("select_delta0: empty k range");
    const auto mags = log_magnitudes(-2.0, 4.0, s.n_xi / 2);
    double c1 = 0.0;
    for (double t : time_nodes(p, s)) {
        for (int k : ks) {
            std::vector<double> xis{0.0};
            for (double m : mags) {
                xis.push_back(m);
                xis.push_back(-m);
                xis.push_back(-t * k + m);
                xis.push_back(-t * k - m);
            }
            const double den = p.nu13 * std::pow(static_cast<double>(k), 2.0 / 3.0);
            for (double xi : xis) {
                const double kk = static_cast<double>(k) * k;
                const double v = kk / (kk + xi * xi) + upsilon(p, t, k, xi);
                c1 = std::max(c1, v / den);
            }
        }
    }
    return 1.1 * c1;
}

double select_delta0(const MultiplierParams& p) {
    if (!(p.c_mu >= 1.0) || !(p.c1_mu > 0.0))
        throw std::runtime_error("select_delta0: constants not estimated (degenerate sample)");
    return std::min(1.0 / (12.0 * p.c_mu), 1.0 / (4.0 * p.c1_mu));
}

double dissipation_slack(const MultiplierParams& p, double t, double k, double xi) {
    const MultiplierPoint m = evaluate_multiplier(p, t, k, xi);
    const double K2 = k * k + xi * xi;
    const double ups_rel = std::abs(k) <= p.k_band ? m.upsilon : 0.0;
    const double transport = m.growth * (m.k_dxi_m1 + m.k_dxi_m2 + ups_rel - p.delta0 * p.nu13 * m.S);
    const double lhs = 2.0 * p.nu * K2 * m.M + transport;
    const double ratio = K2 > 0 ? k * k / K2 : 0.0;
    const double rhs = 0.5 * p.delta0 * m.M *
                       (p.nu * K2 + p.nu13 * std::pow(std::abs(k), 2.0 / 3.0) + ratio + m.upsilon);
    return lhs - rhs;
}

DissipationReport check_dissipation_lower_bound(const MultiplierParams& p, const std::vector<SymbolSample>& sample,
                                                Exec exec) {
    if (!(p.delta0 > 0)) throw std::runtime_error("check_dissipation_lower_bound: delta0 not selected");
    const std::size_t n = sample.size();
    std::vector<double> slack(n), rel(n), km1(n), tail(n);
    kernels::for_each_index(static_cast<std::ptrdiff_t>(n), exec, [&](std::ptrdiff_t i) {
        const auto& s = sample[i];
        const MultiplierPoint m = evaluate_multiplier(p, s.t, s.k, s.xi);
        const double K2 = s.k * s.k + s.xi * s.xi;
        const double ups_rel = std::abs(s.k) <= p.k_band ? m.upsilon : 0.0;
        const double transport = m.growth * (m.k_dxi_m1 + m.k_dxi_m2 + ups_rel - p.delta0 * p.nu13 * m.S);
        const double lhs = 2.0 * p.nu * K2 * m.M + transport;
        const double ratio = K2 > 0 ? s.k * s.k / K2 : 0.0;
        const double k23 = std::pow(std::abs(s.k), 2.0 / 3.0);
        const double rhs = 0.5 * p.delta0 * m.M * (p.nu * K2 + p.nu13 * k23 + ratio + m.upsilon);
        slack[i] = lhs - rhs;
        rel[i] = (lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-300);
        km1[i] = s.k != 0.0 ? p.nu * K2 + m.k_dxi_m1 - 0.25 * p.nu13 * k23 : std::numeric_limits<double>::infinity();
        tail[i] = m.tail_residual;
    });
    DissipationReport r;
    r.samples = n;
    r.min_slack = std::numeric_limits<double>::infinity();
    r.min_relative_slack = std::numeric_limits<double>::infinity();
    r.min_km1_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (slack[i] < r.min_slack || slack[i] != slack[i]) {
            r.min_slack = slack[i];
            r.worst = sample[i];
        }
        r.min_relative_slack = std::min(r.min_relative_slack, rel[i]);
        r.min_km1_margin = std::min(r.min_km1_margin, km1[i]);
        r.max_tail_residual = std::max(r.max_tail_residual, tail[i]);
    }
    return r;
}

DerivativeReport check_derivative_bounds(const MultiplierParams& p, const std::vector<SymbolSample>& sample,
                                         Exec exec) {
    const std::size_t n = sample.size();
    std::vector<double> cxi(n, -1.0), ck(n, -1.0), fd(n, 0.0);
    kernels::for_each_index(static_cast<std::ptrdiff_t>(n), exec, [&](std::ptrdiff_t i) {
        const auto& s = sample[i];
        if (s.k == 0.0) return;
        const double ak = std::abs(s.k);
        const MultiplierPoint m = evaluate_multiplier(p, s.t, s.k, s.xi);
        const double dxi = m.growth * (dxi_m1(p, s.k, s.xi) + dxi_m2(p, s.k, s.xi) + m.dxi_m3);
        cxi[i] = std::abs(dxi) / (m.M * (p.nu13 * std::pow(ak, -1.0 / 3.0) + 1.0 / ak));
        const double h = 1e-4;
        const double num = (mult_M(p, s.t, s.k, s.xi + h) - mult_M(p, s.t, s.k, s.xi - h)) / (2 * h);
        fd[i] = std::abs(num - dxi) / m.M;
        if (ak > p.k_band && s.xi != 0.0) {
            // Only M1 depends on k here (M2 = M3 = 0).
            const double dk = m.growth * dk_m1(p, s.k, s.xi);
            ck[i] = std::abs(dk) / (m.M * std::sqrt(p.nu) / ak * std::abs(s.xi));
        }
    });
    DerivativeReport r;
    for (std::size_t i = 0; i < n; ++i) {
        if (cxi[i] >= 0) {
            r.c_xi = std::max(r.c_xi, cxi[i]);
            ++r.n_xi;
            r.max_fd_mismatch = std::max(r.max_fd_mismatch, fd[i]);
        }
        if (ck[i] >= 0) {
            r.c_k = std::max(r.c_k, ck[i]);
            ++r.n_k;
        }
    }
    return r;
}

double check_upsilon_identity(const MultiplierParams& p, const std::vector<SymbolSample>& sample, double h,
                              Exec exec) {
    const std::size_t n = sample.size();
    std::vector<double> err(n, 0.0);
    kernels::for_each_index(static_cast<std::ptrdiff_t>(n), exec, [&](std::ptrdiff_t i) {
        const auto& s = sample[i];
        if (std::abs(s.k) > p.k_band) return;
        const double t = std::max(s.t, h);
        auto M3 = [&](double tt, double xx) { return multiplier_series(p, tt, s.k, xx).m3; };
        const double dt = (M3(t + h, s.xi) - M3(t - h, s.xi)) / (2 * h);
        const double dxi = (M3(t, s.xi + h) - M3(t, s.xi - h)) / (2 * h);
        err[i] = std::abs(-dt + s.k * dxi - multiplier_series(p, t, s.k, s.xi).upsilon);
    });
    return *std::max_element(err.begin(), err.end());
}

LorentzianPair lorentzian_convolution_identity(double a, double s, double z) {
    if (!(a > 0.0) || !(s > 0.0)) throw std::invalid_argument("lorentzian identity: a and s must be positive");
    auto f = [&](double eta) { return 1.0 / ((a * a + eta * eta) * (s * s + (z - eta) * (z - eta))); };
    const double lo = std::min(0.0, z), hi = std::max(0.0, z);
    const double tol = 1e-14;
    boost::math::quadrature::exp_sinh<double> half_line;
    boost::math::quadrature::tanh_sinh<double> finite;
    const double inf = std::numeric_limits<double>::infinity();
    double lhs = half_line.integrate(f, hi, inf, tol) + half_line.integrate(f, -inf, lo, tol);
    if (hi > lo) lhs += finite.integrate(f, lo, hi, tol);
    const double rhs = kPi / (a * s) * (a + s) / ((a + s) * (a + s) + z * z);
    return {lhs, rhs};
}

}  // namespace shearlab
