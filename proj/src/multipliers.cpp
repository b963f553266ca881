#include "shearlab/multipliers.hpp"
#include "shearlab/multiplier_checks.hpp"
#include "shearlab/phi.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <stdexcept>

namespace shearlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kPowTable = 8192;

using Triple = std::array<double, 3>;  // (M3, Upsilon, d/dxi M3) integrands

// pi/2 + atan(w) without cancellation for large negative w.
inline double half_pi_plus_atan(double w) { return w >= 0.0 ? kPi / 2 + std::atan(w) : std::atan(-1.0 / w); }

// G functions of one side at real x >= 1 (term = x^{mu-2} G).
// side = +1 for l = x, side = -1 for l = -x. c = xi + t k.
inline Triple side_g(double x, int side, double t, double k, double c) {
    const double z = side > 0 ? c - t * x : c + t * x;
    const double a = side > 0 ? 1.0 + std::abs(k - x) + x : 1.0 + std::abs(k + x) + x;
    const double r = a / (a * a + z * z);
    const double w = z / a;
    return side > 0 ? Triple{half_pi_plus_atan(w), x * r, r} : Triple{half_pi_plus_atan(-w), x * r, -r};
}

inline double lpow(const MultiplierParams& p, long l) {
    if (static_cast<std::size_t>(l) < p.pow_table->size()) return (*p.pow_table)[l];
    return std::pow(static_cast<double>(l), p.mu - 2.0);
}

Triple f_at(const MultiplierParams& p, double x, int side, double t, double k, double c) {
    const Triple g = side_g(x, side, t, k, c);
    const double w = std::pow(x, p.mu - 2.0);
    return {w * g[0], w * g[1], w * g[2]};
}

// sum_{x > L} x^{mu-2} G(x) by Euler-Maclaurin; returns the tail and the size
// of the last correction used.
Triple tail_sum(const MultiplierParams& p, long L, int side, double t, double k, double c, double& residual) {
    const double q = 1.0 / (1.0 - p.mu);
    const double Ld = static_cast<double>(L);
    Triple integral{0, 0, 0};
    const auto& nodes = *p.tail_nodes;
    const auto& weights = *p.tail_weights;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Triple g = side_g(Ld * nodes[i], side, t, k, c);
        for (int comp = 0; comp < 3; ++comp) integral[comp] += weights[i] * g[comp];
    }
    const double pre = q * std::pow(Ld, p.mu - 1.0);
    const Triple fm2 = f_at(p, Ld - 2, side, t, k, c), fm1 = f_at(p, Ld - 1, side, t, k, c);
    const Triple f0 = f_at(p, Ld, side, t, k, c);
    const Triple fp1 = f_at(p, Ld + 1, side, t, k, c), fp2 = f_at(p, Ld + 2, side, t, k, c);
    Triple out{};
    for (int comp = 0; comp < 3; ++comp) {
        const double d1 = (fm2[comp] - 8 * fm1[comp] + 8 * fp1[comp] - fp2[comp]) / 12.0;
        const double d3 = (fp2[comp] - 2 * fp1[comp] + 2 * fm1[comp] - fm2[comp]) / 2.0;
        out[comp] = pre * integral[comp] - 0.5 * f0[comp] - d1 / 12.0 + d3 / 720.0;
        if (comp < 2) residual = std::max(residual, std::abs(d3) / 720.0);
    }
    return out;
}

}  // namespace

double MultiplierParams::growth(double t) const { return std::exp(delta0 * nu13 * t); }

MultiplierParams base_multiplier_params(double nu, double mu, int l_max) {
    if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("multiplier params: nu must lie in (0, 1]");
    if (!(mu >= 2.0 / 3.0 - 1e-15 && mu < 1.0)) throw std::invalid_argument("multiplier params: mu must lie in [2/3, 1)");
    if (l_max < 8) throw std::invalid_argument("multiplier params: l_max must be >= 8");
    MultiplierParams p;
    p.nu = nu;
    p.mu = mu;
    p.l_max = l_max;
    p.nu13 = std::cbrt(nu);
    p.k_band = 1.0 / std::sqrt(nu);
    auto table = std::make_shared<std::vector<double>>(kPowTable);
    (*table)[0] = 0.0;
    for (std::size_t l = 1; l < kPowTable; ++l) (*table)[l] = std::pow(static_cast<double>(l), mu - 2.0);
    p.pow_table = std::move(table);

    // Composite Gauss-Legendre on r in [0, 1]; geometric panels resolve tail
    // transitions that sit far beyond L.
    using rule = boost::math::quadrature::gauss<double, 20>;
    static const std::array<double, 6> edges{0.0, 1e-3, 1e-2, 0.1, 0.35, 1.0};
    const double q = 1.0 / (1.0 - mu);
    auto nodes = std::make_shared<std::vector<double>>();
    auto weights = std::make_shared<std::vector<double>>();
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double mid = 0.5 * (edges[e] + edges[e + 1]);
        const double half = 0.5 * (edges[e + 1] - edges[e]);
        const auto& xs = rule::abscissa();
        const auto& ws = rule::weights();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (int sgn : {-1, 1}) {
                if (xs[i] == 0.0 && sgn < 0) continue;
                const double r = mid + sgn * half * xs[i];
                nodes->push_back(std::pow(r, -q));
                weights->push_back(half * ws[i]);
            }
        }
    }
    p.tail_nodes = std::move(nodes);
    p.tail_weights = std::move(weights);
    return p;
}

MultiplierParams make_multiplier_params(double nu, double mu, int l_max, const ConstantSampling& sampling) {
    MultiplierParams p = base_multiplier_params(nu, mu, l_max);
    p.c_mu = estimate_c_mu(p, sampling);
    p.c1_mu = estimate_c1_mu(p, sampling);
    p.delta0 = select_delta0(p);
    return p;
}

double m1(const MultiplierParams& p, double k, double xi) {
    if (k == 0.0) return 0.0;
    const double s = k > 0 ? 1.0 : -1.0;
    return phi(p.nu13 * std::pow(std::abs(k), -1.0 / 3.0) * s * xi);
}

double m2(const MultiplierParams& p, double k, double xi) {
    if (!p.in_band(k)) return 0.0;
    return kPi / 2 + std::atan(xi / k);
}

double dxi_m1(const MultiplierParams& p, double k, double xi) {
    if (k == 0.0) return 0.0;
    const double s = k > 0 ? 1.0 : -1.0;
    const double scale = p.nu13 * std::pow(std::abs(k), -1.0 / 3.0);
    return phi_prime(scale * s * xi) * scale * s;
}

double dxi_m2(const MultiplierParams& p, double k, double xi) {
    if (!p.in_band(k)) return 0.0;
    return k / (k * k + xi * xi);
}

double dk_m1(const MultiplierParams& p, double k, double xi) {
    if (k == 0.0) return 0.0;
    const double s = k > 0 ? 1.0 : -1.0;
    const double ak = std::abs(k);
    const double arg = p.nu13 * std::pow(ak, -1.0 / 3.0) * s * xi;
    return phi_prime(arg) * p.nu13 * xi * (-1.0 / 3.0) * std::pow(ak, -4.0 / 3.0);
}

SeriesValues multiplier_series(const MultiplierParams& p, double t, double k, double xi) {
    const double c = xi + t * k;
    long L = std::max<long>(p.l_max, static_cast<long>(std::ceil(8.0 * t)) + 2 * static_cast<long>(std::abs(k)) + 16);
    if (t > 4.0) {
        const double xstar = std::abs(k + xi / t);
        L = std::max<long>(L, static_cast<long>(std::ceil(1.5 * xstar)) + 2);
    }
    SeriesValues out;
    out.terms = static_cast<int>(L);
    double s_m3 = 0, s_ups = 0, s_dxi = 0;
    for (long l = 1; l <= L; ++l) {
        const double x = static_cast<double>(l);
        const double w = lpow(p, l);
        const Triple gp = side_g(x, +1, t, k, c);
        const Triple gm = side_g(x, -1, t, k, c);
        s_m3 += w * (gp[0] + gm[0]);
        s_ups += w * (gp[1] + gm[1]);
        s_dxi += w * (gp[2] + gm[2]);
    }
    double residual = 0.0;
    const Triple tp = tail_sum(p, L, +1, t, k, c, residual);
    const Triple tm = tail_sum(p, L, -1, t, k, c, residual);
    out.m3 = s_m3 + tp[0] + tm[0];
    out.upsilon = s_ups + tp[1] + tm[1];
    out.dxi_m3 = s_dxi + tp[2] + tm[2];
    out.tail_residual = residual;
    return out;
}

double m3(const MultiplierParams& p, double t, double k, double xi) {
    if (std::abs(k) > p.k_band) return 0.0;
    return multiplier_series(p, t, k, xi).m3;
}

double upsilon(const MultiplierParams& p, double t, double k, double xi) {
    return multiplier_series(p, t, k, xi).upsilon;
}

double mult_S(const MultiplierParams& p, double t, double k, double xi) {
    return m1(p, k, xi) + m2(p, k, xi) + m3(p, t, k, xi) + 1.0;
}

double mult_M(const MultiplierParams& p, double t, double k, double xi) {
    return p.growth(t) * mult_S(p, t, k, xi);
}

MultiplierPoint evaluate_multiplier(const MultiplierParams& p, double t, double k, double xi) {
    MultiplierPoint o;
    const SeriesValues s = multiplier_series(p, t, k, xi);
    const bool band = std::abs(k) <= p.k_band;
    o.m1 = m1(p, k, xi);
    o.m2 = m2(p, k, xi);
    o.m3 = band ? s.m3 : 0.0;
    o.dxi_m3 = band ? s.dxi_m3 : 0.0;
    o.upsilon = s.upsilon;
    o.S = o.m1 + o.m2 + o.m3 + 1.0;
    o.growth = p.growth(t);
    o.M = o.growth * o.S;
    o.k_dxi_m1 = k * dxi_m1(p, k, xi);
    o.k_dxi_m2 = k * dxi_m2(p, k, xi);
    o.tail_residual = s.tail_residual;
    return o;
}

}  // namespace shearlab
