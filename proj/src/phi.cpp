#include "shearlab/phi.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <vector>

namespace shearlab {

namespace {

constexpr int kNodes = 4096;  // table intervals on u = |s| - 1 in [0, 1]

double bump(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

// Cumulative integral of the bump on the uniform table nodes.
const std::vector<double>& cumulative() {
    static const std::vector<double> table = [] {
        std::vector<double> c(kNodes + 1, 0.0);
        const double h = 1.0 / kNodes;
        for (int i = 0; i < kNodes; ++i)
            c[i + 1] = c[i] + boost::math::quadrature::gauss<double, 15>::integrate(bump, i * h, (i + 1) * h);
        return c;
    }();
    return table;
}

// int_0^u bump, u in [0, 1].
double bump_integral(double u) {
    const auto& c = cumulative();
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return c[kNodes];
    const double h = 1.0 / kNodes;
    int i = static_cast<int>(u / h);
    if (i >= kNodes) i = kNodes - 1;
    const double u0 = i * h;
    const double s = (u - u0) / h;
    // Hermite cubic on F with F' = bump known at the nodes.
    const double f0 = c[i], f1 = c[i + 1];
    const double d0 = bump(u0) * h, d1 = bump(u0 + h) * h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1;
}

}  // namespace

double chi(double s) {
    const double a = std::abs(s);
    if (a <= 1.0) return 1.0;
    return bump(a - 1.0);
}

double phi(double x) {
    const double a = std::abs(x);
    const double half = a <= 1.0 ? a : 1.0 + bump_integral(a - 1.0);
    return 0.5 + 0.25 * std::copysign(half, x);
}

double phi_prime(double x) { return 0.25 * chi(x); }

double phi_sup() { return 0.5 + 0.25 * (1.0 + cumulative().back()); }

}  // namespace shearlab
