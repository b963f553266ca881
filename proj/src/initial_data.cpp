#include "shearlab/initial_data.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace shearlab {

double hm_norm(const SpectralField& f, double m) {
    const double h = 0.5 * m;
    return weighted_l2(f, [h](double k, double eta, double) { return std::pow(1.0 + k * k + eta * eta, h); });
}

double dx_hm_norm(const SpectralField& f, double m) {
    const double h = 0.5 * m;
    return weighted_l2(f, [h](double k, double eta, double) {
        return std::sqrt(1.0 + k * k) * std::pow(1.0 + k * k + eta * eta, h);
    });
}

namespace {

SpectralField draw(const GridPtr& grid, std::uint64_t seed, std::uint64_t stream, int attempt,
                   const InitialProfile& prof) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int K = prof.kx_max, P = prof.degree;
    std::vector<double> a((K + 1) * (P + 1)), b((K + 1) * (P + 1));
    for (int k = 0; k <= K; ++k)
        for (int p = 0; p <= P; ++p) {
            a[k * (P + 1) + p] = u(rng);
            b[k * (P + 1) + p] = k == 0 ? 0.0 : u(rng);
        }
    const double s = prof.width;
    auto fn = [&](double x, double y) {
        const double yy = y / s;
        const double env = std::exp(-0.5 * yy * yy);
        double v = 0.0;
        for (int k = 0; k <= K; ++k) {
            const double c = std::cos(k * x), sn = std::sin(k * x);
            double poly = 1.0;
            for (int p = 0; p <= P; ++p) {
                v += (a[k * (P + 1) + p] * c + b[k * (P + 1) + p] * sn) * poly;
                poly *= yy;
            }
        }
        return v * env;
    };
    SpectralField f = transform_to_spectral(sample_physical(grid, fn), 0.0);
    const SpectralField gauss = transform_to_spectral(
        sample_physical(grid, [s](double, double y) { return std::exp(-0.5 * (y / s) * (y / s)); }), 0.0);
    const cplx ratio = f.at(0, 0) / gauss.at(0, 0);
    f.axpy(-ratio.real(), gauss);
    apply_dealias(f);
    enforce_reality(f);
    f.at(0, 0) = cplx(0.0, 0.0);
    return f;
}

SpectralField scaled_draw(const GridPtr& grid, std::uint64_t seed, std::uint64_t stream, double amp, double m,
                          bool dx_weight, const InitialProfile& prof, int& redraws) {
    SpectralField f(grid, 0.0);
    if (amp == 0.0) return f;
    for (int attempt = 0; attempt < 64; ++attempt) {
        f = draw(grid, seed, stream, attempt, prof);
        const double n = dx_weight ? dx_hm_norm(f, m) : hm_norm(f, m);
        if (n > 0.0 && std::isfinite(n)) {
            f *= amp / n;
            return f;
        }
        ++redraws;
    }
    throw std::runtime_error("make_initial_data: could not draw a nonzero field");
}

}  // namespace

InitialData make_initial_data(const GridPtr& grid, std::uint64_t seed, double amp_omega, double amp_theta, double m,
                              const InitialProfile& profile) {
    if (!(amp_omega >= 0.0) || !(amp_theta >= 0.0)) throw std::invalid_argument("make_initial_data: amplitudes must be >= 0");
    if (profile.width <= 0.0 || profile.kx_max < 0 || profile.degree < 0)
        throw std::invalid_argument("make_initial_data: bad profile");
    InitialData d;
    d.omega = scaled_draw(grid, seed, 0, amp_omega, m, false, profile, d.redraws);
    d.theta = scaled_draw(grid, seed, 1, amp_theta, m, true, profile, d.redraws);
    return d;
}

}  // namespace shearlab
