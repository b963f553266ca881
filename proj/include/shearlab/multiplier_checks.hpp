#pragma once

#include "shearlab/kernels.hpp"
#include "shearlab/multipliers.hpp"

#include <cstdint>
#include <vector>

namespace shearlab {

struct SymbolSample {
    double t;
    double k;
    double xi;
};

// Random (t, k, xi) points: t uniform on [0, t_max]; integer k uniform on
// [-k_max, k_max] with an extra share of k = 0; xi log-uniform in magnitude
// around 0 or around the critical line xi = -t k.
std::vector<SymbolSample> random_symbol_samples(std::size_t n, std::uint64_t seed, double t_max, int k_max);

// Numerical sup of M1 + M2 + M3 + 1 over a deterministic (t, k, xi) lattice.
double estimate_c_mu(const MultiplierParams& p, const ConstantSampling& s = {});
// 1.1 x max of (k^2/(k^2+xi^2) + Upsilon) / (nu^{1/3}|k|^{2/3}) over |k| > nu^{-1/2}.
double estimate_c1_mu(const MultiplierParams& p, const ConstantSampling& s = {});
// min{1/(12 c_mu), 1/(4 c1_mu)}; throws if the constants were not estimated.
double select_delta0(const MultiplierParams& p);

struct DissipationReport {
    std::size_t samples = 0;
    double min_slack = 0.0;           // min of LHS - RHS
    double min_relative_slack = 0.0;  // min of (LHS - RHS) / (|LHS| + |RHS|)
    SymbolSample worst{0, 0, 0};
    double min_km1_margin = 0.0;      // min of nu(k^2+xi^2) + k d_xi M1 - nu^{1/3}|k|^{2/3}/4, k != 0
    double max_tail_residual = 0.0;
};

// Pointwise check of
//   2 nu (k^2+xi^2) M + (k d_xi - d_t) M
//     >= (delta0/2) M (nu (k^2+xi^2) + nu^{1/3}|k|^{2/3} + k^2/(k^2+xi^2) + Upsilon),
// with d_t M3 replaced through (-d_t + k d_xi) M3 = Upsilon.
DissipationReport check_dissipation_lower_bound(const MultiplierParams& p, const std::vector<SymbolSample>& sample,
                                                Exec exec = default_exec());

// Slack of the inequality above at one point.
double dissipation_slack(const MultiplierParams& p, double t, double k, double xi);

struct DerivativeReport {
    double c_xi = 0.0;  // best C in |d_xi M| <= C M (nu^{1/3}|k|^{-1/3} + |k|^{-1}), k != 0
    double c_k = 0.0;   // best C in |d_k M| <= C M nu^{1/2} |k|^{-1} |xi|, |k| > nu^{-1/2}
    std::size_t n_xi = 0;
    std::size_t n_k = 0;
    double max_fd_mismatch = 0.0;  // analytic vs central-difference d_xi M
};
DerivativeReport check_derivative_bounds(const MultiplierParams& p, const std::vector<SymbolSample>& sample,
                                         Exec exec = default_exec());

// max |(-d_t + k d_xi) M3 - Upsilon| by central differences with step h,
// over the samples with |k| <= nu^{-1/2} (others skipped). Returns the max.
double check_upsilon_identity(const MultiplierParams& p, const std::vector<SymbolSample>& sample, double h = 1e-4,
                              Exec exec = default_exec());

struct LorentzianPair {
    double lhs;  // quadrature of int d eta / ((a^2+eta^2)(s^2+(z-eta)^2))
    double rhs;  // (pi/(a s)) (a+s)/((a+s)^2+z^2)
};
LorentzianPair lorentzian_convolution_identity(double a, double s, double z);

}  // namespace shearlab
