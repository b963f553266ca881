#pragma once

#include <cmath>
#include <memory>
#include <vector>

namespace shearlab {

// Sampling density used to estimate c_mu and c1_mu.
struct ConstantSampling {
    int n_t = 16;      // time nodes on [0, t_max]
    int n_xi = 48;     // |xi| nodes per decade-spanning log grid (each sign)
    int n_k = 12;      // distinct |k| values inside the M3 band
    double t_max = 0;  // 0 selects 5 nu^{-1/3}
};

struct MultiplierParams {
    double nu = 1e-3;
    double mu = 2.0 / 3.0;
    int l_max = 200;
    double delta0 = 0.0;
    double c_mu = 0.0;
    double c1_mu = 0.0;

    double nu13 = 0.0;   // nu^{1/3}
    double k_band = 0.0; // nu^{-1/2}: M2, M3 vanish for |k| above it
    std::shared_ptr<const std::vector<double>> pow_table;  // l^{mu-2}, l = 0..
    // Tail quadrature in r = (L/x)^{1-mu}: nodes stored as r^{-1/(1-mu)}.
    std::shared_ptr<const std::vector<double>> tail_nodes;
    std::shared_ptr<const std::vector<double>> tail_weights;

    bool in_band(double k) const { return k != 0.0 && std::abs(k) <= k_band; }
    double growth(double t) const;  // e^{delta0 nu^{1/3} t}
};

// Fills the derived fields (nu13, k_band, power table) without selecting delta0.
MultiplierParams base_multiplier_params(double nu, double mu, int l_max = 200);
// Full construction: estimates c_mu, c1_mu on the default sampling and sets delta0.
MultiplierParams make_multiplier_params(double nu, double mu, int l_max = 200,
                                        const ConstantSampling& sampling = {});

double m1(const MultiplierParams& p, double k, double xi);
double m2(const MultiplierParams& p, double k, double xi);
double m3(const MultiplierParams& p, double t, double k, double xi);
double upsilon(const MultiplierParams& p, double t, double k, double xi);
double mult_M(const MultiplierParams& p, double t, double k, double xi);
// M1 + M2 + M3 + 1 (the bracket without the exponential growth factor).
double mult_S(const MultiplierParams& p, double t, double k, double xi);

// d/dxi and k d/dxi of the closed-form pieces.
double dxi_m1(const MultiplierParams& p, double k, double xi);
double dxi_m2(const MultiplierParams& p, double k, double xi);
double dk_m1(const MultiplierParams& p, double k, double xi);

// The l-series behind M3, Upsilon and d/dxi M3, evaluated together.
// Terms with 0 < |l| <= L are summed directly; the two tails |l| > L are
// replaced by Euler-Maclaurin with a Gauss-Legendre tail integral.
struct SeriesValues {
    double m3 = 0.0;       // unrestricted sum (no |k| cutoff applied)
    double upsilon = 0.0;
    double dxi_m3 = 0.0;
    int terms = 0;         // L
    double tail_residual = 0.0;  // size of the last Euler-Maclaurin term used
};
SeriesValues multiplier_series(const MultiplierParams& p, double t, double k, double xi);

// Every symbol needed at one (t, k, xi), with the |k| cutoffs applied.
struct MultiplierPoint {
    double m1 = 0, m2 = 0, m3 = 0, upsilon = 0;
    double S = 1;        // M1 + M2 + M3 + 1
    double growth = 1;   // e^{delta0 nu^{1/3} t}
    double M = 1;
    double k_dxi_m1 = 0, k_dxi_m2 = 0, dxi_m3 = 0;
    double tail_residual = 0;
};
MultiplierPoint evaluate_multiplier(const MultiplierParams& p, double t, double k, double xi);

}  // namespace shearlab
