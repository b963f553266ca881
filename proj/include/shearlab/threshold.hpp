#pragma once

#include "shearlab/initial_data.hpp"
#include "shearlab/simulation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace shearlab {

enum class Stability { stable, transient, unstable };
const char* to_string(Stability s);

struct CellSpec {
    double nu = 1e-2;
    double amp_omega = 0, amp_theta = 0;
    std::uint64_t seed = 1;
    double eps0 = 0.05;  // size parameter used for the envelope constants
    double horizon = 0;  // 0 selects 5 nu^{-1/3}
};

struct CellOptions {
    GridSpec grid{128, 256, 16.0 * 3.14159265358979323846, 2.0 / 3.0};
    double m = 6;
    InitialProfile profile{};
    StepControl step{0.5, 0.05, 0.0};
    double output_dt = 0.5;
    double delta0 = 0;  // for envelope constants
};

struct CellRecord {
    CellSpec spec;
    double amplification_omega = 1;  // sup_t ||w_neq(t)|| / ||w_neq(0)||
    double amplification_theta = 1;
    double energy_initial = 0;       // (||w_neq|| + nu^{-1/3} ||th_neq||)^2
    double energy_final = 0;
    bool diverged = false;
    double blowup_time = NAN;
    Envelopes envelopes{};
    std::size_t steps = 0;
    DiagnosticsRecord record;
};

CellRecord run_cell(const CellSpec& spec, const CellOptions& opt);

// stable: amplification <= Gamma and final energy < initial;
// unstable: divergence or amplification > Gamma^2; transient otherwise.
Stability classify(const CellRecord& c, double gamma = 10.0);

struct ScanConfig {
    std::vector<double> nu_list{1e-2, 3e-3, 1e-3};
    std::vector<double> alpha_list{1.0 / 3.0};  // A_omega = a nu^alpha
    std::vector<double> beta_list{2.0 / 3.0};   // A_theta = a nu^beta
    std::vector<double> a_list{0.05};
    std::vector<std::uint64_t> seeds{1};
    double horizon_factor = 5.0;  // T = factor * nu^{-1/3}
    double gamma = 10.0;
    int workers = 1;
    CellOptions cell{};
    double mu = 2.0 / 3.0;  // multiplier parameter behind delta0
};

struct ScanCell {
    double alpha = 0, beta = 0, a = 0;
    CellRecord record;
    Stability stability = Stability::stable;
};

struct MonotonicityFlag {
    double nu, alpha, beta;
    std::uint64_t seed;
    double a_lo, a_hi;
    double amp_lo, amp_hi;
};

struct ScanResult {
    std::vector<ScanCell> cells;  // ordered by (nu, alpha, beta, a, seed)
    std::vector<MonotonicityFlag> monotonicity_flags;
};

// Runs every cell of the scan on a bounded pool of `workers` threads.
ScanResult run_scan(const ScanConfig& cfg);

// Generic ordered job runner: results[i] = job(i), at most `workers` at a time.
void run_pool(std::size_t n, int workers, const std::function<void(std::size_t)>& job);

std::string scan_csv_header();
std::string scan_csv_row(const ScanCell& c);

// Exponent regression from stability boundaries.
struct Boundary {
    double nu = 0;
    double amp_stable = 0;    // largest amplitude found stable
    double amp_unstable = 0;  // smallest amplitude found non-stable
    double estimate() const;  // geometric midpoint
    int evaluations = 0;
};

struct ExponentFit {
    double exponent = 0;      // slope of log amp* against log nu
    double intercept = 0;
    double std_error = 0;
    double ci95_lo = 0, ci95_hi = 0;
    std::vector<Boundary> boundaries;
};

using StabilityOracle = std::function<bool(double nu, double amp)>;

// Bisection in log amplitude from a stable lower and a non-stable upper
// bracket until amp_unstable / amp_stable <= 1 + tol. Throws when the bracket
// does not straddle a boundary.
Boundary locate_boundary(double nu, const StabilityOracle& stable, double amp_lo, double amp_hi, double tol = 0.1);

// Needs at least 3 viscosities.
ExponentFit fit_exponents(const std::vector<double>& nu_list, const StabilityOracle& stable, double amp_lo,
                          double amp_hi, double tol = 0.1);
ExponentFit regress_boundaries(const std::vector<Boundary>& b);

}  // namespace shearlab
