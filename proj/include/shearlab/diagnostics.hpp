#pragma once

#include "shearlab/dynamics.hpp"
#include "shearlab/multipliers.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace shearlab {

// M and Upsilon on every mode of a grid at one time. With retained_only,
// modes outside the dealias mask are skipped; using the table on a field
// with energy there is a logic error.
class MultiplierTable {
public:
    MultiplierTable(const MultiplierParams& p, const GridPtr& grid, double t, bool retained_only = true,
                    Exec exec = default_exec());
    double t() const { return t_; }
    double M(std::size_t idx) const { return M_[idx]; }
    double upsilon(std::size_t idx) const { return U_[idx]; }
    bool has(std::size_t idx) const { return have_[idx] != 0; }
    const Grid& grid() const { return *grid_; }

private:
    GridPtr grid_;
    double t_;
    std::vector<double> M_, U_;
    std::vector<unsigned char> have_;
};

enum class XWeight { none, abs_dx_third, bracket_dx, bracket_dx_third, dx };

double x_weight(XWeight w, double k);

// sqrt(sum W^2 |f|^2) with W = [sqrt M] Lambda_t^m X(k).
double weighted_norm(const SpectralField& f, double m, const MultiplierParams& p, bool with_M, XWeight extra);
double weighted_norm(const SpectralField& f, double m, const MultiplierTable* table, XWeight extra);

struct CKValues {
    // omega terms: nu |(Dx,Dy)|^2, nu^{1/3} |Dx|^{2/3}, |grad u^2_neq|^2, Upsilon
    double omega_terms[4] = {0, 0, 0, 0};
    // theta terms: nu |(Dx,Dy)|^2, nu^{1/3} |Dx|^{2/3}, Upsilon (error system only)
    double theta_terms[3] = {0, 0, 0};
    double ck_omega = 0.0;
    double ck_theta = 0.0;
    double energy_omega = 0.0;  // ||sqrt M Lambda^s omega||^2
    double energy_theta = 0.0;  // interior: ||<dx>^{m1} sqrt M Lambda^m theta_neq||^2; error: ||<dx>^{1/3} sqrt M Lambda^n theta||^2
};

// Interior system uses (index m, <dx>^{m1}, prefactor delta0/2); error
// system uses (index n, <dx>^{1/3}, prefactor delta0/4, Upsilon term in theta).
CKValues ck_functionals(const SimState& state, SystemTag which, const MultiplierParams& p, const MultiplierTable& table,
                        double index, double m1 = 1.0);

struct DiagnosticsRow {
    double t = 0;
    bool long_time = false;  // t > nu^{-1/6}
    double omega0 = 0, theta0 = 0, omega_neq = 0, theta_neq = 0, u1_neq = 0, u2 = 0;
    double energy_omega = NAN, energy_theta = NAN, ck_omega = NAN, ck_theta = NAN;
    double forcing = NAN;
    double r1 = NAN, r2 = NAN;
    double wrap_fraction = 0;
};

struct DiagnosticsRecord {
    std::string system = "full";
    double nu = 0, eps0 = 0, delta0 = 0;
    std::vector<DiagnosticsRow> rows;
};

struct DiagnosticsOptions {
    const MultiplierParams* params = nullptr;  // required for weighted energies / CK
    bool weighted = false;
    bool forcing = false;     // interior system only
    double m = 6, n = 3, m1 = 1;
    double b = 2, b1 = 1;     // inviscid damping ratio indices
};

DiagnosticsRow compute_row(const SimState& state, double nu, const DiagnosticsOptions& opt);

std::string csv_header();
std::string csv_row(const DiagnosticsRow& r);

struct Envelopes {
    double c1 = 0, c2 = 0, c3 = 0;
};
Envelopes theorem_envelopes(const DiagnosticsRecord& rec, double nu, double eps0);

struct FitResult {
    double rate = 0;
    double prefactor = 0;
    double r_squared = 0;
    double t_lo = 0, t_hi = 0;
    std::size_t points = 0;
};
FitResult fit_decay_rate(const std::vector<double>& t, const std::vector<double>& v, double t_lo, double t_hi);
// Window covering the last `efoldings` e-foldings of the positive values
// above `floor` (the series may underflow to zero before the end).
std::pair<double, double> last_efoldings_window(const std::vector<double>& t, const std::vector<double>& v,
                                                double efoldings = 3.0, double floor = 1e-300);

struct DampingRatios {
    double r1 = 0, r2 = 0;
    bool degenerate = false;  // zero denominator
};
DampingRatios inviscid_damping_ratios(const SpectralField& omega_neq, double b, double b1);

double toy_growth_product(double eta);

// ||<dx> Lambda_t^n (u^i_neq . grad theta^i)||.
double forcing_norm(const SimState& interior, double n);

// Fraction of the physical L^2 energy of f in |y| > frac * Ly.
double wrap_fraction(const SpectralField& f, double frac = 0.9);

struct KReport {
    double k_min = 0;
    double k_max = 0;  // upper limit from intervals with positive theta coefficient (inf if none)
    bool feasible = true;
    std::size_t intervals = 0;
};
// Smallest K >= 0 with dE_w/dt + K nu^{-2/3} dE_th/dt + CK_w + K nu^{-2/3} CK_th <= 0
// on every output interval with t >= nu^{-1/6} (trapezoid averages of CK).
KReport smallest_K(const DiagnosticsRecord& rec);

}  // namespace shearlab
