#pragma once

#include "shearlab/field.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace shearlab {

enum class SystemTag { full, interior, error };
const char* to_string(SystemTag tag);

struct Velocity {
    SpectralField u1;
    SpectralField u2;
    // Zero-mode part of u1 (function of y only).
    SpectralField u1_zero() const { return zero_mode(u1); }
};

// psi = -omega/(k^2 + xi^2), u = (-d_y psi, d_x psi) with lab symbols; the
// (0,0) mode of psi is set to zero.
Velocity velocity_from_vorticity(const SpectralField& omega);
double divergence_defect(const Velocity& v);

// Dealiased pseudospectral u . grad f (lab-frame gradient).
SpectralField nonlinear_advection(const Velocity& v, const SpectralField& f);

struct PhysicsParams {
    double nu = 1e-3;
    double kappa = 1e-3;
    bool linear = false;  // drop every advection term, keep buoyancy
};

struct SimState {
    double t = 0.0;
    SpectralField omega;
    SpectralField theta;
    SystemTag tag = SystemTag::full;
};

SimState make_state(const SpectralField& omega, const SpectralField& theta, SystemTag tag);

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, const std::string& what) : std::runtime_error(what), time(t) {}
    double time;
};

// exp(-D int_{t0}^{t0+s} (k^2 + (eta - tau k)^2) dtau).
double integrating_factor(double D, double k, double eta, double t0, double s);

SimState step_full(const SimState& state, const PhysicsParams& phys, double dt);
SimState step_interior(const SimState& state, const PhysicsParams& phys, double dt);
// Advances the error system; the interior stages are recomputed internally
// from `interior`, which must sit at the same time.
SimState step_error(const SimState& state, const SimState& interior, const PhysicsParams& phys, double dt);
// Co-steps interior and error with shared stages. Returns (interior, error).
std::pair<SimState, SimState> step_pair(const SimState& interior, const SimState& error, const PhysicsParams& phys,
                                        double dt);

struct StepControl {
    double c_adv = 0.5;
    double dt_max = 0.01;
    double dt_fixed = 0.0;  // > 0 disables the adaptive rule

    bool operator==(const StepControl&) const = default;
};

// dt = min(c_adv / (max|u| k_lab), dt_max), k_lab the largest retained lab
// wavenumber magnitude at the state's time.
double suggest_dt(const SimState& state, const StepControl& ctl);
double suggest_dt(const SimState& a, const SimState& b, const StepControl& ctl);

// Residual of the zero-mode momentum balance of the interior system,
//   d_t u1_0 - nu d_yy u1_0 + P0(u_neq . grad u1_neq),
// with d_t by central differences over (prev, next) around `mid`. Returned
// relative to ||P0(u_neq . grad u1_neq)|| + ||nu d_yy u1_0||.
double zero_mode_momentum_residual(const SimState& prev, const SimState& mid, const SimState& next, double nu);

}  // namespace shearlab
