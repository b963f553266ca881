#include "shearlab/simulation.hpp"

#include <cstdio>
#include <stdexcept>

namespace shearlab {

namespace {

void check_control(const RunControl& rc) {
    if (!(rc.horizon >= 0.0)) throw std::invalid_argument("run control: horizon must be >= 0");
    if (!(rc.output_dt > 0.0)) throw std::invalid_argument("run control: output_dt must be > 0");
}

// Output times 0, h, 2h, ..., horizon (computed as i*h to avoid drift).
std::vector<double> output_times(const RunControl& rc) {
    std::vector<double> ts{0.0};
    for (std::size_t i = 1;; ++i) {
        const double t = static_cast<double>(i) * rc.output_dt;
        if (t >= rc.horizon * (1.0 - 1e-12)) break;
        ts.push_back(t);
    }
    if (rc.horizon > 0.0) ts.push_back(rc.horizon);
    return ts;
}

// The step that lands on t_end if the suggested step nearly reaches it.
double clip(double dt, double t, double t_end) {
    const double rest = t_end - t;
    if (dt >= rest * (1.0 - 1e-9)) return rest;
    return dt;
}

void pin_time(SimState& s, double t) {
    s.t = t;
    s.omega.set_frame_time(t);
    s.theta.set_frame_time(t);
}

double rel(const SpectralField& sum, const SpectralField& ref) {
    const double r = l2_norm(ref);
    const double d = l2_norm(sum - ref);
    return r > 0 ? d / r : d;
}

}  // namespace

SimState advance(SimState s, const PhysicsParams& phys, const StepControl& ctl, double t_end, std::size_t* steps) {
    if (s.tag == SystemTag::error) throw std::invalid_argument("advance: error states need their interior partner");
    while (s.t < t_end) {
        const double dt = clip(suggest_dt(s, ctl), s.t, t_end);
        const bool last = dt == t_end - s.t;
        s = s.tag == SystemTag::full ? step_full(s, phys, dt) : step_interior(s, phys, dt);
        if (steps) ++*steps;
        if (last) pin_time(s, t_end);
    }
    return s;
}

SimulationResult simulate(const SimState& s0, const PhysicsParams& phys, const RunControl& rc,
                          const DiagnosticsOptions& diag, const std::function<void(const SimState&, const DiagnosticsRow&)>& on_output) {
    check_control(rc);
    if (s0.t != 0.0) throw std::invalid_argument("simulate: initial state must sit at t = 0");
    SimulationResult res;
    res.record.system = to_string(s0.tag);
    res.record.nu = phys.nu;
    res.record.delta0 = diag.params ? diag.params->delta0 : 0.0;
    SimState s = s0;
    for (double t : output_times(rc)) {
        s = advance(std::move(s), phys, rc.step, t, &res.steps);
        res.record.rows.push_back(compute_row(s, phys.nu, diag));
        if (on_output) on_output(s, res.record.rows.back());
    }
    res.final_state = std::move(s);
    return res;
}

DecompositionResult run_decomposition(const SpectralField& omega0, const SpectralField& theta0,
                                      const PhysicsParams& phys, const RunControl& rc, const DiagnosticsOptions& diag) {
    check_control(rc);
    DecompositionResult res;
    SimState full = make_state(omega0, theta0, SystemTag::full);
    SimState in = make_state(omega0, theta0, SystemTag::interior);
    SimState er = make_state(SpectralField(omega0.grid_ptr(), 0.0), SpectralField(omega0.grid_ptr(), 0.0),
                             SystemTag::error);
    for (DiagnosticsRecord* r : {&res.full, &res.interior, &res.error}) {
        r->nu = phys.nu;
        r->delta0 = diag.params ? diag.params->delta0 : 0.0;
    }
    res.full.system = "full";
    res.interior.system = "interior";
    res.error.system = "error";
    for (double t_out : output_times(rc)) {
        while (full.t < t_out) {
            double dt = std::min(suggest_dt(full, rc.step), suggest_dt(in, er, rc.step));
            dt = clip(dt, full.t, t_out);
            const bool last = dt == t_out - full.t;
            full = step_full(full, phys, dt);
            auto pr = step_pair(in, er, phys, dt);
            in = std::move(pr.first);
            er = std::move(pr.second);
            ++res.steps;
            if (last) {
                pin_time(full, t_out);
                pin_time(in, t_out);
                pin_time(er, t_out);
            }
        }
        DecompositionRow row;
        row.t = t_out;
        row.residual_omega = rel(in.omega + er.omega, full.omega);
        row.residual_theta = rel(in.theta + er.theta, full.theta);
        row.omega = l2_norm(full.omega);
        row.omega_interior = l2_norm(in.omega);
        row.omega_error = l2_norm(er.omega);
        res.max_residual = std::max({res.max_residual, row.residual_omega, row.residual_theta});
        res.rows.push_back(row);
        res.full.rows.push_back(compute_row(full, phys.nu, diag));
        res.interior.rows.push_back(compute_row(in, phys.nu, diag));
        res.error.rows.push_back(compute_row(er, phys.nu, diag));
    }
    res.final_full = std::move(full);
    res.final_interior = std::move(in);
    res.final_error = std::move(er);
    return res;
}

std::string decomposition_csv_header() {
    return "t,residual_omega,residual_theta,omega,omega_interior,omega_error";
}

std::string decomposition_csv_row(const DecompositionRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t, r.residual_omega, r.residual_theta,
                  r.omega, r.omega_interior, r.omega_error);
    return buf;
}

}  // namespace shearlab
