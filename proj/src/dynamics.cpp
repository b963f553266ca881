#include "shearlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace shearlab {

const char* to_string(SystemTag tag) {
    switch (tag) {
        case SystemTag::full: return "full";
        case SystemTag::interior: return "interior";
        case SystemTag::error: return "error";
    }
    return "?";
}

Velocity velocity_from_vorticity(const SpectralField& omega) {
    auto inv = [](double k, double, double xi) {
        const double d = k * k + xi * xi;
        return d > 0 ? 1.0 / d : 0.0;
    };
    // u1 = i xi omega/(k^2+xi^2), u2 = -i k omega/(k^2+xi^2).
    Velocity v;
    v.u1 = apply_imag_symbol(omega, [&](double k, double eta, double xi) { return xi * inv(k, eta, xi); });
    v.u2 = apply_imag_symbol(omega, [&](double k, double eta, double xi) { return -k * inv(k, eta, xi); });
    return v;
}

double divergence_defect(const Velocity& v) {
    const Grid& g = v.u1.grid();
    const double t = v.u1.frame_time();
    double d = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int ik = 0; ik < g.nkx(); ++ik) {
            const double k = g.kx(ik);
            const double xi = g.eta(j) - t * k;
            d = std::max(d, std::abs(cplx(0, k) * v.u1.at(ik, j) + cplx(0, xi) * v.u2.at(ik, j)));
        }
    return d;
}

namespace {

using Phys = std::vector<double>;

Phys to_phys(const SpectralField& f) { return transform_to_physical(f).v; }

SpectralField to_spec(const Phys& p, const GridPtr& g, double t) {
    SpectralField f = transform_to_spectral(p, g, t);
    apply_dealias(f);
    return f;
}

struct PhysVel {
    Phys u1, u2;
};

PhysVel phys_velocity(const SpectralField& omega) {
    const Velocity v = velocity_from_vorticity(omega);
    return {to_phys(v.u1), to_phys(v.u2)};
}

struct PhysGrad {
    Phys fx, fy;
};

PhysGrad phys_gradient(const SpectralField& f) {
    auto [gx, gy] = lab_gradient(f);
    return {to_phys(gx), to_phys(gy)};
}

// x-average of each physical row (the zero mode of a field sampled on the grid).
Phys row_mean(const Phys& u, const Grid& g) {
    Phys m(u.size());
    for (int j = 0; j < g.ny(); ++j) {
        double s = 0.0;
        const std::size_t r = static_cast<std::size_t>(j) * g.nx();
        for (int i = 0; i < g.nx(); ++i) s += u[r + i];
        s /= g.nx();
        for (int i = 0; i < g.nx(); ++i) m[r + i] = s;
    }
    return m;
}

void add_dot(Phys& acc, const Phys& a1, const Phys& a2, const PhysGrad& g) {
    kernels::for_each_index(static_cast<std::ptrdiff_t>(acc.size()), default_exec(),
                            [&](std::ptrdiff_t i) { acc[i] += a1[i] * g.fx[i] + a2[i] * g.fy[i]; });
}

SpectralField dx(const SpectralField& f) {
    return apply_imag_symbol(f, [](double k, double, double) { return k; });
}

std::vector<double> factor_table(const Grid& g, double D, double t0, double s) {
    std::vector<double> f(g.n_modes());
    kernels::for_each_index(g.ny(), default_exec(), [&](std::ptrdiff_t j) {
        for (int ik = 0; ik < g.nkx(); ++ik)
            f[g.index(ik, static_cast<int>(j))] = integrating_factor(D, g.kx(ik), g.eta(static_cast<int>(j)), t0, s);
    });
    return f;
}

void scale_by(SpectralField& f, const std::vector<double>& w) {
    auto& c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= w[i];
}

using Fields = std::vector<SpectralField>;
using Rhs = std::function<Fields(const Fields&, double)>;

// One step of the integrating-factor form of Heun's third-order method
// (c = 0, 1/3, 2/3; b = 1/4, 0, 3/4). All factors run forward in time.
Fields if_rk3(const Fields& u, const std::vector<double>& diff, double t, double dt, const Rhs& rhs) {
    const Grid& g = u.front().grid();
    const std::size_t n = u.size();
    std::vector<std::vector<double>> A(n), B(n), C(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool reuse = false;
        for (std::size_t j = 0; j < i; ++j)
            if (diff[j] == diff[i]) {
                A[i] = A[j];
                B[i] = B[j];
                C[i] = C[j];
                reuse = true;
                break;
            }
        if (reuse) continue;
        A[i] = factor_table(g, diff[i], t, dt / 3);
        B[i] = factor_table(g, diff[i], t + dt / 3, dt / 3);
        C[i] = factor_table(g, diff[i], t + 2 * dt / 3, dt / 3);
    }
    const Fields N1 = rhs(u, t);
    Fields Au(u), AN1(N1), U2(n);
    for (std::size_t i = 0; i < n; ++i) {
        scale_by(Au[i], A[i]);
        scale_by(AN1[i], A[i]);
        U2[i] = Au[i];
        U2[i].axpy(dt / 3, AN1[i]);
        U2[i].set_frame_time(t + dt / 3);
    }
    const Fields N2 = rhs(U2, t + dt / 3);
    Fields U3(n);
    for (std::size_t i = 0; i < n; ++i) {
        U3[i] = Au[i];
        U3[i].axpy(2 * dt / 3, N2[i]);
        scale_by(U3[i], B[i]);
        U3[i].set_frame_time(t + 2 * dt / 3);
    }
    const Fields N3 = rhs(U3, t + 2 * dt / 3);
    Fields out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = Au[i];
        out[i].axpy(dt / 4, AN1[i]);
        scale_by(out[i], B[i]);
        out[i].axpy(3 * dt / 4, N3[i]);
        scale_by(out[i], C[i]);
        out[i].set_frame_time(t + dt);
        enforce_reality(out[i]);
    }
    return out;
}

Fields rhs_full(const Fields& u, const PhysicsParams& phys) {
    const SpectralField& w = u[0];
    const SpectralField& th = u[1];
    SpectralField nw = dx(th);
    if (phys.linear) return {nw, SpectralField(th.grid_ptr(), th.frame_time())};
    const GridPtr& g = w.grid_ptr();
    const double t = w.frame_time();
    const PhysVel v = phys_velocity(w);
    Phys aw(g->n_points(), 0.0), at(g->n_points(), 0.0);
    add_dot(aw, v.u1, v.u2, phys_gradient(w));
    add_dot(at, v.u1, v.u2, phys_gradient(th));
    nw -= to_spec(aw, g, t);
    SpectralField nt = to_spec(at, g, t);
    nt *= -1.0;
    return {nw, nt};
}

Fields rhs_interior(const Fields& u, const PhysicsParams& phys) {
    const SpectralField& w = u[0];
    const SpectralField& th = u[1];
    SpectralField nw = dx(th);
    if (phys.linear) return {nw, SpectralField(th.grid_ptr(), th.frame_time())};
    const GridPtr& g = w.grid_ptr();
    const double t = w.frame_time();
    const PhysVel v = phys_velocity(w);
    Phys aw(g->n_points(), 0.0);
    add_dot(aw, v.u1, v.u2, phys_gradient(w));
    const Phys u10 = row_mean(v.u1, *g);
    const Phys thx = to_phys(dx(th));
    Phys at(g->n_points());
    for (std::size_t i = 0; i < at.size(); ++i) at[i] = u10[i] * thx[i];
    nw -= to_spec(aw, g, t);
    SpectralField nt = to_spec(at, g, t);
    nt *= -1.0;
    return {nw, nt};
}

// (omega_i, theta_i, omega_e, theta_e).
Fields rhs_pair(const Fields& u, const PhysicsParams& phys) {
    const SpectralField& wi = u[0];
    const SpectralField& ti = u[1];
    const SpectralField& we = u[2];
    const SpectralField& te = u[3];
    SpectralField nwi = dx(ti);
    SpectralField nwe = dx(te);
    if (phys.linear) {
        return {nwi, SpectralField(ti.grid_ptr(), ti.frame_time()), nwe,
                SpectralField(te.grid_ptr(), te.frame_time())};
    }
    const GridPtr& g = wi.grid_ptr();
    const double t = wi.frame_time();
    const std::size_t np = g->n_points();
    const PhysVel vi = phys_velocity(wi);
    const PhysVel ve = phys_velocity(we);
    const PhysGrad gwi = phys_gradient(wi), gwe = phys_gradient(we);
    const PhysGrad gti = phys_gradient(ti), gte = phys_gradient(te);
    const Phys u10 = row_mean(vi.u1, *g);
    Phys ui1n(np), us1(np), us2(np);
    for (std::size_t i = 0; i < np; ++i) {
        ui1n[i] = vi.u1[i] - u10[i];
        us1[i] = vi.u1[i] + ve.u1[i];
        us2[i] = vi.u2[i] + ve.u2[i];
    }
    // Interior: u^i . grad w^i and u^i_0 d_x th^i.
    Phys awi(np, 0.0), ati(np);
    add_dot(awi, vi.u1, vi.u2, gwi);
    for (std::size_t i = 0; i < np; ++i) ati[i] = u10[i] * gti.fx[i];
    // Error: (u^i+u^e) . grad w^e + u^e . grad w^i, and
    // u^i_neq . grad th^i + (u^i+u^e) . grad th^e + u^e . grad th^i.
    Phys awe(np, 0.0), ate(np, 0.0);
    add_dot(awe, us1, us2, gwe);
    add_dot(awe, ve.u1, ve.u2, gwi);
    add_dot(ate, ui1n, vi.u2, gti);
    add_dot(ate, us1, us2, gte);
    add_dot(ate, ve.u1, ve.u2, gti);
    nwi -= to_spec(awi, g, t);
    nwe -= to_spec(awe, g, t);
    SpectralField nti = to_spec(ati, g, t);
    SpectralField nte = to_spec(ate, g, t);
    nti *= -1.0;
    nte *= -1.0;
    return {nwi, nti, nwe, nte};
}

void check_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
}

void check_finite(const Fields& f, double t) {
    for (const auto& x : f)
        if (!x.all_finite()) throw BlowUpError(t, "non-finite coefficients at t = " + std::to_string(t));
}

SimState pack(const SpectralField& w, const SpectralField& th, double t, SystemTag tag) {
    SimState s;
    s.t = t;
    s.omega = w;
    s.theta = th;
    s.tag = tag;
    return s;
}

double lab_k_max(const Grid& g, double t) {
    const double k = g.k_retained_max();
    const double e = g.eta_retained_max() + t * k;
    return std::sqrt(k * k + e * e);
}

double max_speed(const SpectralField& omega) {
    const PhysVel v = phys_velocity(omega);
    double m = 0.0;
    for (std::size_t i = 0; i < v.u1.size(); ++i) m = std::max(m, std::hypot(v.u1[i], v.u2[i]));
    return m;
}

}  // namespace

SpectralField nonlinear_advection(const Velocity& v, const SpectralField& f) {
    require_same_grid(v.u1, f);
    if (v.u1.frame_time() != f.frame_time()) throw std::invalid_argument("nonlinear_advection: frame time mismatch");
    const GridPtr& g = f.grid_ptr();
    Phys acc(g->n_points(), 0.0);
    add_dot(acc, to_phys(v.u1), to_phys(v.u2), phys_gradient(f));
    return to_spec(acc, g, f.frame_time());
}

SimState make_state(const SpectralField& omega, const SpectralField& theta, SystemTag tag) {
    require_same_grid(omega, theta);
    SimState s = pack(omega, theta, omega.frame_time(), tag);
    s.theta.set_frame_time(s.t);
    return s;
}

double integrating_factor(double D, double k, double eta, double t0, double s) {
    const double a = eta - t0 * k;
    const double I = k * k * s + a * a * s - a * k * s * s + k * k * s * s * s / 3.0;
    return std::exp(-D * I);
}

SimState step_full(const SimState& state, const PhysicsParams& phys, double dt) {
    if (state.tag != SystemTag::full) throw std::invalid_argument("step_full: state is not a full-system state");
    check_dt(dt);
    const Fields out = if_rk3({state.omega, state.theta}, {phys.nu, phys.kappa}, state.t, dt,
                              [&](const Fields& u, double) { return rhs_full(u, phys); });
    check_finite(out, state.t + dt);
    return pack(out[0], out[1], state.t + dt, SystemTag::full);
}

SimState step_interior(const SimState& state, const PhysicsParams& phys, double dt) {
    if (state.tag != SystemTag::interior) throw std::invalid_argument("step_interior: state is not an interior state");
    check_dt(dt);
    const Fields out = if_rk3({state.omega, state.theta}, {phys.nu, phys.kappa}, state.t, dt,
                              [&](const Fields& u, double) { return rhs_interior(u, phys); });
    check_finite(out, state.t + dt);
    return pack(out[0], out[1], state.t + dt, SystemTag::interior);
}

std::pair<SimState, SimState> step_pair(const SimState& interior, const SimState& error, const PhysicsParams& phys,
                                        double dt) {
    if (interior.tag != SystemTag::interior || error.tag != SystemTag::error)
        throw std::invalid_argument("step_pair: expected (interior, error) states");
    if (interior.t != error.t) throw std::invalid_argument("step_error: interior and error times differ");
    check_dt(dt);
    const Fields out =
        if_rk3({interior.omega, interior.theta, error.omega, error.theta}, {phys.nu, phys.kappa, phys.nu, phys.kappa},
               interior.t, dt, [&](const Fields& u, double) { return rhs_pair(u, phys); });
    check_finite(out, interior.t + dt);
    return {pack(out[0], out[1], interior.t + dt, SystemTag::interior),
            pack(out[2], out[3], interior.t + dt, SystemTag::error)};
}

SimState step_error(const SimState& state, const SimState& interior, const PhysicsParams& phys, double dt) {
    return step_pair(interior, state, phys, dt).second;
}

double suggest_dt(const SimState& state, const StepControl& ctl) {
    if (ctl.dt_fixed > 0) return ctl.dt_fixed;
    const double umax = max_speed(state.omega);
    const double kl = lab_k_max(state.omega.grid(), state.t);
    if (!std::isfinite(umax)) throw BlowUpError(state.t, "non-finite velocity at t = " + std::to_string(state.t));
    if (umax * kl <= 0.0) return ctl.dt_max;
    return std::min(ctl.c_adv / (umax * kl), ctl.dt_max);
}

double suggest_dt(const SimState& a, const SimState& b, const StepControl& ctl) {
    if (ctl.dt_fixed > 0) return ctl.dt_fixed;
    SimState sum = a;
    sum.omega += b.omega;
    return suggest_dt(sum, ctl);
}

double zero_mode_momentum_residual(const SimState& prev, const SimState& mid, const SimState& next, double nu) {
    const double h2 = next.t - prev.t;
    const Velocity vp = velocity_from_vorticity(prev.omega);
    const Velocity vn = velocity_from_vorticity(next.omega);
    const Velocity vm = velocity_from_vorticity(mid.omega);
    // Coefficients of u1_0 do not depend on the frame time (k = 0).
    SpectralField dt_u = zero_mode(vn.u1);
    SpectralField u0p = zero_mode(vp.u1);
    u0p.set_frame_time(dt_u.frame_time());
    dt_u -= u0p;
    dt_u *= 1.0 / h2;
    dt_u.set_frame_time(mid.t);
    SpectralField lap = apply_real_symbol(zero_mode(vm.u1), [](double, double eta, double) { return -eta * eta; });
    lap *= nu;
    Velocity vneq{nonzero_modes(vm.u1), nonzero_modes(vm.u2)};
    SpectralField flux = zero_mode(nonlinear_advection(vneq, nonzero_modes(vm.u1)));
    SpectralField r = dt_u - lap + flux;
    const double scale = l2_norm(flux) + l2_norm(lap);
    return scale > 0 ? l2_norm(r) / scale : l2_norm(r);
}

}  // namespace shearlab
