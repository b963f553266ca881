#include "shearlab/field.hpp"
#include "shearlab/fft_plans.hpp"

#include <algorithm>
#include <stdexcept>

namespace shearlab {

SpectralField::SpectralField(GridPtr grid, double frame_time)
    : grid_(std::move(grid)), t_(frame_time), c_(grid_->n_modes(), cplx(0.0, 0.0)) {}

void SpectralField::set_zero() { std::fill(c_.begin(), c_.end(), cplx(0.0, 0.0)); }

bool SpectralField::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const cplx& z) { return z == cplx(0.0, 0.0); });
}

bool SpectralField::all_finite() const {
    return std::all_of(c_.begin(), c_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!a.valid() || !b.valid() || !a.grid().same_as(b.grid()))
        throw std::invalid_argument("spectral fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& z : c_) z *= s;
    return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
    require_same_grid(*this, x);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += a * x.c_[i];
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double lambda_t_symbol(double t, double k, double xi) {
    const double e = xi + t * k;
    return std::sqrt(1.0 + k * k + e * e);
}

double l2_norm(const SpectralField& f) {
    return weighted_l2(f, [](double, double, double) { return 1.0; });
}

double inner(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f, g);
    const Grid& gr = f.grid();
    const auto& a = f.coeffs();
    const auto& b = g.coeffs();
    const double s = kernels::ordered_sum(gr.ny(), default_exec(), [&](std::ptrdiff_t j) {
        double acc = 0.0;
        for (int ik = 0; ik < gr.nkx(); ++ik) {
            const std::size_t idx = gr.index(ik, static_cast<int>(j));
            acc += gr.multiplicity(ik) * (a[idx] * std::conj(b[idx])).real();
        }
        return acc;
    });
    return gr.area() * s;
}

SpectralField apply_lambda_power(const SpectralField& f, double b) {
    if (b == 0.0) return f;
    const double h = 0.5 * b;
    return apply_real_symbol(f, [h](double k, double eta, double) { return std::pow(1.0 + k * k + eta * eta, h); });
}

std::pair<SpectralField, SpectralField> grad_L(const SpectralField& f) {
    return {apply_imag_symbol(f, [](double k, double, double) { return k; }),
            apply_imag_symbol(f, [](double, double eta, double) { return eta; })};
}

std::pair<SpectralField, SpectralField> lab_gradient(const SpectralField& f) {
    return {apply_imag_symbol(f, [](double k, double, double) { return k; }),
            apply_imag_symbol(f, [](double, double, double xi) { return xi; })};
}

SpectralField zero_mode(const SpectralField& f) {
    SpectralField out(f.grid_ptr(), f.frame_time());
    const Grid& g = f.grid();
    for (int j = 0; j < g.ny(); ++j) out.at(0, j) = f.at(0, j);
    return out;
}

SpectralField nonzero_modes(const SpectralField& f) {
    SpectralField out = f;
    const Grid& g = f.grid();
    for (int j = 0; j < g.ny(); ++j) out.at(0, j) = cplx(0.0, 0.0);
    return out;
}

void apply_dealias(SpectralField& f) {
    const Grid& g = f.grid();
    auto& c = f.coeffs();
    for (int j = 0; j < g.ny(); ++j)
        for (int ik = 0; ik < g.nkx(); ++ik)
            if (!g.retained(ik, j)) c[g.index(ik, j)] = cplx(0.0, 0.0);
}

namespace {
int partner_row(const Grid& g, int j) { return j == 0 ? 0 : g.ny() - j; }
}  // namespace

void enforce_reality(SpectralField& f) {
    const Grid& g = f.grid();
    for (int j = 0; j <= g.ny() / 2; ++j) {
        const int p = partner_row(g, j);
        const cplx a = f.at(0, j);
        const cplx b = std::conj(f.at(0, p));
        const cplx m = 0.5 * (a + b);
        f.at(0, j) = m;
        f.at(0, p) = std::conj(m);
    }
}

double reality_defect(const SpectralField& f) {
    const Grid& g = f.grid();
    double d = 0.0;
    for (int j = 0; j < g.ny(); ++j) d = std::max(d, std::abs(f.at(0, partner_row(g, j)) - std::conj(f.at(0, j))));
    return d;
}

PhysicalField transform_to_physical(const SpectralField& f) {
    const Grid& g = f.grid();
    std::vector<cplx> tmp(f.coeffs());
    // Physical rows start at y = -Ly, so mode m carries the phase (-1)^m.
    for (int j = 1; j < g.ny(); j += 2)
        for (int ik = 0; ik < g.nkx(); ++ik) tmp[g.index(ik, j)] = -tmp[g.index(ik, j)];
    PhysicalField p{f.grid_ptr(), std::vector<double>(g.n_points())};
    fftw_execute_dft_c2r(g.plans().backward, reinterpret_cast<fftw_complex*>(tmp.data()), p.v.data());
    return p;
}

SpectralField transform_to_spectral(const std::vector<double>& v, const GridPtr& grid, double t) {
    const Grid& g = *grid;
    if (v.size() != g.n_points()) throw std::invalid_argument("physical array size does not match grid");
    SpectralField f(grid, t);
    std::vector<double> in(v);
    fftw_execute_dft_r2c(g.plans().forward, in.data(), reinterpret_cast<fftw_complex*>(f.coeffs().data()));
    const double s = 1.0 / static_cast<double>(g.n_points());
    for (int j = 0; j < g.ny(); ++j) {
        const double sj = (j % 2 == 0) ? s : -s;
        for (int ik = 0; ik < g.nkx(); ++ik) f.at(ik, j) *= sj;
    }
    return f;
}

SpectralField transform_to_spectral(const PhysicalField& p, double t) {
    return transform_to_spectral(p.v, p.grid, t);
}

PhysicalField sample_physical(const GridPtr& grid, const std::function<double(double, double)>& fn) {
    const Grid& g = *grid;
    PhysicalField p{grid, std::vector<double>(g.n_points())};
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) p.v[static_cast<std::size_t>(j) * g.nx() + i] = fn(g.x(i), g.y(j));
    return p;
}

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    PhysicalField pa = transform_to_physical(a);
    const PhysicalField pb = transform_to_physical(b);
    for (std::size_t i = 0; i < pa.v.size(); ++i) pa.v[i] *= pb.v[i];
    SpectralField out = transform_to_spectral(pa, a.frame_time());
    apply_dealias(out);
    return out;
}

}  // namespace shearlab
