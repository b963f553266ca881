#pragma once

#include "shearlab/grid.hpp"
#include "shearlab/kernels.hpp"

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace shearlab {

// Fourier coefficients of a real scalar field in the sheared frame.
// Coefficient (k, eta) multiplies exp(i k X + i eta Y) with X = x - t y;
// in the lab frame this is the mode (k, xi) with xi = eta - t k.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(GridPtr grid, double frame_time = 0.0);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    bool valid() const { return static_cast<bool>(grid_); }
    double frame_time() const { return t_; }
    void set_frame_time(double t) { t_ = t; }

    std::vector<cplx>& coeffs() { return c_; }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx& at(int ik, int jy) { return c_[grid_->index(ik, jy)]; }
    const cplx& at(int ik, int jy) const { return c_[grid_->index(ik, jy)]; }

    void set_zero();
    bool is_zero() const;
    bool all_finite() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    void axpy(double a, const SpectralField& x);  // this += a x

private:
    GridPtr grid_;
    double t_ = 0.0;
    std::vector<cplx> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

void require_same_grid(const SpectralField& a, const SpectralField& b);

// Symbols. xi is the lab frequency; the moving-frame eta equals xi + t k.
double lambda_t_symbol(double t, double k, double xi);
inline double lab_xi(double t, double k, double eta) { return eta - t * k; }

// Multiply each coefficient by sym(k, eta, xi) (real symbol).
template <class Sym>
SpectralField apply_real_symbol(const SpectralField& f, Sym&& sym, Exec exec = default_exec()) {
    SpectralField out(f.grid_ptr(), f.frame_time());
    const Grid& g = f.grid();
    const double t = f.frame_time();
    const auto& in = f.coeffs();
    auto& o = out.coeffs();
    kernels::for_each_index(g.ny(), exec, [&](std::ptrdiff_t j) {
        const double eta = g.eta(static_cast<int>(j));
        for (int ik = 0; ik < g.nkx(); ++ik) {
            const std::size_t idx = g.index(ik, static_cast<int>(j));
            const double k = g.kx(ik);
            o[idx] = in[idx] * sym(k, eta, eta - t * k);
        }
    });
    return out;
}

// Multiply by i * sym(k, eta, xi), sym real and odd.
template <class Sym>
SpectralField apply_imag_symbol(const SpectralField& f, Sym&& sym, Exec exec = default_exec()) {
    SpectralField out(f.grid_ptr(), f.frame_time());
    const Grid& g = f.grid();
    const double t = f.frame_time();
    const auto& in = f.coeffs();
    auto& o = out.coeffs();
    kernels::for_each_index(g.ny(), exec, [&](std::ptrdiff_t j) {
        const double eta = g.eta(static_cast<int>(j));
        for (int ik = 0; ik < g.nkx(); ++ik) {
            const std::size_t idx = g.index(ik, static_cast<int>(j));
            const double k = g.kx(ik);
            const cplx c = in[idx];
            o[idx] = cplx(-c.imag(), c.real()) * sym(k, eta, eta - t * k);
        }
    });
    return out;
}

// sqrt(Area * sum_modes mult(k) W(k,eta,xi)^2 |c|^2), computed with scaling so
// that coefficients near the underflow threshold still give a finite norm.
template <class Sym>
double weighted_l2(const SpectralField& f, Sym&& weight, Exec exec = default_exec()) {
    const Grid& g = f.grid();
    const double t = f.frame_time();
    const auto& c = f.coeffs();
    std::vector<double> w(c.size());
    const double scale = kernels::ordered_max(g.ny(), exec, [&](std::ptrdiff_t j) {
        const double eta = g.eta(static_cast<int>(j));
        double m = 0.0;
        for (int ik = 0; ik < g.nkx(); ++ik) {
            const std::size_t idx = g.index(ik, static_cast<int>(j));
            const double k = g.kx(ik);
            const double a = std::abs(weight(k, eta, eta - t * k)) * std::abs(c[idx]);
            w[idx] = a;
            if (a > m || a != a) m = a;
        }
        return m;
    });
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    const double s = kernels::ordered_sum(g.ny(), exec, [&](std::ptrdiff_t j) {
        double acc = 0.0;
        for (int ik = 0; ik < g.nkx(); ++ik) {
            const double a = w[g.index(ik, static_cast<int>(j))] / scale;
            acc += g.multiplicity(ik) * a * a;
        }
        return acc;
    });
    return scale * std::sqrt(g.area() * s);
}

double l2_norm(const SpectralField& f);
// Real inner product <f, g> in physical L^2.
double inner(const SpectralField& f, const SpectralField& g);

// Lambda_t^b: multiplies by (1 + k^2 + eta^2)^{b/2} (stationary in the moving frame).
SpectralField apply_lambda_power(const SpectralField& f, double b);
// Moving-frame gradient (d_x, d_y + t d_x): symbols (i k, i eta).
std::pair<SpectralField, SpectralField> grad_L(const SpectralField& f);
// Lab-frame gradient (d_x, d_y): symbols (i k, i (eta - t k)).
std::pair<SpectralField, SpectralField> lab_gradient(const SpectralField& f);
// Zero-mode projection P0 (k = 0 column) and its complement.
SpectralField zero_mode(const SpectralField& f);
SpectralField nonzero_modes(const SpectralField& f);
// Zero every coefficient outside the dealias mask.
void apply_dealias(SpectralField& f);
// Overwrite the k = 0 column with its conjugate-symmetric part.
void enforce_reality(SpectralField& f);
// max |c(0,-eta) - conj c(0,eta)|.
double reality_defect(const SpectralField& f);

// Real-space samples on the grid, row-major [j][i] with x_i, y_j from Grid.
struct PhysicalField {
    GridPtr grid;
    std::vector<double> v;
};

PhysicalField transform_to_physical(const SpectralField& f);
SpectralField transform_to_spectral(const PhysicalField& p, double t);
SpectralField transform_to_spectral(const std::vector<double>& v, const GridPtr& grid, double t);

// Pointwise evaluation of the physical field from a closure (x, y) -> value.
PhysicalField sample_physical(const GridPtr& grid, const std::function<double(double, double)>& fn);

// Dealiased product a * b of two fields on the same grid and frame time.
SpectralField dealiased_product(const SpectralField& a, const SpectralField& b);

}  // namespace shearlab
