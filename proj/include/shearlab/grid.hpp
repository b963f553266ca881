#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace shearlab {

using cplx = std::complex<double>;

struct GridSpec {
    int nx = 128;
    int ny = 256;
    double half_length_y = 0.0;  // Ly; y in [-Ly, Ly)
    double dealias_fraction = 2.0 / 3.0;

    bool operator==(const GridSpec&) const = default;
};

struct FftPlans;

// Fourier lattice on [0, 2pi) x [-Ly, Ly) in the sheared frame.
// Coefficients use the r2c half layout: row j (y-wavenumber index) of
// nkx = nx/2 + 1 entries with k = 0 .. nx/2.
class Grid {
public:
    explicit Grid(const GridSpec& spec);
    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    const GridSpec& spec() const { return spec_; }
    int nx() const { return spec_.nx; }
    int ny() const { return spec_.ny; }
    int nkx() const { return nkx_; }
    double ly() const { return spec_.half_length_y; }
    std::size_t n_modes() const { return static_cast<std::size_t>(nkx_) * spec_.ny; }
    std::size_t n_points() const { return static_cast<std::size_t>(spec_.nx) * spec_.ny; }
    std::size_t index(int ik, int jy) const { return static_cast<std::size_t>(jy) * nkx_ + ik; }

    double kx(int ik) const { return static_cast<double>(ik); }
    // Moving-frame y-wavenumber eta_j = (pi/Ly) * m_j.
    double eta(int jy) const { return eta_[jy]; }
    int eta_index(int jy) const { return m_[jy]; }
    double eta_spacing() const { return dEta_; }
    // 1 for k = 0 and k = nx/2, 2 otherwise (conjugate partner not stored).
    double multiplicity(int ik) const { return (ik == 0 || 2 * ik == spec_.nx) ? 1.0 : 2.0; }
    bool retained(int ik, int jy) const { return mask_[index(ik, jy)] != 0; }
    double area() const { return 2.0 * 3.14159265358979323846 * 2.0 * spec_.half_length_y; }
    double x(int i) const;
    double y(int j) const;
    double k_retained_max() const { return kMax_; }
    double eta_retained_max() const { return etaMax_; }

    FftPlans& plans() const { return *plans_; }
    bool same_as(const Grid& o) const;

private:
    GridSpec spec_;
    int nkx_;
    double dEta_;
    double kMax_ = 0.0;
    double etaMax_ = 0.0;
    std::vector<double> eta_;
    std::vector<int> m_;
    std::vector<std::uint8_t> mask_;
    std::unique_ptr<FftPlans> plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int nx, int ny, double Ly, double dealias_fraction = 2.0 / 3.0);
GridPtr make_grid(const GridSpec& spec);

}  // namespace shearlab
