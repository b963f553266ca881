#include "shearlab/grid.hpp"
#include "shearlab/fft_plans.hpp"
#include "shearlab/kernels.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace shearlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

Exec g_exec = Exec::parallel;

}  // namespace

Exec default_exec() { return g_exec; }
void set_default_exec(Exec e) { g_exec = e; }

FftPlans::FftPlans(int nx, int ny) : nx(nx), ny(ny) {
    const std::size_t nr = static_cast<std::size_t>(nx) * ny;
    const std::size_t nc = static_cast<std::size_t>(nx / 2 + 1) * ny;
    double* r = fftw_alloc_real(nr);
    fftw_complex* c = fftw_alloc_complex(nc);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_dft_r2c_2d(ny, nx, r, c, flags);
        backward = fftw_plan_dft_c2r_2d(ny, nx, c, r, flags);
    }
    fftw_free(r);
    fftw_free(c);
    if (!forward || !backward) throw std::runtime_error("fftw planning failed");
}

FftPlans::~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
    if (!is_power_of_two(spec.nx) || spec.nx < 16)
        throw std::invalid_argument("grid: nx must be a power of two >= 16, got " + std::to_string(spec.nx));
    if (!is_power_of_two(spec.ny) || spec.ny < 16)
        throw std::invalid_argument("grid: ny must be a power of two >= 16, got " + std::to_string(spec.ny));
    if (!(spec.half_length_y > 0.0) || !std::isfinite(spec.half_length_y))
        throw std::invalid_argument("grid: half_length_y must be positive");
    if (!(spec.dealias_fraction > 0.0 && spec.dealias_fraction <= 1.0))
        throw std::invalid_argument("grid: dealias_fraction must lie in (0, 1]");

    nkx_ = spec.nx / 2 + 1;
    dEta_ = M_PI / spec.half_length_y;
    eta_.resize(spec.ny);
    m_.resize(spec.ny);
    for (int j = 0; j < spec.ny; ++j) {
        m_[j] = (j <= spec.ny / 2) ? j : j - spec.ny;
        eta_[j] = dEta_ * m_[j];
    }
    const double kcut = spec.dealias_fraction * spec.nx / 2.0;
    const double mcut = spec.dealias_fraction * spec.ny / 2.0;
    mask_.assign(n_modes(), 0);
    for (int j = 0; j < spec.ny; ++j) {
        for (int ik = 0; ik < nkx_; ++ik) {
            // Nyquist rows/columns are dropped: their conjugate partners alias.
            const bool keep = ik <= kcut && std::abs(m_[j]) <= mcut && 2 * ik != spec.nx && 2 * m_[j] != spec.ny;
            mask_[index(ik, j)] = keep ? 1 : 0;
            if (keep) {
                kMax_ = std::max(kMax_, static_cast<double>(ik));
                etaMax_ = std::max(etaMax_, std::abs(eta_[j]));
            }
        }
    }
    plans_ = std::make_unique<FftPlans>(spec.nx, spec.ny);
}

Grid::~Grid() = default;

double Grid::x(int i) const { return 2.0 * M_PI * i / spec_.nx; }
double Grid::y(int j) const { return -spec_.half_length_y + 2.0 * spec_.half_length_y * j / spec_.ny; }

bool Grid::same_as(const Grid& o) const {
    return this == &o || (spec_.nx == o.spec_.nx && spec_.ny == o.spec_.ny &&
                          spec_.half_length_y == o.spec_.half_length_y &&
                          spec_.dealias_fraction == o.spec_.dealias_fraction);
}

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

GridPtr make_grid(int nx, int ny, double Ly, double dealias_fraction) {
    return make_grid(GridSpec{nx, ny, Ly, dealias_fraction});
}

}  // namespace shearlab
