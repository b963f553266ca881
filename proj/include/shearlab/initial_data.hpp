#pragma once

#include "shearlab/field.hpp"

#include <cstdint>

namespace shearlab {

// Random band-limited, y-localized profile:
//   sum_{k<=kx_max, p<=degree} (a cos kX + b sin kX) (Y/width)^p exp(-Y^2/(2 width^2)),
// coefficients uniform in [-1, 1], x-mean removed with a Gaussian so the
// field stays localized. The draw does not depend on the grid.
struct InitialProfile {
    double width = 2.0;
    int kx_max = 3;
    int degree = 3;

    bool operator==(const InitialProfile&) const = default;
};

struct InitialData {
    SpectralField omega;
    SpectralField theta;
    int redraws = 0;  // zero draws that had to be replaced
};

// H^m norm with Lambda_0 weights: ||(1+k^2+eta^2)^{m/2} f||.
double hm_norm(const SpectralField& f, double m);
// ||<d_x> f||_{H^m}.
double dx_hm_norm(const SpectralField& f, double m);

InitialData make_initial_data(const GridPtr& grid, std::uint64_t seed, double amp_omega, double amp_theta, double m,
                              const InitialProfile& profile = {});

}  // namespace shearlab
