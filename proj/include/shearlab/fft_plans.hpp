#pragma once

#include <fftw3.h>

namespace shearlab {

// Plans for one grid shape. Created with FFTW_UNALIGNED so the new-array
// execute interface can be used on any buffer from any thread.
struct FftPlans {
    FftPlans(int nx, int ny);
    ~FftPlans();
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    int nx;
    int ny;
    fftw_plan forward = nullptr;   // r2c
    fftw_plan backward = nullptr;  // c2r, destroys its input
};

}  // namespace shearlab
