#pragma once

#include <cstddef>
#include <vector>

namespace shearlab {

// Execution policy for the data-parallel loops. `serial` is the reference
// path used by tests; `parallel` distributes rows over OpenMP threads.
// Reductions always accumulate one partial per row and sum the partials in
// row order, so both paths give bit-identical results.
enum class Exec { serial, parallel };

Exec default_exec();
void set_default_exec(Exec e);

namespace kernels {

template <class F>
void for_each_index(std::ptrdiff_t n, Exec exec, F&& body) {
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

// Sum of row_sum(i) for i in [0, n), deterministic in the order of i.
template <class F>
double ordered_sum(std::ptrdiff_t n, Exec exec, F&& row_sum) {
    std::vector<double> part(static_cast<std::size_t>(n));
    for_each_index(n, exec, [&](std::ptrdiff_t i) { part[i] = row_sum(i); });
    double s = 0.0;
    for (double p : part) s += p;
    return s;
}

// Max of row_max(i), NaN-propagating.
template <class F>
double ordered_max(std::ptrdiff_t n, Exec exec, F&& row_max) {
    std::vector<double> part(static_cast<std::size_t>(n));
    for_each_index(n, exec, [&](std::ptrdiff_t i) { part[i] = row_max(i); });
    double m = 0.0;
    bool first = true;
    for (double p : part) {
        if (p != p) return p;
        if (first || p > m) m = p;
        first = false;
    }
    return m;
}

}  // namespace kernels
}  // namespace shearlab
