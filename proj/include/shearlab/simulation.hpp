#pragma once

#include "shearlab/diagnostics.hpp"

#include <functional>

namespace shearlab {

struct RunControl {
    StepControl step{};
    double horizon = 10.0;
    double output_dt = 0.5;
};

// Steps a full or interior state to exactly t_end. Throws BlowUpError.
SimState advance(SimState s, const PhysicsParams& phys, const StepControl& ctl, double t_end,
                 std::size_t* steps = nullptr);

// Full- or interior-system run with a diagnostics row at t = 0 and every
// output_dt (the last row sits at the horizon). `on_output` sees each sampled
// state with its row, so a caller keeps the partial record if the run blows up.
struct SimulationResult {
    DiagnosticsRecord record;
    SimState final_state;
    std::size_t steps = 0;
};
SimulationResult simulate(const SimState& s0, const PhysicsParams& phys, const RunControl& rc,
                          const DiagnosticsOptions& diag, const std::function<void(const SimState&, const DiagnosticsRow&)>& on_output = {});

// Co-stepped direct and decomposed runs from the same data: the interior
// system carries the data, the error system starts at zero.
struct DecompositionRow {
    double t = 0;
    double residual_omega = 0;  // ||(w^i + w^e) - w|| / ||w||
    double residual_theta = 0;  // same for theta (0 when theta vanishes)
    double omega = 0, omega_interior = 0, omega_error = 0;
};
struct DecompositionResult {
    std::vector<DecompositionRow> rows;
    DiagnosticsRecord full, interior, error;
    SimState final_full, final_interior, final_error;
    double max_residual = 0;  // over rows, omega and theta
    std::size_t steps = 0;
};
DecompositionResult run_decomposition(const SpectralField& omega0, const SpectralField& theta0,
                                      const PhysicsParams& phys, const RunControl& rc, const DiagnosticsOptions& diag);

std::string decomposition_csv_header();
std::string decomposition_csv_row(const DecompositionRow& r);

}  // namespace shearlab
