#pragma once

#include "shearlab/diagnostics.hpp"
#include "shearlab/initial_data.hpp"

#include <string>
#include <vector>

namespace shearlab {

enum class LemmaSuite { transport, reaction, zero_mode_commutator, nonzero_commutator, l1 };
const char* to_string(LemmaSuite s);
std::vector<LemmaSuite> all_lemma_suites();

struct EnsembleConfig {
    double nu = 1e-2;
    double mu = 2.0 / 3.0;
    int nx = 64, ny = 64;
    double half_length_y = 4.0 * 3.14159265358979323846;
    int members = 50;
    std::uint64_t seed = 11;
    double b = 3.0;  // b > 2
    double d = 4.0;  // d >= b (transport suite)
    // Member times: [0, t_span] for the short-time suites, and
    // [nu^{-1/6}, nu^{-1/6} + t_span] for the two suites that need t >= nu^{-1/6}.
    double t_span = 10.0;
    InitialProfile profile{};
};

struct LemmaSample {
    double t = 0, lhs = 0, rhs = 0, ratio = 0;
};

struct SuiteReport {
    LemmaSuite suite = LemmaSuite::transport;
    std::vector<LemmaSample> samples;
    double max_ratio = 0;
    double mean_ratio = 0;
    bool finite = true;
};

// One member: |LHS| and the constant-free RHS of the lemma for fields (w, f, g)
// sharing a frame time. `table` must cover the retained modes at that time
// (unused by the transport and L1 suites).
LemmaSample evaluate_lemma(LemmaSuite s, const SpectralField& w, const SpectralField& f, const SpectralField& g,
                           const MultiplierParams& p, const MultiplierTable* table, double b, double d);

SuiteReport run_inequality_suite(LemmaSuite s, const EnsembleConfig& cfg, const MultiplierParams& p);
std::vector<SuiteReport> run_inequality_suites(const EnsembleConfig& cfg, const MultiplierParams& p);

}  // namespace shearlab
