#pragma once

#include "shearlab/dynamics.hpp"
#include "shearlab/grid.hpp"
#include "shearlab/initial_data.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shearlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Plain `key = value` lines, `#` starts a comment. Keys are listed in
// config_keys(); times are in units of the inverse shear rate, lengths in
// units where the x-period is 2 pi.
struct RunConfig {
    std::string mode = "simulate";

    GridSpec grid{128, 256, 16.0 * 3.14159265358979323846, 2.0 / 3.0};

    double nu = 1e-3;
    double kappa = 1e-3;  // follows nu unless set explicitly
    bool linear = false;

    double mu = 2.0 / 3.0;
    int l_max = 200;

    double m = 6, n = 3, m1 = 1;

    std::uint64_t seed = 1;
    double eps0 = 0.05;
    double amp_omega = -1;  // < 0: eps0 nu^{1/3}
    double amp_theta = -1;  // < 0: eps0 nu^{2/3}
    InitialProfile profile{};

    std::string system = "full";  // full | interior (simulate)
    double horizon = 0;  // 0: 5 nu^{-1/3}
    double output_dt = 0.5;
    StepControl step{0.5, 0.05, 0.0};

    bool envelopes = true;
    bool weighted = false;
    bool forcing = false;
    double b = 2, b1 = 1;

    std::string output_dir = "out";
    std::string prefix = "run";
    bool checkpoint = false;

    std::vector<double> scan_nu{1e-2, 3e-3, 1e-3};
    std::vector<double> scan_alpha{1.0 / 3.0};
    std::vector<double> scan_beta{2.0 / 3.0};
    std::vector<double> scan_a{0.05};
    std::vector<std::uint64_t> scan_seeds{1};
    double scan_horizon_factor = 5.0;
    double scan_gamma = 10.0;
    int scan_workers = 1;
    // Boundary search: bisect the amplitude prefactor of `scan_target`
    // (omega or theta) per viscosity, the other field held at scan.a[0].
    bool scan_bisect = false;
    std::string scan_target = "omega";
    double scan_a_lo = 1e-3, scan_a_hi = 10.0;
    double scan_tol = 0.1;

    std::size_t check_samples = 100000;
    std::uint64_t check_seed = 7;
    std::size_t identity_samples = 10000;

    double toy_eta_max = 1e12;
    int toy_points = 61;

    std::string fit_input;
    std::string fit_column = "omega_neq";
    double fit_efoldings = 3.0;
    double fit_t_lo = -1, fit_t_hi = -1;  // both >= 0 select a fixed window

    int suite_members = 50;
    int suite_nx = 64, suite_ny = 64;
    double suite_half_length_y = 4.0 * 3.14159265358979323846;
    std::uint64_t suite_seed = 11;
    double suite_b = 3, suite_d = 4;
    double suite_t_span = 10;

    double resolved_amp_omega() const;
    double resolved_amp_theta() const;
    double resolved_horizon() const;

    bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& config_keys();
const std::vector<std::string>& run_modes();

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

// Throws ConfigError with the line number and key on any problem. Overrides
// replace file values; physics.kappa follows physics.nu unless given.
RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
RunConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});
// Splits "key=value".
std::pair<std::string, std::string> split_override(const std::string& kv);
// Canonical text with every key; parse_config(config_to_text(c)) == c.
std::string config_to_text(const RunConfig& c);
// Cross-field checks; throws ConfigError.
void validate_config(const RunConfig& c);

}  // namespace shearlab
