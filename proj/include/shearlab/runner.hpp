#pragma once

#include "shearlab/config.hpp"

#include <ostream>
#include <string>

namespace shearlab {

enum ExitCode : int { exit_ok = 0, exit_other = 1, exit_config = 2, exit_blowup = 3, exit_io = 4 };

extern const char* const kVersion;

// Runs the configured mode, writes outputs and `<prefix>.manifest.json` into
// the output directory, and returns an exit code. Errors are reported on `log`.
int run(const RunConfig& cfg, std::ostream& log);

// Loads a config file (with overrides) and runs it. `mode` must match the
// file's mode when the file names one; `out_dir` (if nonempty) replaces
// output.dir, otherwise the SHEARLAB_OUTPUT_DIR environment variable does.
int run_from_file(const std::string& mode, const std::string& path, const ConfigOverrides& overrides,
                  const std::string& out_dir, std::ostream& log);

// Re-runs the configuration recorded in a manifest.
int replay_manifest(const std::string& manifest_path, const std::string& out_dir, std::ostream& log);

// Reads a CSV written by this tool (comment lines starting with '#' are skipped).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

}  // namespace shearlab
