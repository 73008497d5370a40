#pragma once

// Command dispatch for the nvisc tool. Each command writes its CSVs and a
// summary.txt into the output directory.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nvisc/config.hpp"

namespace nvisc::app {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_empty = 4;

struct Options {
    std::filesystem::path out_dir = "out";
    std::optional<double> grid_step_mev;  // overrides the config
    bool quiet = false;
};

/// For the sweep command: vary axis (T, delta or omega) over [from, to] and
/// evaluate target at each point.
struct SweepRequest {
    std::string axis;
    double from;
    double to;
    double step;
    std::string target;
};

const std::vector<std::string>& commands();

/// Runs one command. Returns exit_ok, or exit_empty when an inference finds
/// nothing (outputs are still written). Module errors propagate with the
/// command name prefixed.
int run(const std::string& command, const config::RunConfig& cfg, const Options& opts,
        const std::optional<SweepRequest>& sweep, std::ostream& log);

/// run() with exceptions mapped to exit codes and reported on err.
int run_guarded(const std::string& command, const std::filesystem::path& config_path, const Options& opts,
                const std::optional<SweepRequest>& sweep, std::ostream& log, std::ostream& err);

}  // namespace nvisc::app
