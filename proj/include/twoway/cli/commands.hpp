#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "twoway/cli/scenario_file.hpp"

namespace twoway::cli {

enum ExitCode : int { exit_ok = 0, exit_schema = 2, exit_domain = 3, exit_no_result = 4 };

struct RunOptions {
    std::string out_dir;  ///< overrides the file's output.dir; "." when both are empty
    bool dump_config = false;
    std::uint64_t seed = 1;
};

/// Reads TWOWAY_LOG (trace, debug, info, warn, error, off); default warn.
void configure_logging();

int cmd_analyze(const ScenarioFile& file, const RunOptions& opts, std::ostream& report);
int cmd_design(const ScenarioFile& file, const RunOptions& opts, std::ostream& report);
int cmd_attack(const ScenarioFile& file, const RunOptions& opts, std::ostream& report);
int cmd_simulate(const ScenarioFile& file, const RunOptions& opts, std::ostream& report);

/// Loads the config, dispatches and maps errors onto exit codes; messages go
/// to `err`.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& opts,
                std::ostream& out, std::ostream& err);

}  // namespace twoway::cli
