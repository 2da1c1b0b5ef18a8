#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "skt/config.hpp"

namespace skt {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,  ///< I/O failures and anything unexpected
    kExitConfig = 2,
    kExitData = 3,
    kExitNonTermination = 4,  ///< transfer stopped at max_iterations
};

/// <output_dir>/<config_hash>-s<seed>
std::filesystem::path run_directory(const ExperimentConfig& config);

// Each command writes its files into the run directory and prints one
// key=value summary line to `out`. Artifacts a command depends on are read
// from the run directory when present and produced there otherwise.
// Commands throw ConfigError or DataError; the return value is an ExitCode.
int cmd_simulate(const ExperimentConfig& config, std::ostream& out);
int cmd_dataset(const ExperimentConfig& config, std::ostream& out);
int cmd_identify(const ExperimentConfig& config, std::ostream& out);
int cmd_transfer(const ExperimentConfig& config, std::ostream& out);
int cmd_report(const ExperimentConfig& config, std::ostream& out);

/// Human-readable summary of a trace, as written to report.txt.
std::string render_report(const TransferTrace& trace);

/// Dispatches by command name; throws std::invalid_argument for unknown names.
int run_command(std::string_view name, const ExperimentConfig& config, std::ostream& out);

/// Command-line entry point: flag parsing, config loading, dispatch, and the
/// mapping of errors to exit codes and "error[kind]: " lines on `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skt
