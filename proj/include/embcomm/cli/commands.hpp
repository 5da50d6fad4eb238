#pragma once

#include "embcomm/cli/config.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace embcomm::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitInvariant = 2,
    kExitIo = 3,
};

int cmd_field(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_codebook(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_bounds(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_lstar(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Validates the config, dispatches by name and maps exceptions to exit codes.
int run_command(const std::string& name, const RunConfig& cfg, const std::filesystem::path& out,
                std::ostream& log, std::ostream& err);

} // namespace embcomm::cli
