#pragma once

// Batch subcommands. Each reads a RunConfig, writes its artifacts under the
// output directory and prints a short summary.

#include "wpt/cli/config.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace wpt::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitValidation = 3,
    kExitNonConvergence = 4,
    kExitIo = 5,
    kExitInternal = 6,
};

inline constexpr int kSchemaVersion = 1;

struct CommandContext {
    RunConfig config;
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::ostream* log = nullptr; ///< summary lines; null silences them
};

struct CommandInfo {
    std::string_view name;
    std::string_view summary;
    std::vector<std::string_view> sections; ///< config sections the command reads
    std::function<void(const CommandContext&)> run;
    bool uses_seed = false;
};

[[nodiscard]] const std::vector<CommandInfo>& commands();
[[nodiscard]] const CommandInfo* find_command(std::string_view name);

/// Full --help body for one command: summary, artifacts, config keys.
[[nodiscard]] std::string command_help(const CommandInfo& cmd);

/// Exit status for an exception thrown by a command.
[[nodiscard]] int exit_code_for(const std::exception_ptr& error);

/// Runs the command, mapping exceptions to exit codes and messages on err.
[[nodiscard]] int run_command(const CommandInfo& cmd, const CommandContext& ctx, std::ostream& err);

} // namespace wpt::cli
