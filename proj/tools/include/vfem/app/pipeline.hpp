#pragma once

// Subcommand drivers. Each one resolves the configuration, runs its pipeline
// stages and writes its artifacts into the output directory. Failures surface
// as StageError naming the stage that raised them.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vfem/app/config.hpp"

namespace vfem::app {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Strategy { Vfem, Uniform, Wu };

const char* to_string(Strategy strategy);
/// Throws ConfigError("strategy") for anything but vfem, uniform or wu.
Strategy parse_strategy(std::string_view name);

class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> annuli;
    std::optional<int> nodes;
    std::optional<int> rounds_cap;
    std::optional<int> emit_every;
    std::optional<Strategy> strategy;
};

struct CommandOptions {
    std::optional<std::filesystem::path> config_path;
    Overrides overrides;
    std::filesystem::path out_dir = "out";
    // compare only
    std::optional<int> vfem_nodes;
    std::optional<int> uniform_nodes;
    std::optional<int> wu_nodes;
    int seeds = 1;
    int workers = 1;
};

struct ResolvedRun {
    RunConfig requested;    // file values with flag overrides applied
    NetworkConfig network;  // finalized
    Strategy strategy = Strategy::Vfem;
};

/// Loads the config file (if any), applies flag overrides and validates.
ResolvedRun resolve(const CommandOptions& options);

void cmd_plan(const CommandOptions& options, std::ostream& log);
void cmd_deploy(const CommandOptions& options, std::ostream& log);
void cmd_simulate(const CommandOptions& options, std::ostream& log);
void cmd_compare(const CommandOptions& options, std::ostream& log);

}  // namespace vfem::app
