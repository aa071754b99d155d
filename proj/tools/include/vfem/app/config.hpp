#pragma once

// JSON run configuration. Every key is optional; omitted keys keep the stock
// values. A manifest written by a previous run is also accepted, in which case
// its "config" object and strategy are replayed.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "vfem/core.hpp"
#include "vfem/sim.hpp"

namespace vfem::app {

struct RunConfig {
    NetworkConfig network;  // not finalized: d0 / delta_l may still be 0 (auto)
    SimOptions sim;
    std::optional<std::string> strategy;
};

RunConfig default_run_config();

/// Parses a config document. Throws ConfigError naming the offending key;
/// the key is "document" when the text is not valid JSON.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

/// Config object with every key spelled out, in the units load_config reads.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace vfem::app
