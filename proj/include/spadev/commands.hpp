#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "spadev/config.hpp"

namespace spadev {

/// synth, import, convert, train-features, sweep, evaluate, demo-ratio, datarate
const std::vector<std::string>& command_names();

struct CommandResult {
  std::filesystem::path out;
  std::string summary;  // one or two human-readable lines
};

/// Runs a subcommand. Outputs are staged and moved into config `out` only on
/// success; every run also writes run.json with the resolved configuration.
/// Progress lines go to `log` when given.
CommandResult run_command(const std::string& name, const Config& config, std::ostream* log = nullptr);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spadev
