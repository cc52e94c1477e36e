#pragma once

#include "config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace isolump::cli {

struct RunContext {
  ConfigNode config;
  std::filesystem::path out;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Subcommand names accepted by `run_experiment`.
const std::vector<std::string>& experiment_kinds();

/// Validates the config for `kind`, runs it and writes its files into
/// ctx.out. Throws Error(config) on bad input and numerical Errors on
/// solver failures.
void run_experiment(const std::string& kind, const RunContext& ctx);

}  // namespace isolump::cli
