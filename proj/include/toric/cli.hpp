// Config-driven command line front end: schema validation, experiment
// orchestration, CSV + JSON summary outputs. Outputs embed the resolved
// configuration so every artifact is self-describing.
#pragma once

#include <optional>
#include <string>

#include "toric/types.hpp"

namespace toric::cli {

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// Executes one subcommand; returns the process exit code. Known subcommands:
// mixed-volume, expect-roots, condition, nu-lin, nu-sparse, check-thm1,
// check-thm3, check-thm5, check-thm6, momentum-check.
int run(const std::string& subcommand, const RunOptions& opts);

// Fixed 17-significant-digit rendering used for all CSV/JSON numbers.
std::string fmt17(double x);

}  // namespace toric::cli
