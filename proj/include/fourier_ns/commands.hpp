#pragma once

#include "fourier_ns/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace fourier_ns {

enum ExitCode : int {
  kExitOk = 0,
  kExitNonConvergence = 2,
  kExitCheckFailure = 3,
  kExitBadConfig = 64,
};

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

/// Config file (or defaults) with the command-line overrides applied.
RunConfig resolve_config(const CommandOptions& opt);

/// Each command logs progress to `log`, errors to `err`, and returns an ExitCode.
int cmd_solve(const CommandOptions& opt, std::ostream& log, std::ostream& err);
int cmd_verify(const CommandOptions& opt, std::ostream& log, std::ostream& err);
int cmd_bootstrap(const CommandOptions& opt, std::ostream& log, std::ostream& err);
int cmd_bench(const CommandOptions& opt, std::ostream& log, std::ostream& err);

/// Dyadic shell index s with 2^s <= |xi| < 2^(s+1).
int dyadic_shell(std::int64_t norm2);

}  // namespace fourier_ns
