#pragma once

#include "mlpsens/dataset.hpp"
#include "mlpsens/network.hpp"

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace mlpsens {

// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDivergence = 4;
inline constexpr int kExitUnsupported = 5;

/// Exit code for an exception escaping a subcommand.
int exit_code_for(const std::exception& e) noexcept;

/// Structured-text report: per-output measures, combined measures, input
/// ranking and the Garson/Olden baselines (or "unsupported structure").
/// `data` holds the model's inputs as raw values.
std::string build_report(const NetworkSpec& network, const Dataset& data);

/// Runs `mlpsens <subcommand> ...`; `args` excludes the program name.
/// Messages go to `err`, stdout payloads (report without --out) to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mlpsens
