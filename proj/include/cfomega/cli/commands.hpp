#pragma once

// Command implementations behind the cfomega executable. Each returns the
// process exit code: 0 success, 2 when every verdict is inconclusive. Errors
// propagate as cfomega::Error and map to exit code 1 in main.

#include <ostream>

#include "cfomega/cli/report_io.hpp"

namespace cfomega::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

struct AnalyzeResult {
  CriterionReport classify;
  ConditionBReport condition_b;
  OmegaVerdict omega = OmegaVerdict::inconclusive;
  bool conflict = false;
  std::vector<std::string> decided_by;
};

/// Classifier and condition B verdicts merged: decisive verdicts that
/// disagree give an inconclusive, conflicting result.
AnalyzeResult combine(CriterionReport classify, ConditionBReport condition_b);

/// Table used by `analyze` and `diagnostics`: explicit lists are truncated
/// to K, growth rules continue in the log domain past their bit cap.
ConvergentTable analysis_table(const ThetaSpec& theta, std::optional<std::size_t> depth, std::size_t fallback);

int run_analyze(const RunConfig& cfg, std::ostream& log);
int run_kim_series(const RunConfig& cfg, std::ostream& log);
int run_simulate(const RunConfig& cfg, std::ostream& log);
int run_construct_psi(const RunConfig& cfg, std::ostream& log);
int run_diagnostics(const RunConfig& cfg, std::ostream& log);

/// Dispatches on cfg.command after validating the config.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace cfomega::cli
