#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "depthforge/loss.hpp"
#include "depthforge/types.hpp"

namespace depthforge::fitkit {

struct FitConfig {
  enum class Init { ConstantZero, Random };

  int steps = 1000;
  double learning_rate = 0.5;
  Init init = Init::ConstantZero;
  std::uint64_t init_seed = 0;
  double init_stddev = 0.1;
  loss::LossConfig loss;
  std::optional<int> fd_check_every;

  void validate() const;
};

struct AuditResult {
  double max_rel_error = 0.0;
  std::size_t evaluated = 0;  // pixels with analytic gradient above threshold
};

struct FitResult {
  LogDepthMap fitted;
  std::vector<double> trace;  // loss at every iterate, steps + 1 entries
  std::vector<std::pair<int, double>> audits;  // (step, max rel error)
};

// Minimizes the total loss over a per-pixel log-depth grid by plain gradient
// descent. Free variables are gt's valid pixels plus any pixel referenced by
// a pair (ordinal supervision reaches where reconstruction could not).
// Throws DivergenceError when the loss stops being finite. An explicit
// initial grid overrides cfg.init when provided.
FitResult fit_log_depth(const LogDepthMap& gt,
                        const std::vector<OrdinalPair>& pairs,
                        const FitConfig& cfg,
                        const std::optional<LogDepthMap>& init_override = {});

// Central-difference check (step 1e-4) of the analytic gradient at every
// valid pred pixel. Relative error is tracked where |analytic| > 1e-8.
AuditResult finite_diff_audit(const LogDepthMap& pred, const LogDepthMap& gt,
                              const std::vector<OrdinalPair>& pairs,
                              const FitConfig& cfg);

}  // namespace depthforge::fitkit
