#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "depthforge/types.hpp"

namespace depthforge::metrics {

struct MetricConfig {
  double delta = 0.1;        // same-depth tolerance for ord()
  double whdr_delta = 0.1;   // tolerance when scoring human pairs
  std::uint64_t sdr_max_pairs = 1000000;
  std::uint64_t rng_seed = 0;
  std::optional<double> depth_cap;  // drop GT depths above this, if set
  bool align_scale = false;

  void validate() const;
};

struct SdrResult {
  double sdr = 0.0;
  double sdr_eq = 0.0;   // 0 with n_eq == 0 when no same-depth GT pairs
  double sdr_neq = 0.0;
  std::uint64_t n = 0;
  std::uint64_t n_eq = 0;
  std::uint64_t n_neq = 0;
};

struct StandardMetrics {
  double rms = 0.0;
  double rms_log = 0.0;
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double log10 = 0.0;
  std::size_t n_pixels = 0;
  double scale = 1.0;  // alignment factor that was applied
};

struct MetricReport {
  std::optional<double> si_rmse;
  std::optional<double> sdr;
  std::optional<double> sdr_eq;
  std::optional<double> sdr_neq;
  std::optional<double> whdr;
  std::optional<double> rms;
  std::optional<double> rms_log;
  std::optional<double> abs_rel;
  std::optional<double> sq_rel;
  std::optional<double> log10;
  std::uint64_t n_pairs = 0;
  std::uint64_t n_pairs_eq = 0;
  std::uint64_t n_pairs_neq = 0;
  std::size_t n_pixels = 0;
  double scale = 1.0;
};

// Least-squares scale: argmin_s sum (s pred_i - gt_i)^2 over mutually valid
// pixels, i.e. sum(pred*gt) / sum(pred^2).
double align_scale(const DepthMap& pred, const DepthMap& gt);

// sqrt of the residual-variance loss in log depth; invariant to scaling
// either map by a positive constant.
double si_rmse(const DepthMap& pred, const DepthMap& gt);

// Three-way depth relation: +1 further, -1 closer, 0 inside the tolerance
// band (boundaries included in the band).
int ord(double a, double b, double delta);

// Disagreement rates against ordinal relations derived from (typically
// sparse) reference depths. All unordered mutually-valid pixel pairs are
// scored; above sdr_max_pairs a seeded uniform sample without replacement
// is used instead.
SdrResult sdr(const DepthMap& pred, const DepthMap& sfm_gt,
              const MetricConfig& cfg);

// Weighted disagreement rate against labeled pairs (weights default to 1).
double whdr(const DepthMap& pred, const std::vector<OrdinalPairRow>& rows,
            const MetricConfig& cfg);

// rms / rms(log) / abs rel / sq rel / log10 over mutually valid pixels,
// after the optional GT depth cap and optional least-squares alignment.
StandardMetrics standard_metrics(const DepthMap& pred, const DepthMap& gt,
                                 const MetricConfig& cfg);

}  // namespace depthforge::metrics
