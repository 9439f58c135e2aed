#pragma once

#include <vector>

#include "depthforge/types.hpp"

namespace depthforge::refine {

struct RefineConfig {
  int median_kernel = 5;           // odd window size, >= 3
  double instability_rel_tol = 0.25;
  double fg_valid_threshold = 0.5;
  int min_valid_neighbors = 3;

  void validate() const;
};

// Per-pixel minimum over all iterations' valid values. A pixel is valid in
// the output iff it is valid in at least one input.
DepthMap keep_closer_fuse(const std::vector<DepthMap>& iterations);

// Invalidates pixels whose depth deviates from the median of their valid
// window neighbors (center excluded) by more than the relative tolerance.
// Pixels with fewer than min_valid_neighbors valid neighbors are left alone.
// Surviving depth values are never altered; decisions are taken against the
// input map, not progressively.
DepthMap median_stabilize(const DepthMap& map, const RefineConfig& cfg);

// For every 4-connected foreground component: if less than fg_valid_threshold
// of its pixels hold a valid depth, all depths in the component are dropped.
// Background and unknown pixels are never touched.
DepthMap semantic_filter(const DepthMap& map, const SemanticCategoryMask& mask,
                         const RefineConfig& cfg);

// Invalidates every pixel labeled Sky.
DepthMap remove_sky(const DepthMap& map, const SemanticCategoryMask& mask);

// keep_closer_fuse -> median_stabilize -> semantic_filter -> remove_sky.
DepthMap refine_pipeline(const std::vector<DepthMap>& iterations,
                         const SemanticCategoryMask& mask,
                         const RefineConfig& cfg);

}  // namespace depthforge::refine
