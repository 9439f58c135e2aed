#include "depthforge/refine.hpp"

#include <algorithm>

#include "depthforge/components.hpp"

namespace depthforge::refine {

void RefineConfig::validate() const {
  if (median_kernel < 3 || median_kernel % 2 == 0) {
    throw ConfigError("median_kernel must be odd and >= 3");
  }
  if (!(instability_rel_tol > 0.0 && instability_rel_tol <= 1.0)) {
    throw ConfigError("instability_rel_tol must be in (0, 1]");
  }
  if (!(fg_valid_threshold > 0.0 && fg_valid_threshold <= 1.0)) {
    throw ConfigError("fg_valid_threshold must be in (0, 1]");
  }
  if (min_valid_neighbors < 0) {
    throw ConfigError("min_valid_neighbors must be >= 0");
  }
}

DepthMap keep_closer_fuse(const std::vector<DepthMap>& iterations) {
  if (iterations.empty()) {
    throw DimensionError("keep_closer_fuse needs at least one map");
  }
  const DepthMap& first = iterations.front();
  for (const auto& it : iterations) {
    if (!it.same_shape(first)) {
      throw DimensionError("iteration shapes differ");
    }
  }
  DepthMap out(first.width(), first.height());
  for (std::size_t i = 0; i < first.pixel_count(); ++i) {
    float best = std::numeric_limits<float>::infinity();
    bool any = false;
    for (const auto& it : iterations) {
      if (it.valid(i)) {
        best = std::min(best, it.at(i));
        any = true;
      }
    }
    if (any) out.set(i, best);
  }
  return out;
}

DepthMap median_stabilize(const DepthMap& map, const RefineConfig& cfg) {
  cfg.validate();
  const int w = map.width();
  const int h = map.height();
  const int r = cfg.median_kernel / 2;
  DepthMap out = map;
  std::vector<float> window;
  window.reserve(static_cast<std::size_t>(cfg.median_kernel) *
                 cfg.median_kernel);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.valid(x, y)) continue;
      window.clear();
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int nx = x + dx;
          int ny = y + dy;
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          if (map.valid(nx, ny)) window.push_back(map.at(nx, ny));
        }
      }
      if (static_cast<int>(window.size()) < cfg.min_valid_neighbors ||
          window.empty()) {
        continue;
      }
      // Lower median: element floor((m-1)/2) of the sorted neighbors.
      std::size_t k = (window.size() - 1) / 2;
      std::nth_element(window.begin(), window.begin() + k, window.end());
      double med = window[k];
      double dev = std::abs(static_cast<double>(map.at(x, y)) - med) / med;
      if (dev > cfg.instability_rel_tol) out.invalidate(x, y);
    }
  }
  return out;
}

DepthMap semantic_filter(const DepthMap& map, const SemanticCategoryMask& mask,
                         const RefineConfig& cfg) {
  cfg.validate();
  if (!mask.shape_matches(map)) {
    throw DimensionError("depth map and mask shapes differ");
  }
  ComponentLabels comps = connected_components(mask, Category::Foreground);
  if (comps.count() == 0) return map;

  std::vector<std::size_t> valid_in(comps.count(), 0);
  for (std::size_t i = 0; i < map.pixel_count(); ++i) {
    std::int32_t id = comps.label[i];
    if (id >= 0 && map.valid(i)) ++valid_in[id];
  }
  std::vector<bool> discard(comps.count());
  for (int id = 0; id < comps.count(); ++id) {
    double fraction =
        static_cast<double>(valid_in[id]) / static_cast<double>(comps.sizes[id]);
    discard[id] = fraction < cfg.fg_valid_threshold;
  }
  DepthMap out = map;
  for (std::size_t i = 0; i < map.pixel_count(); ++i) {
    std::int32_t id = comps.label[i];
    if (id >= 0 && discard[id]) out.invalidate(i);
  }
  return out;
}

DepthMap remove_sky(const DepthMap& map, const SemanticCategoryMask& mask) {
  if (!mask.shape_matches(map)) {
    throw DimensionError("depth map and mask shapes differ");
  }
  DepthMap out = map;
  for (std::size_t i = 0; i < map.pixel_count(); ++i) {
    if (mask.at(i) == Category::Sky) out.invalidate(i);
  }
  return out;
}

DepthMap refine_pipeline(const std::vector<DepthMap>& iterations,
                         const SemanticCategoryMask& mask,
                         const RefineConfig& cfg) {
  DepthMap fused = keep_closer_fuse(iterations);
  DepthMap stabilized = median_stabilize(fused, cfg);
  DepthMap filtered = semantic_filter(stabilized, mask, cfg);
  return remove_sky(filtered, mask);
}

}  // namespace depthforge::refine
