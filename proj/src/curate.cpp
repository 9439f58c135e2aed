#include "depthforge/curate.hpp"

#include <algorithm>

#include "depthforge/components.hpp"
#include "depthforge/rng.hpp"

namespace depthforge::curate {

void CurateConfig::validate() const {
  if (!(euclidean_threshold > 0.0 && euclidean_threshold < 1.0)) {
    throw ConfigError("euclidean_threshold must be in (0, 1)");
  }
  if (!(min_component_fraction > 0.0 && min_component_fraction < 1.0)) {
    throw ConfigError("min_component_fraction must be in (0, 1)");
  }
  if (!(quartile_fraction > 0.0 && quartile_fraction < 1.0)) {
    throw ConfigError("quartile_fraction must be in (0, 1)");
  }
  if (pairs_per_image < 1) {
    throw ConfigError("pairs_per_image must be >= 1");
  }
}

std::size_t OrdinalRegions::f_count() const {
  std::size_t n = 0;
  for (auto v : f_ord) n += v != 0;
  return n;
}

std::size_t OrdinalRegions::b_count() const {
  std::size_t n = 0;
  for (auto v : b_ord) n += v != 0;
  return n;
}

Verdict classify_image(const DepthMap& map, const SemanticCategoryMask& mask,
                       const CurateConfig& cfg) {
  cfg.validate();
  return valid_fraction(map, mask) >= cfg.euclidean_threshold
             ? Verdict::Euclidean
             : Verdict::Ordinal;
}

OrdinalRegions extract_ordinal_regions(const DepthMap& map,
                                       const SemanticCategoryMask& mask,
                                       const CurateConfig& cfg) {
  cfg.validate();
  if (!mask.shape_matches(map)) {
    throw DimensionError("depth map and mask shapes differ");
  }
  const std::size_t n = map.pixel_count();
  OrdinalRegions regions;
  regions.width = map.width();
  regions.height = map.height();
  regions.f_ord.assign(n, 0);
  regions.b_ord.assign(n, 0);

  const double area_floor =
      cfg.min_component_fraction * static_cast<double>(n);

  ComponentLabels fg = connected_components(mask, Category::Foreground);
  std::vector<bool> fg_keep(fg.count());
  for (int id = 0; id < fg.count(); ++id) {
    fg_keep[id] = static_cast<double>(fg.sizes[id]) >= area_floor;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t id = fg.label[i];
    if (id >= 0 && fg_keep[id]) regions.f_ord[i] = 1;
  }

  // Depth range over the image's valid pixels, for the last-quartile rule.
  double d_min = 0.0, d_max = 0.0;
  bool any_depth = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!map.valid(i)) continue;
    double d = map.at(i);
    if (!any_depth) {
      d_min = d_max = d;
      any_depth = true;
    } else {
      d_min = std::min(d_min, d);
      d_max = std::max(d_max, d);
    }
  }
  if (!any_depth) return regions;  // b_ord stays empty
  const double quartile_floor =
      d_min + cfg.quartile_fraction * (d_max - d_min);

  ComponentLabels bg = connected_components(mask, Category::Background);
  std::vector<bool> bg_far(bg.count(), false);
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t id = bg.label[i];
    if (id >= 0 && map.valid(i) &&
        static_cast<double>(map.at(i)) >= quartile_floor) {
      bg_far[id] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t id = bg.label[i];
    if (id >= 0 && bg_far[id] &&
        static_cast<double>(bg.sizes[id]) >= area_floor) {
      regions.b_ord[i] = 1;
    }
  }
  return regions;
}

std::vector<OrdinalPair> sample_ordinal_pairs(const OrdinalRegions& regions,
                                              const std::string& image_id,
                                              const CurateConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> f_pixels;
  std::vector<std::size_t> b_pixels;
  const std::size_t n = regions.f_ord.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (regions.f_ord[i]) f_pixels.push_back(i);
    if (regions.b_ord[i]) b_pixels.push_back(i);
  }
  if (f_pixels.empty() || b_pixels.empty()) return {};

  std::mt19937_64 rng(mix_seed(cfg.rng_seed_base, image_id));
  std::vector<OrdinalPair> pairs;
  pairs.reserve(cfg.pairs_per_image);
  const int w = regions.width;
  for (int k = 0; k < cfg.pairs_per_image; ++k) {
    std::size_t bi = b_pixels[uniform_index(rng, b_pixels.size())];
    std::size_t fj = f_pixels[uniform_index(rng, f_pixels.size())];
    OrdinalPair p;
    p.ix = static_cast<int>(bi % w);
    p.iy = static_cast<int>(bi / w);
    p.jx = static_cast<int>(fj % w);
    p.jy = static_cast<int>(fj / w);
    p.relation = 1;  // background further than foreground
    pairs.push_back(p);
  }
  return pairs;
}

}  // namespace depthforge::curate
