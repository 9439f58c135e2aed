#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depthforge/types.hpp"

namespace depthforge::curate {

struct CurateConfig {
  double euclidean_threshold = 0.3;
  double min_component_fraction = 0.05;  // area floor for "large" components
  double quartile_fraction = 0.75;
  int pairs_per_image = 1;
  std::uint64_t rng_seed_base = 0;

  void validate() const;
};

// Pixel sets a pair sampler draws from: far background vs foreground.
struct OrdinalRegions {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> f_ord;  // 1 where the pixel belongs to f_ord
  std::vector<std::uint8_t> b_ord;

  bool in_f(int x, int y) const {
    return f_ord[static_cast<std::size_t>(y) * width + x] != 0;
  }
  bool in_b(int x, int y) const {
    return b_ord[static_cast<std::size_t>(y) * width + x] != 0;
  }
  std::size_t f_count() const;
  std::size_t b_count() const;
};

// Euclidean iff the non-sky valid-depth fraction reaches the threshold.
Verdict classify_image(const DepthMap& map, const SemanticCategoryMask& mask,
                       const CurateConfig& cfg);

// f_ord: foreground components covering at least min_component_fraction of
// the image. b_ord: background components passing the same floor that also
// hold at least one valid depth in the last quartile of the image's valid
// depth range. Either set may come out empty.
OrdinalRegions extract_ordinal_regions(const DepthMap& map,
                                       const SemanticCategoryMask& mask,
                                       const CurateConfig& cfg);

// pairs_per_image pairs, pixel_i uniform over b_ord and pixel_j uniform over
// f_ord, relation fixed at +1. Deterministic in (rng_seed_base, image_id).
// Returns an empty list when either region is empty.
std::vector<OrdinalPair> sample_ordinal_pairs(const OrdinalRegions& regions,
                                              const std::string& image_id,
                                              const CurateConfig& cfg);

}  // namespace depthforge::curate
