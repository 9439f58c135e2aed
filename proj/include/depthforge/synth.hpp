#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "depthforge/types.hpp"

namespace depthforge::synth {

// Depth over a primitive's support: a + b*x + c*y.
struct DepthRamp {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;

  double at(int x, int y) const { return a + b * x + c * y; }
};

struct Layer {
  enum class Kind { Rect, Disc };
  Kind kind = Kind::Rect;
  Category category = Category::Background;
  // Rect: [x, x+w) x [y, y+h). Disc: center (cx, cy), radius r.
  int x = 0, y = 0, w = 0, h = 0;
  double cx = 0.0, cy = 0.0, r = 0.0;
  DepthRamp depth;

  bool covers(int px, int py) const;
};

// Layers paint in order; later layers occlude earlier ones. The sky band
// (top rows) is labeled Sky with no depth regardless of layers.
struct SceneSpec {
  int width = 0;
  int height = 0;
  int sky_band = 0;
  std::uint64_t seed = 0;
  std::vector<Layer> layers;

  void validate() const;
};

struct NoiseSpec {
  int bleed_width = 0;              // boundary band eaten by the layer behind
  double transient_valid_fraction = 0.0;
  double speckle_rate = 0.0;        // per-pixel chance of a x U(2,10) outlier
  int iterations = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Painter's-algorithm composition. Deterministic in the spec.
std::pair<DepthMap, SemanticCategoryMask> render(const SceneSpec& spec);

// Emits `iterations` progressively corrupted copies of the clean map:
//  - the largest foreground component is treated as transient: its true
//    depths are erased everywhere and a transient_valid_fraction share of
//    its pixels gets spurious random depths instead;
//  - boundary bleeding grows with the iteration index, so the first
//    iteration keeps true values where the last one is fully bled;
//  - speckle outliers are drawn independently per iteration.
std::vector<DepthMap> corrupt(const DepthMap& clean,
                              const SemanticCategoryMask& mask,
                              const NoiseSpec& noise);

// Exact relation between two true depths: +1 if i further, -1 if closer,
// 0 on exact ties. Throws on invalid pixels.
int true_ordinal(const DepthMap& clean, const OrdinalPair& pair);

struct Preset {
  std::string name;
  SceneSpec scene;
  NoiseSpec noise;
};

// Standard fixtures: "bleed", "transient", "speckle", "mixed".
Preset preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace depthforge::synth
