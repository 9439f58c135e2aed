#include "depthforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "depthforge/components.hpp"
#include "depthforge/rng.hpp"

namespace depthforge::synth {

bool Layer::covers(int px, int py) const {
  if (kind == Kind::Rect) {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  double dx = px - cx;
  double dy = py - cy;
  return dx * dx + dy * dy <= r * r;
}

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) {
    throw ConfigError("scene dimensions must be positive");
  }
  if (sky_band < 0 || sky_band > height) {
    throw ConfigError("sky_band outside [0, height]");
  }
  for (const Layer& layer : layers) {
    if (layer.category != Category::Foreground &&
        layer.category != Category::Background) {
      throw ConfigError("layers must be foreground or background");
    }
    if (layer.kind == Layer::Kind::Rect && (layer.w <= 0 || layer.h <= 0)) {
      throw ConfigError("rect layer needs positive extent");
    }
    if (layer.kind == Layer::Kind::Disc && !(layer.r > 0.0)) {
      throw ConfigError("disc layer needs positive radius");
    }
    for (int py = 0; py < height; ++py) {
      for (int px = 0; px < width; ++px) {
        if (layer.covers(px, py) && !(layer.depth.at(px, py) > 0.0)) {
          throw ConfigError("layer depth not positive over its support");
        }
      }
    }
  }
}

void NoiseSpec::validate() const {
  if (bleed_width < 0) throw ConfigError("bleed_width must be >= 0");
  if (transient_valid_fraction < 0.0 || transient_valid_fraction > 1.0) {
    throw ConfigError("transient_valid_fraction must be in [0, 1]");
  }
  if (speckle_rate < 0.0 || speckle_rate > 1.0) {
    throw ConfigError("speckle_rate must be in [0, 1]");
  }
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
}

std::pair<DepthMap, SemanticCategoryMask> render(const SceneSpec& spec) {
  spec.validate();
  DepthMap depth(spec.width, spec.height);
  SemanticCategoryMask mask(spec.width, spec.height, Category::Unknown);
  for (const Layer& layer : spec.layers) {
    for (int py = 0; py < spec.height; ++py) {
      for (int px = 0; px < spec.width; ++px) {
        if (!layer.covers(px, py)) continue;
        depth.set(px, py, static_cast<float>(layer.depth.at(px, py)));
        mask.set(px, py, layer.category);
      }
    }
  }
  for (int py = 0; py < std::min(spec.sky_band, spec.height); ++py) {
    for (int px = 0; px < spec.width; ++px) {
      mask.set(px, py, Category::Sky);
      depth.invalidate(px, py);
    }
  }
  return {std::move(depth), std::move(mask)};
}

namespace {

// Grid distance from every pixel to the nearest non-foreground pixel, along
// with that pixel's clean value. Multi-source BFS, row-major tie-breaking.
struct BleedField {
  std::vector<int> dist;          // 0 outside foreground
  std::vector<float> source_val;  // clean value of the assigned source
};

BleedField bleed_field(const DepthMap& clean,
                       const SemanticCategoryMask& mask) {
  const int w = clean.width();
  const int h = clean.height();
  const std::size_t n = clean.pixel_count();
  BleedField f;
  f.dist.assign(n, -1);
  f.source_val.assign(n, std::numeric_limits<float>::quiet_NaN());
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.at(i) != Category::Foreground) {
      f.dist[i] = 0;
      f.source_val[i] = clean.at(i);
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    std::size_t p = queue.front();
    queue.pop_front();
    int px = static_cast<int>(p % w);
    int py = static_cast<int>(p / w);
    const int nx[4] = {px - 1, px + 1, px, px};
    const int ny[4] = {py, py, py - 1, py + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
      std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
      if (f.dist[q] == -1) {
        f.dist[q] = f.dist[p] + 1;
        f.source_val[q] = f.source_val[p];
        queue.push_back(q);
      }
    }
  }
  return f;
}

}  // namespace

std::vector<DepthMap> corrupt(const DepthMap& clean,
                              const SemanticCategoryMask& mask,
                              const NoiseSpec& noise) {
  noise.validate();
  if (!mask.shape_matches(clean)) {
    throw DimensionError("depth map and mask shapes differ");
  }
  const std::size_t n = clean.pixel_count();

  // Pick the transient component: the largest foreground component, first
  // discovered wins ties.
  std::vector<std::uint8_t> transient(n, 0);
  std::vector<float> spurious(n, std::numeric_limits<float>::quiet_NaN());
  if (noise.transient_valid_fraction > 0.0) {
    ComponentLabels fg = connected_components(mask, Category::Foreground);
    if (fg.count() > 0) {
      int best = 0;
      for (int id = 1; id < fg.count(); ++id) {
        if (fg.sizes[id] > fg.sizes[best]) best = id;
      }
      std::vector<std::size_t> pixels;
      for (std::size_t i = 0; i < n; ++i) {
        if (fg.label[i] == best) {
          transient[i] = 1;
          pixels.push_back(i);
        }
      }
      // Spurious depths on a fixed share of the component, same in every
      // iteration: the transient got consistently wrong geometry.
      double lo = 1.0, hi = 10.0;
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!clean.valid(i)) continue;
        double d = clean.at(i);
        if (!any) {
          lo = hi = d;
          any = true;
        } else {
          lo = std::min(lo, d);
          hi = std::max(hi, d);
        }
      }
      std::mt19937_64 rng(mix_seed(noise.seed, "transient"));
      std::size_t want = static_cast<std::size_t>(
          std::llround(noise.transient_valid_fraction *
                       static_cast<double>(pixels.size())));
      // Partial Fisher-Yates over the component's pixel list.
      for (std::size_t k = 0; k < want && k < pixels.size(); ++k) {
        std::size_t j = k + uniform_index(rng, pixels.size() - k);
        std::swap(pixels[k], pixels[j]);
        spurious[pixels[k]] =
            static_cast<float>(uniform_range(rng, lo, hi));
      }
    }
  }

  BleedField bleed = bleed_field(clean, mask);

  std::vector<DepthMap> out;
  out.reserve(noise.iterations);
  for (int it = 0; it < noise.iterations; ++it) {
    DepthMap map = clean;

    // Transient: erase true depth, then add the spurious subset.
    for (std::size_t i = 0; i < n; ++i) {
      if (!transient[i]) continue;
      map.invalidate(i);
      if (std::isfinite(spurious[i])) map.set(i, spurious[i]);
    }

    // Bleeding band grows across iterations; the first iteration is clean.
    int band = 0;
    if (noise.bleed_width > 0) {
      band = (noise.iterations == 1)
                 ? noise.bleed_width
                 : static_cast<int>(std::llround(
                       static_cast<double>(noise.bleed_width) * it /
                       (noise.iterations - 1)));
    }
    if (band > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (transient[i]) continue;
        if (bleed.dist[i] >= 1 && bleed.dist[i] <= band) {
          map.set(i, bleed.source_val[i]);  // NaN source invalidates
        }
      }
    }

    if (noise.speckle_rate > 0.0) {
      std::mt19937_64 rng(
          mix_seed(noise.seed, "speckle/" + std::to_string(it)));
      for (std::size_t i = 0; i < n; ++i) {
        if (!map.valid(i)) continue;
        if (uniform_unit(rng) < noise.speckle_rate) {
          map.set(i, map.at(i) *
                         static_cast<float>(uniform_range(rng, 2.0, 10.0)));
        }
      }
    }
    out.push_back(std::move(map));
  }
  return out;
}

int true_ordinal(const DepthMap& clean, const OrdinalPair& pair) {
  if (!clean.in_bounds(pair.ix, pair.iy) ||
      !clean.in_bounds(pair.jx, pair.jy)) {
    throw std::invalid_argument("pair out of image bounds");
  }
  if (!clean.valid(pair.ix, pair.iy) || !clean.valid(pair.jx, pair.jy)) {
    throw std::invalid_argument("pair references an invalid pixel");
  }
  float di = clean.at(pair.ix, pair.iy);
  float dj = clean.at(pair.jx, pair.jy);
  if (di > dj) return 1;
  if (di < dj) return -1;
  return 0;
}

Preset preset(const std::string& name) {
  Preset p;
  p.name = name;
  if (name == "bleed") {
    p.scene.width = 64;
    p.scene.height = 64;
    p.scene.sky_band = 8;
    p.scene.seed = 11;
    Layer bg;
    bg.kind = Layer::Kind::Rect;
    bg.category = Category::Background;
    bg.x = 0;
    bg.y = 0;
    bg.w = 64;
    bg.h = 64;
    bg.depth = {10.0, 0.0, 0.0};
    Layer disc;
    disc.kind = Layer::Kind::Disc;
    disc.category = Category::Foreground;
    disc.cx = 32.0;
    disc.cy = 38.0;
    disc.r = 18.0;
    // Close enough to the plane that the median filter provably keeps the
    // whole scene (max relative deviation 2/8 = tolerance), far enough that
    // bleeding is a real corruption for fusion to undo.
    disc.depth = {8.0, 0.0, 0.0};
    p.scene.layers = {bg, disc};
    p.noise.bleed_width = 2;
    p.noise.iterations = 2;
    p.noise.seed = 11;
  } else if (name == "transient") {
    p.scene.width = 64;
    p.scene.height = 64;
    p.scene.sky_band = 8;
    p.scene.seed = 23;
    Layer bg;
    bg.kind = Layer::Kind::Rect;
    bg.category = Category::Background;
    bg.x = 0;
    bg.y = 0;
    bg.w = 64;
    bg.h = 64;
    bg.depth = {10.0, 0.0, 0.0};
    Layer statue;
    statue.kind = Layer::Kind::Disc;
    statue.category = Category::Foreground;
    statue.cx = 18.0;
    statue.cy = 40.0;
    statue.r = 10.0;
    statue.depth = {2.0, 0.0, 0.0};
    Layer person;  // largest foreground component -> treated as transient
    person.kind = Layer::Kind::Rect;
    person.category = Category::Foreground;
    person.x = 38;
    person.y = 30;
    person.w = 14;
    person.h = 30;
    person.depth = {1.5, 0.0, 0.0};
    p.scene.layers = {bg, statue, person};
    p.noise.transient_valid_fraction = 0.2;
    p.noise.iterations = 2;
    p.noise.seed = 23;
  } else if (name == "speckle") {
    p.scene.width = 100;
    p.scene.height = 100;
    p.scene.sky_band = 0;
    p.scene.seed = 37;
    Layer bg;
    bg.kind = Layer::Kind::Rect;
    bg.category = Category::Background;
    bg.x = 0;
    bg.y = 0;
    bg.w = 100;
    bg.h = 100;
    bg.depth = {10.0, 0.0, 0.0};
    p.scene.layers = {bg};
    p.noise.speckle_rate = 0.01;
    p.noise.iterations = 2;
    p.noise.seed = 37;
  } else if (name == "mixed") {
    p.scene.width = 96;
    p.scene.height = 96;
    p.scene.sky_band = 10;
    p.scene.seed = 51;
    Layer bg;  // ramp receding to the right
    bg.kind = Layer::Kind::Rect;
    bg.category = Category::Background;
    bg.x = 0;
    bg.y = 0;
    bg.w = 96;
    bg.h = 96;
    bg.depth = {2.5, 40.0 / 95.0, 0.0};
    Layer statue;
    statue.kind = Layer::Kind::Disc;
    statue.category = Category::Foreground;
    statue.cx = 30.0;
    statue.cy = 56.0;
    statue.r = 14.0;
    statue.depth = {4.0, 0.0, 0.0};
    Layer person;
    person.kind = Layer::Kind::Rect;
    person.category = Category::Foreground;
    person.x = 58;
    person.y = 50;
    person.w = 16;
    person.h = 40;
    person.depth = {1.5, 0.0, 0.0};
    p.scene.layers = {bg, statue, person};
    p.noise.bleed_width = 2;
    p.noise.transient_valid_fraction = 0.2;
    p.noise.speckle_rate = 0.005;
    p.noise.iterations = 3;
    p.noise.seed = 51;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return p;
}

std::vector<std::string> preset_names() {
  return {"bleed", "transient", "speckle", "mixed"};
}

}  // namespace depthforge::synth
