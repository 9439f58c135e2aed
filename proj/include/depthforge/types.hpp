#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthforge {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

// Malformed or truncated file payloads.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands whose shapes do not match.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// No mutually valid pixels where at least one is required.
class EmptyOverlapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration value outside its documented range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gradient descent produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int step)
      : std::runtime_error(what), step(step) {}
  int step;
};

// ---------------------------------------------------------------------------
// Semantic categories
// ---------------------------------------------------------------------------

enum class Category : std::uint8_t {
  Sky = 0,
  Foreground = 1,
  Background = 2,
  Unknown = 255,
};

const char* category_name(Category c);
std::optional<Category> category_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// DepthMap
// ---------------------------------------------------------------------------

// Dense per-pixel depth in arbitrary reconstruction scale. Row-major,
// top-left origin. A pixel is valid iff its stored value is finite and
// strictly positive; every invalid pixel holds a quiet NaN, so the grid
// itself is the validity mask. Construction canonicalizes: non-finite or
// non-positive inputs become NaN.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height);  // all pixels invalid

  static DepthMap from_data(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return data_.size(); }

  float at(int x, int y) const { return data_[index(x, y)]; }
  float at(std::size_t i) const { return data_[i]; }

  bool valid(int x, int y) const { return valid(index(x, y)); }
  bool valid(std::size_t i) const {
    float v = data_[i];
    return std::isfinite(v) && v > 0.0f;
  }

  // Stores the value if it is a legal depth, otherwise invalidates the pixel.
  void set(int x, int y, float depth) { set(index(x, y), depth); }
  void set(std::size_t i, float depth) {
    data_[i] = (std::isfinite(depth) && depth > 0.0f)
                   ? depth
                   : std::numeric_limits<float>::quiet_NaN();
  }

  void invalidate(int x, int y) { invalidate(index(x, y)); }
  void invalidate(std::size_t i) {
    data_[i] = std::numeric_limits<float>::quiet_NaN();
  }

  std::size_t valid_count() const;

  const std::vector<float>& data() const { return data_; }

  bool same_shape(const DepthMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// ---------------------------------------------------------------------------
// LogDepthMap
// ---------------------------------------------------------------------------

// Natural-log depths, double precision (losses and gradients live here).
// Validity mirrors DepthMap: NaN marks invalid pixels.
class LogDepthMap {
 public:
  LogDepthMap() = default;
  LogDepthMap(int width, int height);  // all pixels invalid

  static LogDepthMap from_values(int width, int height,
                                 std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return values_.size(); }

  double at(int x, int y) const { return values_[index(x, y)]; }
  double at(std::size_t i) const { return values_[i]; }

  bool valid(std::size_t i) const { return std::isfinite(values_[i]); }
  bool valid(int x, int y) const { return valid(index(x, y)); }

  void set(int x, int y, double v) { set(index(x, y), v); }
  void set(std::size_t i, double v) {
    values_[i] = std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  }

  void invalidate(std::size_t i) {
    values_[i] = std::numeric_limits<double>::quiet_NaN();
  }

  std::size_t valid_count() const;

  const std::vector<double>& values() const { return values_; }

  bool same_shape(const LogDepthMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// SemanticCategoryMask
// ---------------------------------------------------------------------------

class SemanticCategoryMask {
 public:
  SemanticCategoryMask() = default;
  SemanticCategoryMask(int width, int height,
                       Category fill = Category::Unknown);

  static SemanticCategoryMask from_codes(int width, int height,
                                         const std::vector<std::uint8_t>& codes);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return codes_.size(); }

  Category at(int x, int y) const { return codes_[index(x, y)]; }
  Category at(std::size_t i) const { return codes_[i]; }

  void set(int x, int y, Category c) { codes_[index(x, y)] = c; }
  void set(std::size_t i, Category c) { codes_[i] = c; }

  const std::vector<Category>& codes() const { return codes_; }

  bool shape_matches(const DepthMap& map) const {
    return width_ == map.width() && height_ == map.height();
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Category> codes_;
};

// ---------------------------------------------------------------------------
// CategoryMapping
// ---------------------------------------------------------------------------

// Maps raw segmentation class ids (0..149) onto the four categories.
// Unmapped ids resolve to Unknown. A raw id may be assigned at most once.
class CategoryMapping {
 public:
  CategoryMapping();

  void assign(int raw_id, Category category);  // throws ConfigError on conflict
  Category lookup(std::uint8_t raw_id) const { return table_[raw_id]; }

  SemanticCategoryMask apply(int width, int height,
                             const std::vector<std::uint8_t>& raw_ids) const;

  // Entries in assignment order, for serialization.
  const std::vector<std::pair<int, Category>>& entries() const {
    return entries_;
  }

  static constexpr int kMaxRawId = 149;

 private:
  Category table_[256];
  std::vector<std::pair<int, Category>> entries_;
};

// Best-effort default mapping for 150-class scene-parsing label maps.
// Intended to be overridden by a user-supplied mapping file.
CategoryMapping default_category_mapping();

// ---------------------------------------------------------------------------
// OrdinalPair
// ---------------------------------------------------------------------------

// A pair of pixels with a relative depth relation. relation = +1 means
// pixel i is further from the camera than pixel j, -1 the opposite.
struct OrdinalPair {
  int ix = 0;
  int iy = 0;
  int jx = 0;
  int jy = 0;
  int relation = 1;

  bool same_pixels() const { return ix == jx && iy == jy; }
};

// One CSV row: a pair tagged with its image and an optional confidence
// weight (defaults to 1).
struct OrdinalPairRow {
  std::string image_id;
  OrdinalPair pair;
  double weight = 1.0;
};

// ---------------------------------------------------------------------------
// ImageRecord
// ---------------------------------------------------------------------------

enum class Verdict : std::uint8_t { Euclidean, Ordinal, Rejected };

const char* verdict_name(Verdict v);
std::optional<Verdict> verdict_from_name(const std::string& name);

// One manifest line. Paths are relative to wherever the manifest consumer
// decides; the toolkit treats them as opaque strings. depth_path may hold a
// ';'-separated ordered list when a record feeds multi-iteration fusion.
struct ImageRecord {
  std::string image_id;
  std::string depth_path;
  std::string mask_path;
  std::optional<Verdict> curation_verdict;
  std::optional<double> valid_fraction;
  std::string provenance;
};

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

// Per-pixel natural log of valid depths; validity preserved.
LogDepthMap to_log(const DepthMap& map);

// Per-pixel exp back to linear depth; validity preserved.
DepthMap from_log(const LogDepthMap& log_map);

// (valid depth pixels not labeled Sky) / (pixels not labeled Sky).
// Returns 0 when the image is entirely sky.
double valid_fraction(const DepthMap& map, const SemanticCategoryMask& mask);

}  // namespace depthforge
