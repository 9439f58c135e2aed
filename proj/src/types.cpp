#include "depthforge/types.hpp"

#include <utility>

namespace depthforge {

const char* category_name(Category c) {
  switch (c) {
    case Category::Sky:
      return "SKY";
    case Category::Foreground:
      return "FOREGROUND";
    case Category::Background:
      return "BACKGROUND";
    case Category::Unknown:
      return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<Category> category_from_name(const std::string& name) {
  if (name == "SKY") return Category::Sky;
  if (name == "FOREGROUND") return Category::Foreground;
  if (name == "BACKGROUND") return Category::Background;
  if (name == "UNKNOWN") return Category::Unknown;
  return std::nullopt;
}

DepthMap::DepthMap(int width, int height)
    : width_(width),
      height_(height),
      data_(static_cast<std::size_t>(width) * height,
            std::numeric_limits<float>::quiet_NaN()) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("DepthMap dimensions must be positive");
  }
}

DepthMap DepthMap::from_data(int width, int height, std::vector<float> data) {
  DepthMap map(width, height);
  if (data.size() != map.pixel_count()) {
    throw DimensionError("DepthMap payload length does not match shape");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    map.set(i, data[i]);
  }
  return map;
}

std::size_t DepthMap::valid_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (valid(i)) ++n;
  }
  return n;
}

LogDepthMap::LogDepthMap(int width, int height)
    : width_(width),
      height_(height),
      values_(static_cast<std::size_t>(width) * height,
              std::numeric_limits<double>::quiet_NaN()) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("LogDepthMap dimensions must be positive");
  }
}

LogDepthMap LogDepthMap::from_values(int width, int height,
                                     std::vector<double> values) {
  LogDepthMap map(width, height);
  if (values.size() != map.pixel_count()) {
    throw DimensionError("LogDepthMap payload length does not match shape");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    map.set(i, values[i]);
  }
  return map;
}

std::size_t LogDepthMap::valid_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (valid(i)) ++n;
  }
  return n;
}

SemanticCategoryMask::SemanticCategoryMask(int width, int height, Category fill)
    : width_(width),
      height_(height),
      codes_(static_cast<std::size_t>(width) * height, fill) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("SemanticCategoryMask dimensions must be positive");
  }
}

SemanticCategoryMask SemanticCategoryMask::from_codes(
    int width, int height, const std::vector<std::uint8_t>& codes) {
  SemanticCategoryMask mask(width, height);
  if (codes.size() != mask.pixel_count()) {
    throw DimensionError("mask payload length does not match shape");
  }
  for (std::size_t i = 0; i < codes.size(); ++i) {
    switch (codes[i]) {
      case 0:
        mask.codes_[i] = Category::Sky;
        break;
      case 1:
        mask.codes_[i] = Category::Foreground;
        break;
      case 2:
        mask.codes_[i] = Category::Background;
        break;
      case 255:
        mask.codes_[i] = Category::Unknown;
        break;
      default:
        throw FormatError("unknown category code " +
                          std::to_string(int(codes[i])));
    }
  }
  return mask;
}

CategoryMapping::CategoryMapping() {
  for (auto& c : table_) c = Category::Unknown;
}

void CategoryMapping::assign(int raw_id, Category category) {
  if (raw_id < 0 || raw_id > kMaxRawId) {
    throw ConfigError("raw class id " + std::to_string(raw_id) +
                      " outside [0, " + std::to_string(kMaxRawId) + "]");
  }
  Category current = table_[raw_id];
  if (current != Category::Unknown && current != category) {
    throw ConfigError("raw class id " + std::to_string(raw_id) +
                      " mapped to two categories");
  }
  if (current == category) return;
  table_[raw_id] = category;
  entries_.emplace_back(raw_id, category);
}

SemanticCategoryMask CategoryMapping::apply(
    int width, int height, const std::vector<std::uint8_t>& raw_ids) const {
  SemanticCategoryMask mask(width, height);
  if (raw_ids.size() != mask.pixel_count()) {
    throw DimensionError("raw semantic payload length does not match shape");
  }
  for (std::size_t i = 0; i < raw_ids.size(); ++i) {
    mask.set(i, table_[raw_ids[i]]);
  }
  return mask;
}

CategoryMapping default_category_mapping() {
  CategoryMapping m;
  // Sky.
  m.assign(2, Category::Sky);
  // Transient or hard-to-reconstruct foreground objects.
  for (int id : {12, 17, 19, 20, 43, 66, 69, 76, 80, 83, 87, 92, 93,
                 98, 102, 103, 104, 108, 114, 115, 116, 119, 120, 125, 126,
                 127, 132, 135, 136, 137, 138, 148, 149}) {
    m.assign(id, Category::Foreground);
  }
  // Static scene structure.
  for (int id : {0, 1, 3, 4, 6, 9, 11, 13, 16, 21, 25, 26, 29, 32,
                 34, 42, 46, 48, 51, 52, 53, 54, 60, 61, 68, 72, 79, 84,
                 86, 88, 91, 94, 95, 96, 101, 106, 113, 121, 128, 140}) {
    m.assign(id, Category::Background);
  }
  return m;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Euclidean:
      return "EUCLIDEAN";
    case Verdict::Ordinal:
      return "ORDINAL";
    case Verdict::Rejected:
      return "REJECTED";
  }
  return "REJECTED";
}

std::optional<Verdict> verdict_from_name(const std::string& name) {
  if (name == "EUCLIDEAN") return Verdict::Euclidean;
  if (name == "ORDINAL") return Verdict::Ordinal;
  if (name == "REJECTED") return Verdict::Rejected;
  return std::nullopt;
}

LogDepthMap to_log(const DepthMap& map) {
  LogDepthMap out(map.width(), map.height());
  for (std::size_t i = 0; i < map.pixel_count(); ++i) {
    if (map.valid(i)) {
      out.set(i, std::log(static_cast<double>(map.at(i))));
    }
  }
  return out;
}

DepthMap from_log(const LogDepthMap& log_map) {
  DepthMap out(log_map.width(), log_map.height());
  for (std::size_t i = 0; i < log_map.pixel_count(); ++i) {
    if (log_map.valid(i)) {
      out.set(i, static_cast<float>(std::exp(log_map.at(i))));
    }
  }
  return out;
}

double valid_fraction(const DepthMap& map, const SemanticCategoryMask& mask) {
  if (!mask.shape_matches(map)) {
    throw DimensionError("depth map and mask shapes differ");
  }
  std::size_t non_sky = 0;
  std::size_t valid = 0;
  for (std::size_t i = 0; i < map.pixel_count(); ++i) {
    if (mask.at(i) == Category::Sky) continue;
    ++non_sky;
    if (map.valid(i)) ++valid;
  }
  if (non_sky == 0) return 0.0;
  return static_cast<double>(valid) / static_cast<double>(non_sky);
}

}  // namespace depthforge
