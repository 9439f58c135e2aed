#pragma once

#include <cstdint>
#include <vector>

#include "depthforge/types.hpp"

namespace depthforge {

// Label field for the pixels of one category. Labels are dense, assigned in
// row-major discovery order starting at 0; pixels of other categories get -1.
struct ComponentLabels {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> label;
  std::vector<std::size_t> sizes;  // indexed by label

  int count() const { return static_cast<int>(sizes.size()); }
  std::int32_t at(int x, int y) const {
    return label[static_cast<std::size_t>(y) * width + x];
  }
};

// 4-connected components of all pixels with the given category.
ComponentLabels connected_components(const SemanticCategoryMask& mask,
                                     Category which);

}  // namespace depthforge
