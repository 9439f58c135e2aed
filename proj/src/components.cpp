#include "depthforge/components.hpp"

namespace depthforge {

ComponentLabels connected_components(const SemanticCategoryMask& mask,
                                     Category which) {
  const int w = mask.width();
  const int h = mask.height();
  ComponentLabels out;
  out.width = w;
  out.height = h;
  out.label.assign(static_cast<std::size_t>(w) * h, -1);

  std::vector<std::size_t> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::size_t seed = mask.index(x, y);
      if (mask.at(seed) != which || out.label[seed] != -1) continue;

      const std::int32_t id = out.count();
      std::size_t size = 0;
      stack.clear();
      stack.push_back(seed);
      out.label[seed] = id;
      while (!stack.empty()) {
        std::size_t p = stack.back();
        stack.pop_back();
        ++size;
        int px = static_cast<int>(p % w);
        int py = static_cast<int>(p / w);
        const int nx[4] = {px - 1, px + 1, px, px};
        const int ny[4] = {py, py, py - 1, py + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
          std::size_t q = mask.index(nx[k], ny[k]);
          if (mask.at(q) == which && out.label[q] == -1) {
            out.label[q] = id;
            stack.push_back(q);
          }
        }
      }
      out.sizes.push_back(size);
    }
  }
  return out;
}

}  // namespace depthforge
