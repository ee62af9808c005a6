#include "guiflow/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace guiflow {

Point bbox_center(const BoundingBox& b) {
  // Floor division; matches integer midpoint of the corner sums for the
  // non-negative coordinates we deal with.
  return Point{(b.x1 + b.x2) / 2, (b.y1 + b.y2) / 2};
}

bool bbox_intersects(const BoundingBox& a, const BoundingBox& b) {
  return a.x1 <= b.x2 && b.x1 <= a.x2 && a.y1 <= b.y2 && b.y1 <= a.y2;
}

BoundingBox bbox_clamp(const BoundingBox& b, const ScreenSize& screen) {
  auto clamp = [](int v, int lo, int hi) { return std::min(std::max(v, lo), hi); };
  return BoundingBox{clamp(b.x1, 0, screen.width), clamp(b.y1, 0, screen.height),
                     clamp(b.x2, 0, screen.width), clamp(b.y2, 0, screen.height)};
}

BoundingBox bbox_expand(const BoundingBox& b, const ScreenSize& screen,
                        double frac) {
  const int dx = static_cast<int>(std::floor(frac * screen.width));
  const int dy = static_cast<int>(std::floor(frac * screen.height));
  return bbox_clamp(BoundingBox{b.x1 - dx, b.y1 - dy, b.x2 + dx, b.y2 + dy},
                    screen);
}

std::string bbox_to_string(const BoundingBox& b) {
  return "[" + std::to_string(b.x1) + "," + std::to_string(b.y1) + "][" +
         std::to_string(b.x2) + "," + std::to_string(b.y2) + "]";
}

}  // namespace guiflow
