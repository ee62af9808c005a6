#pragma once

#include <compare>
#include <string>

namespace guiflow {

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Axis-aligned rectangle in screen pixels, corners inclusive.
// (x1,y1) is top-left, (x2,y2) bottom-right.
struct BoundingBox {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

struct ScreenSize {
  int width = 0;
  int height = 0;
  friend bool operator==(const ScreenSize&, const ScreenSize&) = default;
};

inline bool bbox_valid(const BoundingBox& b) {
  return b.x1 <= b.x2 && b.y1 <= b.y2;
}

inline int bbox_width(const BoundingBox& b) { return b.x2 - b.x1; }
inline int bbox_height(const BoundingBox& b) { return b.y2 - b.y1; }

// Integer center, halves rounded down.
Point bbox_center(const BoundingBox& b);

// Closed-rectangle overlap test: touching edges count as intersecting.
bool bbox_intersects(const BoundingBox& a, const BoundingBox& b);

// Grow the box by `frac` of the screen dimension on every side, flooring the
// fractional offsets, then clamp to [0, width] x [0, height].
BoundingBox bbox_expand(const BoundingBox& b, const ScreenSize& screen,
                        double frac);

// Clamp corners into [0, width] x [0, height].
BoundingBox bbox_clamp(const BoundingBox& b, const ScreenSize& screen);

std::string bbox_to_string(const BoundingBox& b);

}  // namespace guiflow
