#include <doctest.h>

#include "guiflow/geometry.hpp"

using namespace guiflow;

TEST_CASE("bbox_center floors both midpoints") {
  CHECK(bbox_center({273, 84, 324, 180}) == Point{298, 132});
  CHECK(bbox_center({0, 0, 3, 3}) == Point{1, 1});
  CHECK(bbox_center({0, 0, 0, 0}) == Point{0, 0});
  CHECK(bbox_center({2, 2, 2, 2}) == Point{2, 2});
}

TEST_CASE("bbox_intersects treats shared edges and corners as overlap") {
  const BoundingBox a{10, 10, 20, 20};
  CHECK(bbox_intersects(a, {20, 20, 30, 30}));
  CHECK(bbox_intersects(a, {0, 0, 10, 10}));
  CHECK(bbox_intersects(a, {12, 12, 18, 18}));
  CHECK_FALSE(bbox_intersects(a, {21, 10, 30, 20}));
  CHECK_FALSE(bbox_intersects(a, {10, 21, 20, 30}));
}

TEST_CASE("bbox_intersects is symmetric") {
  const BoundingBox a{0, 0, 5, 5};
  const BoundingBox b{3, 3, 9, 9};
  CHECK(bbox_intersects(a, b) == bbox_intersects(b, a));
}

TEST_CASE("bbox_expand floors the fractional margins and clamps to screen") {
  const ScreenSize screen{720, 1280};
  // 0.14 * 720 = 100.8 -> 100, 0.14 * 1280 = 179.2 -> 179.
  const BoundingBox grown = bbox_expand({200, 200, 300, 300}, screen, 0.14);
  CHECK(grown == BoundingBox{100, 21, 400, 479});
  const BoundingBox clamped = bbox_expand({10, 10, 715, 1275}, screen, 0.14);
  CHECK(clamped == BoundingBox{0, 0, 720, 1280});
}

TEST_CASE("bbox_expand with zero margin is the identity inside the screen") {
  const BoundingBox b{5, 6, 7, 8};
  CHECK(bbox_expand(b, {720, 1280}, 0.0) == b);
}

TEST_CASE("bbox_clamp pins corners into the screen rectangle") {
  CHECK(bbox_clamp({-5, -5, 9999, 40}, {720, 1280}) ==
        BoundingBox{0, 0, 720, 40});
}

TEST_CASE("bbox_to_string renders the corner-pair form") {
  CHECK(bbox_to_string({1, 2, 3, 4}) == "[1,2][3,4]");
}

TEST_CASE("bbox_valid rejects inverted corners") {
  CHECK(bbox_valid({0, 0, 0, 0}));
  CHECK_FALSE(bbox_valid({5, 0, 4, 9}));
  CHECK_FALSE(bbox_valid({0, 5, 9, 4}));
}
