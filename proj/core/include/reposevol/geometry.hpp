#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reposevol/grid.hpp"
#include "reposevol/mask_io.hpp"
#include "reposevol/polygon.hpp"

namespace reposevol {

/// Per-pixel distance (in pixels) from a pile pixel to the pile boundary;
/// zero on background pixels.
using DistanceField = Grid<double>;

struct Segment {
  Point a;
  Point b;
};

/// Bounding-volume hierarchy over segments answering exact nearest-segment
/// distance queries by branch and bound.
class SegmentIndex {
 public:
  explicit SegmentIndex(std::vector<Segment> segments);

  double nearest_distance(Point p) const noexcept;
  /// Same result, but only segments closer than `upper_bound` are searched;
  /// the caller guarantees the true distance is strictly below it.
  double nearest_distance(Point p, double upper_bound) const noexcept;
  std::size_t size() const noexcept { return segments_.size(); }

 private:
  struct Node {
    BoundingBox box;
    std::uint32_t first = 0;  // leaf: first segment; inner: left child (right child is first + 1)
    std::uint32_t count = 0;  // segments in a leaf, 0 for inner nodes
  };

  void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end);

  std::vector<Segment> segments_;
  std::vector<Node> nodes_;
};

/// Strict upper bound for the distance at a point `step` away from one whose
/// distance is `previous`, padded against rounding.
double lipschitz_bound(double previous, double step) noexcept;

std::vector<Segment> contour_segments(const PileContour& contour);

/// Distance from `point` to the nearest point of the contour polyline, or 0
/// when the point is outside the polygon or on its boundary.
double point_to_contour_distance(Point point, const PileContour& contour);

/// Exact squared Euclidean distance transform between pixel centers: each set
/// pixel receives the squared distance to the nearest unset pixel center,
/// where the ring of cells just outside the grid counts as unset.
Grid<std::int64_t> squared_distance_transform(const RasterMask& mask);

/// Square root of squared_distance_transform().
DistanceField distance_transform(const RasterMask& mask);

/// For every pixel center inside the contour, the exact distance to the
/// contour polyline; zero elsewhere.
DistanceField polygon_distance_field(const PileContour& contour, int width, int height);

/// Iso-contour at level 1/2 of the mask sampled at pixel centers (marching
/// squares, with the ring of cells outside the grid counted as unset). Vertices
/// sit halfway between a set and an unset pixel center; at diagonal saddles the
/// set pixels are kept apart. This is the polygon a mask-to-contour tracer
/// would hand back for the mask.
std::vector<Segment> mask_outline_segments(const RasterMask& mask);

/// For every set pixel, the distance from its center to the mask's traced
/// outline (mask_outline_segments); zero elsewhere.
DistanceField outline_distance_field(const RasterMask& mask);

}  // namespace reposevol
