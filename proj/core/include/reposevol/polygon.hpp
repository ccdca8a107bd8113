#pragma once

#include <string>
#include <vector>

namespace reposevol {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

/// Closed, simple polygon outlining one pile footprint in pixel coordinates.
///
/// The last vertex connects implicitly to the first. Construction validates
/// the polygon: at least three vertices, no zero-length edges, non-zero area
/// and no self-intersections. Once built, a contour is immutable.
class PileContour {
 public:
  PileContour(std::string pile_id, std::vector<Point> vertices);

  const std::string& pile_id() const noexcept { return pile_id_; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }

  /// Unsigned enclosed area in px².
  double area() const noexcept;
  Point centroid() const noexcept;
  BoundingBox bounds() const noexcept;

  PileContour translated(double dx, double dy) const;
  PileContour scaled_about(Point origin, double factor) const;

  bool operator==(const PileContour&) const = default;

 private:
  std::string pile_id_;
  std::vector<Point> vertices_;
};

double signed_area(const std::vector<Point>& vertices) noexcept;

// Even-odd crossing test with half-open edges: a point on a left or top edge
// is inside, a point on a right or bottom edge is outside. Rasterization uses
// the same rule, so both agree on ties.
bool point_in_polygon(Point p, const std::vector<Point>& vertices) noexcept;

/// Throws SelfIntersecting when any two edges touch other than at a shared
/// vertex of consecutive edges.
void require_simple(const std::vector<Point>& vertices);

double point_segment_distance(Point p, Point a, Point b) noexcept;
double point_segment_distance_sq(Point p, Point a, Point b) noexcept;

}  // namespace reposevol
