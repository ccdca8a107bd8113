#include "reposevol/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reposevol/error.hpp"

namespace reposevol {
namespace {

double cross(Point o, Point a, Point b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation(Point o, Point a, Point b) noexcept {
  const double c = cross(o, a, b);
  return (c > 0.0) - (c < 0.0);
}

bool on_segment(Point p, Point a, Point b) noexcept {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point a, Point b, Point c, Point d) noexcept {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(c, a, b)) return true;
  if (o2 == 0 && on_segment(d, a, b)) return true;
  if (o3 == 0 && on_segment(a, c, d)) return true;
  if (o4 == 0 && on_segment(b, c, d)) return true;
  return false;
}

}  // namespace

double signed_area(const std::vector<Point>& vertices) noexcept {
  const std::size_t n = vertices.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

bool point_in_polygon(Point p, const std::vector<Point>& vertices) noexcept {
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = vertices[i];
    const Point& b = vertices[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

void require_simple(const std::vector<Point>& vertices) {
  const std::size_t n = vertices.size();
  if (n < 4) return;

  struct Edge {
    std::size_t index;
    double lo;
    double hi;
  };
  std::vector<Edge> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % n];
    edges[i] = {i, std::min(a.x, b.x), std::max(a.x, b.x)};
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) { return l.lo < r.lo; });

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = edges[k].index;
    const Point a = vertices[i];
    const Point b = vertices[(i + 1) % n];
    for (std::size_t m = k + 1; m < n && edges[m].lo <= edges[k].hi; ++m) {
      const std::size_t j = edges[m].index;
      const Point c = vertices[j];
      const Point d = vertices[(j + 1) % n];
      const bool next = (i + 1) % n == j;
      const bool prev = (j + 1) % n == i;
      if (next || prev) {
        // Consecutive edges share one vertex; they are only bad when they fold
        // back over each other.
        const Point shared = next ? b : a;
        const Point p = next ? a : b;
        const Point q = next ? d : c;
        if (orientation(shared, p, q) == 0 &&
            (p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y) > 0.0) {
          throw Error(ErrorCode::SelfIntersecting,
                      "edges " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
        continue;
      }
      if (segments_touch(a, b, c, d)) {
        throw Error(ErrorCode::SelfIntersecting,
                    "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      }
    }
  }
}

double point_segment_distance_sq(Point p, Point a, Point b) noexcept {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = p.x - (a.x + t * dx);
  const double ey = p.y - (a.y + t * dy);
  return ex * ex + ey * ey;
}

double point_segment_distance(Point p, Point a, Point b) noexcept {
  return std::sqrt(point_segment_distance_sq(p, a, b));
}

PileContour::PileContour(std::string pile_id, std::vector<Point> vertices)
    : pile_id_(std::move(pile_id)), vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(ErrorCode::DegeneratePolygon,
                "pile '" + pile_id_ + "' has " + std::to_string(vertices_.size()) + " vertices");
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[(i + 1) % vertices_.size()];
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
      throw Error(ErrorCode::DegeneratePolygon, "pile '" + pile_id_ + "' has a non-finite vertex");
    }
    if (a == b) {
      throw Error(ErrorCode::DegeneratePolygon,
                  "pile '" + pile_id_ + "' repeats vertex " + std::to_string(i));
    }
  }
  // All vertices on one line is degenerate; any other zero-area outline
  // (a bowtie with balanced lobes) crosses itself and is reported as such.
  const Point& o = vertices_[0];
  bool collinear = true;
  for (std::size_t i = 2; i < vertices_.size() && collinear; ++i) {
    const Point& a = vertices_[i - 1];
    const Point& b = vertices_[i];
    collinear = (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x) == 0.0;
  }
  if (collinear) throw Error(ErrorCode::DegeneratePolygon, "pile '" + pile_id_ + "' has collinear vertices");
  require_simple(vertices_);
  if (!(std::abs(signed_area(vertices_)) > 0.0)) {
    throw Error(ErrorCode::DegeneratePolygon, "pile '" + pile_id_ + "' encloses zero area");
  }
}

double PileContour::area() const noexcept { return std::abs(signed_area(vertices_)); }

Point PileContour::centroid() const noexcept {
  const std::size_t n = vertices_.size();
  double cx = 0.0;
  double cy = 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = vertices_[i];
    const Point& b = vertices_[(i + 1) % n];
    const double w = a.x * b.y - b.x * a.y;
    twice += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (3.0 * twice), cy / (3.0 * twice)};
}

BoundingBox PileContour::bounds() const noexcept {
  BoundingBox box{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
  for (const Point& p : vertices_) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  return box;
}

PileContour PileContour::translated(double dx, double dy) const {
  std::vector<Point> moved = vertices_;
  for (Point& p : moved) {
    p.x += dx;
    p.y += dy;
  }
  return {pile_id_, std::move(moved)};
}

PileContour PileContour::scaled_about(Point origin, double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidPerturbation, "scale factor must be positive");
  }
  std::vector<Point> moved = vertices_;
  for (Point& p : moved) {
    p.x = origin.x + (p.x - origin.x) * factor;
    p.y = origin.y + (p.y - origin.y) * factor;
  }
  return {pile_id_, std::move(moved)};
}

}  // namespace reposevol
