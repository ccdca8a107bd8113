#include "reposevol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reposevol/error.hpp"

namespace reposevol {

// ---------------------------------------------------------------------------
// SegmentIndex

namespace {

constexpr std::uint32_t kLeafSize = 4;

BoundingBox segment_box(const Segment& s) noexcept {
  return {std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y), std::max(s.a.x, s.b.x), std::max(s.a.y, s.b.y)};
}

BoundingBox merge(const BoundingBox& l, const BoundingBox& r) noexcept {
  return {std::min(l.min_x, r.min_x), std::min(l.min_y, r.min_y), std::max(l.max_x, r.max_x),
          std::max(l.max_y, r.max_y)};
}

double box_distance_sq(Point p, const BoundingBox& box) noexcept {
  const double dx = std::max({box.min_x - p.x, 0.0, p.x - box.max_x});
  const double dy = std::max({box.min_y - p.y, 0.0, p.y - box.max_y});
  return dx * dx + dy * dy;
}

}  // namespace

SegmentIndex::SegmentIndex(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) return;
  nodes_.reserve(2 * segments_.size() / kLeafSize + 2);
  nodes_.emplace_back();
  build(0, 0, static_cast<std::uint32_t>(segments_.size()));
}

// Fills nodes_[node] with segments_[begin, end). Children of an inner node
// are stored next to each other.
void SegmentIndex::build(std::uint32_t node, std::uint32_t begin, std::uint32_t end) {
  BoundingBox box = segment_box(segments_[begin]);
  for (std::uint32_t i = begin + 1; i < end; ++i) box = merge(box, segment_box(segments_[i]));
  nodes_[node] = {box, begin, end - begin};
  if (end - begin <= kLeafSize) return;

  const bool split_x = box.max_x - box.min_x >= box.max_y - box.min_y;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(segments_.begin() + begin, segments_.begin() + mid, segments_.begin() + end,
                   [split_x](const Segment& l, const Segment& r) {
                     return split_x ? l.a.x + l.b.x < r.a.x + r.b.x : l.a.y + l.b.y < r.a.y + r.b.y;
                   });
  const auto children = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_.emplace_back();
  nodes_[node].first = children;
  nodes_[node].count = 0;
  build(children, begin, mid);
  build(children + 1, mid, end);
}

double SegmentIndex::nearest_distance(Point p) const noexcept {
  return nearest_distance(p, std::numeric_limits<double>::infinity());
}

double SegmentIndex::nearest_distance(Point p, double upper_bound) const noexcept {
  double best = upper_bound * upper_bound;
  if (nodes_.empty()) return upper_bound;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_distance_sq(p, node.box) >= best) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        best = std::min(best, point_segment_distance_sq(p, segments_[i].a, segments_[i].b));
      }
      continue;
    }
    const std::uint32_t l = node.first;
    const std::uint32_t r = node.first + 1;
    // Push the farther child first so the nearer one is explored first.
    if (box_distance_sq(p, nodes_[l].box) <= box_distance_sq(p, nodes_[r].box)) {
      stack[top++] = r;
      stack[top++] = l;
    } else {
      stack[top++] = l;
      stack[top++] = r;
    }
  }
  return std::sqrt(best);
}

double lipschitz_bound(double previous, double step) noexcept {
  return (previous + step) * (1.0 + 1e-12) + 1e-12;
}

// ---------------------------------------------------------------------------
// Polygon distances

namespace {

// Distance is 1-Lipschitz, so the left neighbour's value bounds the search.
void fill_row_distances(const RasterMask& inside, const SegmentIndex& index, DistanceField& field) {
  for (int y = 0; y < field.height(); ++y) {
    double previous = std::numeric_limits<double>::infinity();
    for (int x = 0; x < field.width(); ++x) {
      if (!inside.at(x, y)) {
        previous = std::numeric_limits<double>::infinity();
        continue;
      }
      const double d = std::isfinite(previous)
                           ? index.nearest_distance({x + 0.5, y + 0.5}, lipschitz_bound(previous, 1.0))
                           : index.nearest_distance({x + 0.5, y + 0.5});
      field.at(x, y) = d;
      previous = d;
    }
  }
}

}  // namespace

std::vector<Segment> contour_segments(const PileContour& contour) {
  const auto& v = contour.vertices();
  std::vector<Segment> segments;
  segments.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) segments.push_back({v[i], v[(i + 1) % v.size()]});
  return segments;
}

double point_to_contour_distance(Point point, const PileContour& contour) {
  if (!point_in_polygon(point, contour.vertices())) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : contour_segments(contour)) {
    best = std::min(best, point_segment_distance(point, s.a, s.b));
  }
  return best;
}

DistanceField polygon_distance_field(const PileContour& contour, int width, int height) {
  const RasterMask inside = rasterize(contour, width, height);
  const SegmentIndex index(contour_segments(contour));
  DistanceField field(width, height, 0.0);
  fill_row_distances(inside, index, field);
  return field;
}

// ---------------------------------------------------------------------------
// Raster distance transform

namespace {

// Lower envelope of the parabolas (x - q)^2 + f[q]; writes the minimum at
// every x into out. All f values must be finite.
void lower_envelope_1d(std::span<const std::int64_t> f, std::span<std::int64_t> out,
                       std::vector<int>& hull, std::vector<double>& bounds) {
  const int n = static_cast<int>(f.size());
  hull.assign(static_cast<std::size_t>(n), 0);
  bounds.assign(static_cast<std::size_t>(n) + 1, 0.0);
  auto intersect = [&](int q, int v) {
    const double num = static_cast<double>((f[q] + std::int64_t{q} * q) - (f[v] + std::int64_t{v} * v));
    return num / (2.0 * (q - v));
  };
  int k = 0;
  hull[0] = 0;
  bounds[0] = -std::numeric_limits<double>::infinity();
  bounds[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, hull[k]);
    while (s <= bounds[k]) {
      --k;
      s = intersect(q, hull[k]);
    }
    ++k;
    hull[k] = q;
    bounds[k] = s;
    bounds[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int x = 0; x < n; ++x) {
    while (bounds[k + 1] < x) ++k;
    const std::int64_t d = x - hull[k];
    out[x] = d * d + f[hull[k]];
  }
}

}  // namespace

Grid<std::int64_t> squared_distance_transform(const RasterMask& mask) {
  const int width = mask.width();
  const int height = mask.height();

  // Vertical pass: distance to the nearest unset cell in the same column,
  // with rows -1 and height acting as unset.
  Grid<std::int64_t> column(width, height, 0);
  for (int x = 0; x < width; ++x) {
    int last = -1;
    for (int y = 0; y < height; ++y) {
      if (!mask.at(x, y)) last = y;
      column.at(x, y) = y - last;
    }
    last = height;
    for (int y = height - 1; y >= 0; --y) {
      if (!mask.at(x, y)) last = y;
      column.at(x, y) = std::min<std::int64_t>(column.at(x, y), last - y);
    }
  }

  // Horizontal pass over a row padded with one unset cell on each side.
  Grid<std::int64_t> result(width, height, 0);
  std::vector<std::int64_t> f(static_cast<std::size_t>(width) + 2);
  std::vector<std::int64_t> out(f.size());
  std::vector<int> hull;
  std::vector<double> bounds;
  for (int y = 0; y < height; ++y) {
    f.front() = 0;
    f.back() = 0;
    for (int x = 0; x < width; ++x) {
      const std::int64_t g = column.at(x, y);
      f[static_cast<std::size_t>(x) + 1] = g * g;
    }
    lower_envelope_1d(f, out, hull, bounds);
    auto row = result.row(y);
    std::copy(out.begin() + 1, out.end() - 1, row.begin());
  }
  return result;
}

DistanceField distance_transform(const RasterMask& mask) {
  const Grid<std::int64_t> squared = squared_distance_transform(mask);
  DistanceField field(mask.width(), mask.height(), 0.0);
  const auto src = squared.values();
  auto dst = field.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::sqrt(static_cast<double>(src[i]));
  return field;
}

// ---------------------------------------------------------------------------
// Outline distances

std::vector<Segment> mask_outline_segments(const RasterMask& mask) {
  std::vector<Segment> segments;
  // Each cell joins the pixel centers (x, y), (x+1, y), (x+1, y+1), (x, y+1)
  // for x in [-1, width) and y in [-1, height).
  for (int y = -1; y < mask.height(); ++y) {
    for (int x = -1; x < mask.width(); ++x) {
      const bool tl = mask.at_or_background(x, y);
      const bool tr = mask.at_or_background(x + 1, y);
      const bool br = mask.at_or_background(x + 1, y + 1);
      const bool bl = mask.at_or_background(x, y + 1);
      if (tl == tr && tr == br && br == bl) continue;
      const Point top{x + 1.0, y + 0.5};
      const Point right{x + 1.5, y + 1.0};
      const Point bottom{x + 1.0, y + 1.5};
      const Point left{x + 0.5, y + 1.0};
      if (tl == br && tr == bl) {
        // Saddle: cut off each set corner on its own.
        if (tl) {
          segments.push_back({top, left});
          segments.push_back({bottom, right});
        } else {
          segments.push_back({top, right});
          segments.push_back({bottom, left});
        }
        continue;
      }
      Point ends[2];
      int n = 0;
      if (tl != tr) ends[n++] = top;
      if (tr != br) ends[n++] = right;
      if (br != bl) ends[n++] = bottom;
      if (bl != tl) ends[n++] = left;
      segments.push_back({ends[0], ends[1]});
    }
  }
  return segments;
}

DistanceField outline_distance_field(const RasterMask& mask) {
  DistanceField field(mask.width(), mask.height(), 0.0);
  const SegmentIndex index(mask_outline_segments(mask));
  if (index.size() == 0) return field;
  fill_row_distances(mask, index, field);
  return field;
}

}  // namespace reposevol
