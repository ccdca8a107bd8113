#include "reposevol/pile_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reposevol/error.hpp"
#include "reposevol/geometry.hpp"
#include "reposevol/summation.hpp"

namespace reposevol {

PileKind parse_pile_kind(const std::string& text) {
  if (text == "cone") return PileKind::cone;
  if (text == "elongated") return PileKind::elongated;
  if (text == "reclaimed-cone") return PileKind::reclaimed_cone;
  if (text == "reclaimed-elongated") return PileKind::reclaimed_elongated;
  throw Error(ErrorCode::InvalidSpec, "unknown pile kind '" + text + "'");
}

std::string to_string(PileKind kind) {
  switch (kind) {
    case PileKind::cone: return "cone";
    case PileKind::elongated: return "elongated";
    case PileKind::reclaimed_cone: return "reclaimed-cone";
    case PileKind::reclaimed_elongated: return "reclaimed-elongated";
  }
  return "cone";
}

PileSpec PileSpec::full() const {
  PileSpec base = *this;
  if (kind == PileKind::reclaimed_cone) base.kind = PileKind::cone;
  if (kind == PileKind::reclaimed_elongated) base.kind = PileKind::elongated;
  base.bite_radius_px = 0.0;
  base.bite_offset = {};
  return base;
}

namespace {

constexpr double kPi = std::numbers::pi;

void validate(const PileSpec& spec) {
  if (!(spec.radius_px > 0.0) || !std::isfinite(spec.radius_px)) {
    throw Error(ErrorCode::InvalidSpec, "radius must be positive");
  }
  if (!(spec.ridge_len_px >= 0.0) || !std::isfinite(spec.ridge_len_px)) {
    throw Error(ErrorCode::InvalidSpec, "ridge length must be non-negative");
  }
  if (spec.n_vertices < 16) throw Error(ErrorCode::InvalidSpec, "at least 16 vertices are required");
  if (spec.reclaimed() && (!(spec.bite_radius_px > 0.0) || !std::isfinite(spec.bite_radius_px))) {
    throw Error(ErrorCode::InvalidSpec, "reclaimed piles need a positive bite radius");
  }
}

std::vector<Point> base_outline(const PileSpec& spec) {
  const double r = spec.radius_px;
  const Point c = spec.center;
  std::vector<Point> v;
  v.reserve(static_cast<std::size_t>(spec.n_vertices));
  if (!spec.elongated() || spec.ridge_len_px == 0.0) {
    for (int i = 0; i < spec.n_vertices; ++i) {
      const double a = 2.0 * kPi * i / spec.n_vertices;
      v.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    return v;
  }
  // Stadium: right cap from -90 to +90 degrees, left cap from 90 to 270.
  const double half = 0.5 * spec.ridge_len_px;
  const int right = (spec.n_vertices + 1) / 2;
  const int left = spec.n_vertices - right;
  for (int i = 0; i < right; ++i) {
    const double a = -0.5 * kPi + kPi * i / (right - 1);
    v.push_back({c.x + half + r * std::cos(a), c.y + r * std::sin(a)});
  }
  for (int i = 0; i < left; ++i) {
    const double a = 0.5 * kPi + kPi * i / (left - 1);
    v.push_back({c.x - half + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return v;
}

struct Crossing {
  std::size_t edge;  // crossing lies on edge (edge, edge + 1)
  double t;
  Point at;
  bool entering;  // walking the outline, we move into the bite here
};

std::vector<Point> cut_bite(const std::vector<Point>& base, Point center, double radius, int n_vertices) {
  const std::size_t n = base.size();
  const double r2 = radius * radius;
  auto inside = [&](Point p) {
    return (p.x - center.x) * (p.x - center.x) + (p.y - center.y) * (p.y - center.y) < r2;
  };

  std::vector<Crossing> crossings;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = base[i];
    const Point b = base[(i + 1) % n];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double fx = a.x - center.x;
    const double fy = a.y - center.y;
    const double qa = dx * dx + dy * dy;
    const double qb = 2.0 * (fx * dx + fy * dy);
    const double qc = fx * fx + fy * fy - r2;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) continue;
    const double root = std::sqrt(disc);
    // |p(t) - center|^2 - r^2 drops below zero at the smaller root.
    const std::pair<double, bool> roots[] = {{(-qb - root) / (2.0 * qa), true},
                                             {(-qb + root) / (2.0 * qa), false}};
    for (const auto& [t, entering] : roots) {
      if (t <= 0.0 || t >= 1.0) continue;
      crossings.push_back({i, t, {a.x + t * dx, a.y + t * dy}, entering});
    }
  }
  if (crossings.empty()) throw Error(ErrorCode::InvalidSpec, "bite does not intersect the base boundary");
  if (crossings.size() != 2 || crossings[0].entering == crossings[1].entering) {
    throw Error(ErrorCode::InvalidSpec, "bite must cut the base boundary in exactly two points");
  }
  for (const Point& p : base) {
    if ((p.x - center.x) * (p.x - center.x) + (p.y - center.y) * (p.y - center.y) == r2) {
      throw Error(ErrorCode::InvalidSpec, "bite circle passes exactly through an outline vertex");
    }
  }

  const Crossing& enter = crossings[0].entering ? crossings[0] : crossings[1];
  const Crossing& leave = crossings[0].entering ? crossings[1] : crossings[0];

  // Keep the outline from where it leaves the bite to where it enters again.
  std::vector<Point> out;
  out.push_back(leave.at);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t idx = (leave.edge + k) % n;
    if (inside(base[idx])) break;
    out.push_back(base[idx]);
    if (idx == enter.edge) break;
  }
  out.push_back(enter.at);

  // Close along the bite arc that runs through the pile interior.
  const double a_enter = std::atan2(enter.at.y - center.y, enter.at.x - center.x);
  const double a_leave = std::atan2(leave.at.y - center.y, leave.at.x - center.x);
  double sweep = a_leave - a_enter;
  while (sweep <= 0.0) sweep += 2.0 * kPi;  // counter-clockwise candidate
  const double mid = a_enter + 0.5 * sweep;
  const Point probe{center.x + radius * std::cos(mid), center.y + radius * std::sin(mid)};
  if (!point_in_polygon(probe, base)) sweep -= 2.0 * kPi;
  const int steps = std::max(2, static_cast<int>(std::ceil(std::abs(sweep) / (2.0 * kPi / n_vertices))));
  for (int s = 1; s < steps; ++s) {
    const double a = a_enter + sweep * s / steps;
    out.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return out;
}

}  // namespace

PileContour make_contour(const PileSpec& spec) {
  validate(spec);
  std::vector<Point> outline = base_outline(spec);
  if (spec.reclaimed()) {
    const Point bite{spec.center.x + spec.bite_offset.x, spec.center.y + spec.bite_offset.y};
    outline = cut_bite(outline, bite, spec.bite_radius_px, spec.n_vertices);
  }
  try {
    return PileContour(spec.pile_id, std::move(outline));
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
}

std::optional<double> analytic_volume(const PileSpec& spec, const GridGeometry& geometry,
                                      const ReposeAngle& angle) {
  validate(spec);
  if (spec.reclaimed()) return std::nullopt;
  const double r = spec.radius_px * geometry.pixel_size_m();
  const double ridge = spec.elongated() ? spec.ridge_len_px * geometry.pixel_size_m() : 0.0;
  return (kPi / 3.0) * r * r * r * angle.slope() + ridge * r * r * angle.slope();
}

double brute_force_volume(const PileSpec& spec, const GridGeometry& geometry, const ReposeAngle& angle,
                          int oversample) {
  if (oversample < 4) throw Error(ErrorCode::InvalidSpec, "oversample factor must be at least 4");
  const PileContour contour = make_contour(spec);
  const auto& v = contour.vertices();
  const SegmentIndex index(contour_segments(contour));
  const BoundingBox box = contour.bounds();

  const double step = 1.0 / oversample;
  const double x0 = std::floor(box.min_x);
  const double y0 = std::floor(box.min_y);
  const int nx = static_cast<int>(std::ceil(box.max_x) - x0) * oversample;
  const int ny = static_cast<int>(std::ceil(box.max_y) - y0) * oversample;

  CompensatedSum sum;
  std::vector<double> crossings;
  for (int j = 0; j < ny; ++j) {
    const double y = y0 + (j + 0.5) * step;
    crossings.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point& a = v[i];
      const Point& b = v[(i + 1) % v.size()];
      if ((a.y <= y) != (b.y <= y)) crossings.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const int first = std::max(0, static_cast<int>(std::ceil((crossings[k] - x0) / step - 0.5)));
      const int last = std::min(nx - 1, static_cast<int>(std::floor((crossings[k + 1] - x0) / step - 0.5)));
      double previous = index.nearest_distance({x0 + (first + 0.5) * step, y});
      if (first <= last) sum.add(previous);
      for (int i = first + 1; i <= last; ++i) {
        previous = index.nearest_distance({x0 + (i + 0.5) * step, y}, lipschitz_bound(previous, step));
        sum.add(previous);
      }
    }
  }
  const double cell_m = step * geometry.pixel_size_m();
  return sum.value() * angle.slope() * geometry.pixel_size_m() * cell_m * cell_m;
}

}  // namespace reposevol
