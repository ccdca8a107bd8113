#pragma once

#include <optional>
#include <string>

#include "reposevol/mask_io.hpp"
#include "reposevol/polygon.hpp"
#include "reposevol/volume.hpp"

namespace reposevol {

enum class PileKind { cone, elongated, reclaimed_cone, reclaimed_elongated };

PileKind parse_pile_kind(const std::string& text);
std::string to_string(PileKind kind);

/// Parameters of a synthetic pile footprint, all in pixels.
///
/// Elongated piles are stadiums: two semicircular caps of `radius_px` joined by
/// a straight ridge of `ridge_len_px` along the x axis, so the total length is
/// ridge_len_px + 2 * radius_px. Reclaimed kinds remove a circular bite of
/// `bite_radius_px` centered at `bite_offset` (relative to the pile center),
/// which must cut the base outline in exactly two points.
struct PileSpec {
  PileKind kind = PileKind::cone;
  double radius_px = 0.0;
  double ridge_len_px = 0.0;
  double bite_radius_px = 0.0;
  Point bite_offset{};
  int n_vertices = 256;
  Point center{};
  std::string pile_id = "pile";

  bool reclaimed() const noexcept {
    return kind == PileKind::reclaimed_cone || kind == PileKind::reclaimed_elongated;
  }
  bool elongated() const noexcept {
    return kind == PileKind::elongated || kind == PileKind::reclaimed_elongated;
  }
  /// The same spec without the reclaim bite.
  PileSpec full() const;
};

PileContour make_contour(const PileSpec& spec);

/// Closed-form volume of the full pile, with the footprint taken as an exact
/// circle/stadium. Reclaimed kinds have no closed form and return nullopt.
std::optional<double> analytic_volume(const PileSpec& spec, const GridGeometry& geometry,
                                      const ReposeAngle& angle);

/// Midpoint-rule integral of tan(angle) * distance-to-contour over a sampling
/// grid `oversample` times finer than the pixel grid in each axis.
double brute_force_volume(const PileSpec& spec, const GridGeometry& geometry, const ReposeAngle& angle,
                          int oversample = 8);

}  // namespace reposevol
