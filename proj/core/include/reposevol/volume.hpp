#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reposevol/geometry.hpp"
#include "reposevol/mask_io.hpp"

namespace reposevol {

/// Angle of repose in degrees, strictly between 0 and 90.
class ReposeAngle {
 public:
  explicit ReposeAngle(double degrees);

  double degrees() const noexcept { return degrees_; }
  double radians() const noexcept;
  double slope() const noexcept { return slope_; }  // tan(angle)

  bool operator==(const ReposeAngle& other) const noexcept { return degrees_ == other.degrees_; }

 private:
  double degrees_;
  double slope_;
};

struct MaterialSpec {
  MaterialSpec(std::string name, double bulk_density_t_per_m3, ReposeAngle repose);

  std::string name;
  double bulk_density_t_per_m3;
  ReposeAngle repose;
};

/// Reconstructed pile surface in meters above the ground plane.
struct HeightField {
  Grid<double> values;
  GridGeometry geometry;
};

struct VolumeEstimate {
  std::string pile_id;
  double volume_m3 = 0.0;
  std::size_t footprint_px = 0;
  double footprint_m2 = 0.0;
  double max_height_m = 0.0;

  bool operator==(const VolumeEstimate&) const = default;
};

/// How per-pixel distances to the pile boundary are obtained.
enum class DistancePath {
  raster,         // exact EDT between pixel centers of the rasterized footprint
  polygon_exact,  // distance from each pixel center to the contour polyline
  mask_outline,   // distance from each pixel center to the traced pixel-edge outline
};

DistancePath parse_distance_path(const std::string& text);
std::string to_string(DistancePath path);

double height_from_distance(double distance_px, const GridGeometry& geometry, const ReposeAngle& angle);

HeightField height_field(const DistanceField& distances, const GridGeometry& geometry,
                         const ReposeAngle& angle);

/// Sums per-pixel heights (compensated) and multiplies by the pixel area.
VolumeEstimate integrate_volume(const HeightField& heights, const std::string& pile_id);

/// Distance field of a raster footprint for the given path. polygon_exact has
/// no meaning without a contour and falls back to mask_outline.
DistanceField mask_distance_field(const RasterMask& mask, DistancePath path);

/// Footprint of `contour` on a grid covering its bounding box plus a one-pixel
/// margin. The contour is shifted by whole pixels, so the raster convention is
/// unaffected.
struct PileRaster {
  PileContour contour;  // shifted into grid coordinates
  int offset_x = 0;     // grid column 0 sits at this x in the source image
  int offset_y = 0;
  int width = 0;
  int height = 0;
};
PileRaster fit_grid(const PileContour& contour);

DistanceField contour_distance_field(const PileRaster& raster, DistancePath path);

VolumeEstimate estimate_pile(const PileContour& contour, const GridGeometry& geometry,
                             const MaterialSpec& material, DistancePath path = DistancePath::raster);

/// Volume times bulk density, in kilotonnes.
double estimate_weight(const VolumeEstimate& volume, const MaterialSpec& material);

struct WeightTotal {
  double total_kt = 0.0;
  std::optional<double> relative_error;  // (total - reference) / reference
};
WeightTotal total_weight(const std::vector<VolumeEstimate>& estimates, const MaterialSpec& material,
                         std::optional<double> reference_kt = std::nullopt);

}  // namespace reposevol
