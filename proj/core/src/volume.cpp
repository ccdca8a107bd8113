#include "reposevol/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reposevol/error.hpp"
#include "reposevol/summation.hpp"

namespace reposevol {

ReposeAngle::ReposeAngle(double degrees) : degrees_(degrees), slope_(0.0) {
  if (!(degrees > 0.0 && degrees < 90.0)) {
    throw Error(ErrorCode::InvalidAngle, "angle of repose must lie in (0, 90) degrees, got " +
                                             std::to_string(degrees));
  }
  slope_ = std::tan(radians());
}

double ReposeAngle::radians() const noexcept { return degrees_ * std::numbers::pi / 180.0; }

MaterialSpec::MaterialSpec(std::string name_, double density, ReposeAngle repose_)
    : name(std::move(name_)), bulk_density_t_per_m3(density), repose(repose_) {
  if (!(density > 0.0) || !std::isfinite(density)) {
    throw Error(ErrorCode::NonPositiveInput, "bulk density must be positive");
  }
}

DistancePath parse_distance_path(const std::string& text) {
  if (text == "raster") return DistancePath::raster;
  if (text == "exact" || text == "polygon-exact") return DistancePath::polygon_exact;
  if (text == "outline") return DistancePath::mask_outline;
  throw Error(ErrorCode::ConfigError, "unknown distance path '" + text + "'");
}

std::string to_string(DistancePath path) {
  switch (path) {
    case DistancePath::raster: return "raster";
    case DistancePath::polygon_exact: return "exact";
    case DistancePath::mask_outline: return "outline";
  }
  return "raster";
}

double height_from_distance(double distance_px, const GridGeometry& geometry, const ReposeAngle& angle) {
  return distance_px * geometry.pixel_size_m() * angle.slope();
}

HeightField height_field(const DistanceField& distances, const GridGeometry& geometry,
                         const ReposeAngle& angle) {
  HeightField heights{Grid<double>(distances.width(), distances.height(), 0.0), geometry};
  const auto src = distances.values();
  auto dst = heights.values.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = height_from_distance(src[i], geometry, angle);
  return heights;
}

VolumeEstimate integrate_volume(const HeightField& heights, const std::string& pile_id) {
  VolumeEstimate estimate;
  estimate.pile_id = pile_id;
  CompensatedSum sum;
  for (double h : heights.values.values()) {
    if (h <= 0.0) continue;
    sum.add(h);
    ++estimate.footprint_px;
    estimate.max_height_m = std::max(estimate.max_height_m, h);
  }
  const double pixel_area = heights.geometry.pixel_area_m2();
  estimate.volume_m3 = sum.value() * pixel_area;
  estimate.footprint_m2 = static_cast<double>(estimate.footprint_px) * pixel_area;
  return estimate;
}

DistanceField mask_distance_field(const RasterMask& mask, DistancePath path) {
  if (path == DistancePath::raster) return distance_transform(mask);
  return outline_distance_field(mask);
}

PileRaster fit_grid(const PileContour& contour) {
  const BoundingBox box = contour.bounds();
  const double left = std::floor(box.min_x) - 1.0;
  const double top = std::floor(box.min_y) - 1.0;
  const double width = std::ceil(box.max_x) - left + 1.0;
  const double height = std::ceil(box.max_y) - top + 1.0;
  if (width > 1 << 15 || height > 1 << 15) {
    throw Error(ErrorCode::OutOfBounds, "pile '" + contour.pile_id() + "' spans more than 32768 px");
  }
  return {contour.translated(-left, -top), static_cast<int>(left), static_cast<int>(top),
          static_cast<int>(width), static_cast<int>(height)};
}

DistanceField contour_distance_field(const PileRaster& raster, DistancePath path) {
  switch (path) {
    case DistancePath::polygon_exact:
      return polygon_distance_field(raster.contour, raster.width, raster.height);
    case DistancePath::raster:
      return distance_transform(rasterize(raster.contour, raster.width, raster.height));
    case DistancePath::mask_outline:
      return outline_distance_field(rasterize(raster.contour, raster.width, raster.height));
  }
  return {};
}

VolumeEstimate estimate_pile(const PileContour& contour, const GridGeometry& geometry,
                             const MaterialSpec& material, DistancePath path) {
  const PileRaster raster = fit_grid(contour);
  const DistanceField distances = contour_distance_field(raster, path);
  return integrate_volume(height_field(distances, geometry, material.repose), contour.pile_id());
}

double estimate_weight(const VolumeEstimate& volume, const MaterialSpec& material) {
  return volume.volume_m3 * material.bulk_density_t_per_m3 / 1000.0;
}

WeightTotal total_weight(const std::vector<VolumeEstimate>& estimates, const MaterialSpec& material,
                         std::optional<double> reference_kt) {
  if (estimates.empty()) throw Error(ErrorCode::EmptyInput, "no pile estimates to total");
  CompensatedSum sum;
  for (const VolumeEstimate& e : estimates) sum.add(estimate_weight(e, material));
  WeightTotal total;
  total.total_kt = sum.value();
  if (reference_kt) {
    if (!(*reference_kt > 0.0)) throw Error(ErrorCode::NonPositiveInput, "reference weight must be positive");
    total.relative_error = (total.total_kt - *reference_kt) / *reference_kt;
  }
  return total;
}

}  // namespace reposevol
