#pragma once

#include <vector>

#include "reposevol/mask_io.hpp"
#include "reposevol/pile_synth.hpp"
#include "reposevol/volume.hpp"

namespace reposevol {

struct SweepPoint {
  double perturbation = 0.0;  // degrees for angle sweeps, percent of area for contour sweeps
  double volume_m3 = 0.0;
  double volume_increase_pct = 0.0;

  bool operator==(const SweepPoint&) const = default;
};

/// Volume response to a perturbation, sorted by perturbation; always contains
/// the unperturbed baseline (0, 0).
struct SweepSeries {
  std::vector<SweepPoint> points;
};

struct SensitivityFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // root mean square of the residuals
};

/// Volume change when the angle of repose is raised by each delta (degrees)
/// while the footprint stays fixed. A zero delta is added when missing.
SweepSeries angle_sweep(const PileContour& contour, const GridGeometry& geometry,
                        const ReposeAngle& base_angle, std::vector<double> deltas_deg,
                        DistancePath path = DistancePath::raster);

/// Volume change when the footprint is scaled about its centroid so that its
/// area grows by each given percentage.
SweepSeries contour_scale_sweep(const PileContour& contour, const GridGeometry& geometry,
                                const ReposeAngle& angle, std::vector<double> area_increases_pct,
                                DistancePath path = DistancePath::polygon_exact);

/// Ordinary least squares line volume_increase_pct = slope * perturbation + intercept.
SensitivityFit fit_linear(const SweepSeries& series);

/// Reduces a mask by a real factor > 1. Each output cell covers a factor x
/// factor window of the input; it is set when the area-weighted share of set
/// input cells is at least one half. Output size is ceil(size / factor); parts
/// of edge windows beyond the input count as background.
RasterMask downsample_mask(const RasterMask& mask, double factor);

struct ResolutionRow {
  double factor = 1.0;
  double pixel_size_m = 0.0;
  double volume_m3 = 0.0;
  double error_pct = 0.0;  // 100 * (volume - reference) / reference
};

struct ResolutionStudyOptions {
  /// Distances on the degraded mask. mask_outline measures from each pixel
  /// center to the mask's own traced outline, the contour a segmentation of
  /// the coarse image would produce.
  DistancePath path = DistancePath::mask_outline;
  int oversample = 8;
};

struct ResolutionStudy {
  double reference_m3 = 0.0;  // brute-force volume of the synthetic pile
  std::vector<ResolutionRow> rows;
};

/// Rasterizes the synthetic pile, degrades the mask by each factor (factor 1
/// keeps the original), re-estimates the volume at the coarser pixel size and
/// compares it with the brute-force reference.
ResolutionStudy resolution_study(const PileSpec& spec, const GridGeometry& geometry, const ReposeAngle& angle,
                                 const std::vector<double>& factors, const ResolutionStudyOptions& options = {});

}  // namespace reposevol
