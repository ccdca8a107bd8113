#include "reposevol/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "reposevol/error.hpp"
#include "reposevol/geometry.hpp"

namespace reposevol {
namespace {

std::vector<double> with_baseline(std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidPerturbation, "perturbations must be finite");
  }
  values.push_back(0.0);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

SweepSeries relative_to_baseline(const std::vector<double>& perturbations, const std::vector<double>& volumes) {
  const auto base = std::find(perturbations.begin(), perturbations.end(), 0.0);
  const double baseline = volumes[static_cast<std::size_t>(base - perturbations.begin())];
  SweepSeries series;
  for (std::size_t i = 0; i < perturbations.size(); ++i) {
    const double increase =
        perturbations[i] == 0.0 ? 0.0 : (baseline > 0.0 ? 100.0 * (volumes[i] - baseline) / baseline : 0.0);
    series.points.push_back({perturbations[i], volumes[i], increase});
  }
  return series;
}

}  // namespace

SweepSeries angle_sweep(const PileContour& contour, const GridGeometry& geometry,
                        const ReposeAngle& base_angle, std::vector<double> deltas_deg, DistancePath path) {
  const std::vector<double> deltas = with_baseline(std::move(deltas_deg));
  for (double d : deltas) {
    const double theta = base_angle.degrees() + d;
    if (!(theta > 0.0 && theta < 90.0)) {
      throw Error(ErrorCode::AngleOutOfRange,
                  "perturbed angle " + std::to_string(theta) + " leaves (0, 90) degrees");
    }
  }
  // The footprint is fixed, so the distance field is computed once.
  const PileRaster raster = fit_grid(contour);
  const DistanceField distances = contour_distance_field(raster, path);
  std::vector<double> volumes;
  for (double d : deltas) {
    const ReposeAngle angle(base_angle.degrees() + d);
    volumes.push_back(integrate_volume(height_field(distances, geometry, angle), contour.pile_id()).volume_m3);
  }
  return relative_to_baseline(deltas, volumes);
}

SweepSeries contour_scale_sweep(const PileContour& contour, const GridGeometry& geometry,
                                const ReposeAngle& angle, std::vector<double> area_increases_pct,
                                DistancePath path) {
  const std::vector<double> increases = with_baseline(std::move(area_increases_pct));
  if (increases.front() <= -100.0) {
    throw Error(ErrorCode::InvalidPerturbation, "area change must be greater than -100%");
  }
  const MaterialSpec material("sweep", 1.0, angle);
  const Point centroid = contour.centroid();
  std::vector<double> volumes;
  for (double a : increases) {
    const double scale = std::sqrt(1.0 + a / 100.0);
    const PileContour scaled = a == 0.0 ? contour : contour.scaled_about(centroid, scale);
    volumes.push_back(estimate_pile(scaled, geometry, material, path).volume_m3);
  }
  return relative_to_baseline(increases, volumes);
}

SensitivityFit fit_linear(const SweepSeries& series) {
  const std::size_t n = series.points.size();
  if (n < 3) throw Error(ErrorCode::InsufficientPoints, "a linear fit needs at least 3 points");
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const SweepPoint& p : series.points) {
    mean_x += p.perturbation;
    mean_y += p.volume_increase_pct;
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (const SweepPoint& p : series.points) {
    sxx += (p.perturbation - mean_x) * (p.perturbation - mean_x);
    sxy += (p.perturbation - mean_x) * (p.volume_increase_pct - mean_y);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientPoints, "perturbations must not all coincide");
  SensitivityFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss = 0.0;
  for (const SweepPoint& p : series.points) {
    const double r = p.volume_increase_pct - (fit.slope * p.perturbation + fit.intercept);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

namespace {

struct Footprint {
  int first = 0;
  std::vector<double> weights;  // overlap of consecutive input cells with the output window
};

std::vector<Footprint> window_weights(int input_size, int output_size, double factor) {
  std::vector<Footprint> windows(static_cast<std::size_t>(output_size));
  for (int o = 0; o < output_size; ++o) {
    const double lo = o * factor;
    const double hi = (o + 1) * factor;
    Footprint& fp = windows[static_cast<std::size_t>(o)];
    fp.first = static_cast<int>(std::floor(lo));
    const int last = std::min(input_size - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int i = fp.first; i <= last; ++i) {
      fp.weights.push_back(std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i)));
    }
  }
  return windows;
}

}  // namespace

RasterMask downsample_mask(const RasterMask& mask, double factor) {
  if (!(factor > 1.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidPerturbation, "downsampling factor must be greater than 1");
  }
  const int out_w = static_cast<int>(std::ceil(mask.width() / factor));
  const int out_h = static_cast<int>(std::ceil(mask.height() / factor));
  if (out_w < 2 || out_h < 2) {
    throw Error(ErrorCode::FactorTooLarge, "factor " + std::to_string(factor) + " reduces the " +
                                               std::to_string(mask.width()) + "x" +
                                               std::to_string(mask.height()) + " mask below 2x2");
  }
  const auto cols = window_weights(mask.width(), out_w, factor);
  const auto rows = window_weights(mask.height(), out_h, factor);
  const double window_area = factor * factor;

  RasterMask out(out_w, out_h);
  for (int oy = 0; oy < out_h; ++oy) {
    const Footprint& ry = rows[static_cast<std::size_t>(oy)];
    for (int ox = 0; ox < out_w; ++ox) {
      const Footprint& rx = cols[static_cast<std::size_t>(ox)];
      double covered = 0.0;
      for (std::size_t j = 0; j < ry.weights.size(); ++j) {
        const int y = ry.first + static_cast<int>(j);
        double row_sum = 0.0;
        for (std::size_t i = 0; i < rx.weights.size(); ++i) {
          if (mask.at(rx.first + static_cast<int>(i), y)) row_sum += rx.weights[i];
        }
        covered += row_sum * ry.weights[j];
      }
      if (covered >= 0.5 * window_area) out.set(ox, oy);
    }
  }
  return out;
}

ResolutionStudy resolution_study(const PileSpec& spec, const GridGeometry& geometry, const ReposeAngle& angle,
                                 const std::vector<double>& factors, const ResolutionStudyOptions& options) {
  ResolutionStudy study;
  study.reference_m3 = brute_force_volume(spec, geometry, angle, options.oversample);
  const PileRaster raster = fit_grid(make_contour(spec));
  const RasterMask full = rasterize(raster.contour, raster.width, raster.height);

  for (double factor : factors) {
    if (!(factor >= 1.0)) throw Error(ErrorCode::InvalidPerturbation, "resolution factors must be >= 1");
    const RasterMask mask = factor == 1.0 ? full : downsample_mask(full, factor);
    const GridGeometry coarse = factor == 1.0 ? geometry : geometry.coarsened(factor);
    const DistanceField distances = mask_distance_field(mask, options.path);
    const VolumeEstimate estimate = integrate_volume(height_field(distances, coarse, angle), spec.pile_id);
    ResolutionRow row;
    row.factor = factor;
    row.pixel_size_m = coarse.pixel_size_m();
    row.volume_m3 = estimate.volume_m3;
    row.error_pct = 100.0 * (estimate.volume_m3 - study.reference_m3) / study.reference_m3;
    study.rows.push_back(row);
  }
  return study;
}

}  // namespace reposevol
