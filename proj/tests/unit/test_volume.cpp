#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "reposevol/error.hpp"
#include "reposevol/pile_synth.hpp"
#include "reposevol/volume.hpp"
#include "support/oracles.hpp"

namespace reposevol {
namespace {

// tan(32.78 deg), evaluated independently.
constexpr double kTan3278 = 0.6439620928827805;
constexpr double kPi = std::numbers::pi;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InputError;
}

MaterialSpec sand(double degrees = 32.78) { return MaterialSpec("sand", 1.6, ReposeAngle(degrees)); }

PileContour disk(double r, Point c, int n = 256) {
  std::vector<Point> v;
  for (int k = 0; k < n; ++k) v.push_back({c.x + r * std::cos(2 * kPi * k / n), c.y + r * std::sin(2 * kPi * k / n)});
  return PileContour("disk", v);
}

TEST(ReposeAngle, Validation) {
  EXPECT_NEAR(ReposeAngle(32.78).slope(), kTan3278, 1e-15);
  EXPECT_NEAR(ReposeAngle(45).slope(), 1.0, 1e-15);
  EXPECT_EQ(code_of([] { ReposeAngle(0.0); }), ErrorCode::InvalidAngle);
  EXPECT_EQ(code_of([] { ReposeAngle(90.0); }), ErrorCode::InvalidAngle);
  EXPECT_EQ(code_of([] { ReposeAngle(std::nan("")); }), ErrorCode::InvalidAngle);
  EXPECT_EQ(code_of([] { MaterialSpec("x", 0.0, ReposeAngle(30)); }), ErrorCode::NonPositiveInput);
}

TEST(HeightFromDistance, Examples) {
  EXPECT_DOUBLE_EQ(height_from_distance(10, GridGeometry(1.0), ReposeAngle(45)), 10.0);
  EXPECT_NEAR(height_from_distance(5, GridGeometry(1.0), ReposeAngle(32.78)), 3.21981, 5e-6);
  EXPECT_EQ(height_from_distance(0, GridGeometry(0.3), ReposeAngle(12)), 0.0);
}

TEST(HeightField, Examples) {
  const GridGeometry g(0.5);
  const HeightField zero = height_field(DistanceField(4, 3), g, ReposeAngle(45));
  for (double v : zero.values.values()) EXPECT_EQ(v, 0.0);

  const HeightField one = height_field(DistanceField(1, 1, 2.0), g, ReposeAngle(45));
  EXPECT_DOUBLE_EQ(one.values.at(0, 0), 1.0);

  // Centered on pixel (31, 31), so the apex falls on a pixel center.
  const DistanceField d = polygon_distance_field(disk(20, {31.5, 31.5}), 64, 64);
  const HeightField h = height_field(d, GridGeometry(0.01), ReposeAngle(32.78));
  double max_h = 0;
  for (double v : h.values.values()) max_h = std::max(max_h, v);
  EXPECT_NEAR(max_h, 0.128792, 1e-3);
}

TEST(IntegrateVolume, Examples) {
  const GridGeometry g(1.0);
  EXPECT_EQ(integrate_volume({Grid<double>(5, 5), g}, "z").volume_m3, 0.0);
  const VolumeEstimate prism = integrate_volume({Grid<double>(10, 10, 1.0), g}, "p");
  EXPECT_DOUBLE_EQ(prism.volume_m3, 100.0);
  EXPECT_EQ(prism.footprint_px, 100u);
  EXPECT_DOUBLE_EQ(prism.footprint_m2, 100.0);
  EXPECT_DOUBLE_EQ(prism.max_height_m, 1.0);
}

TEST(EstimatePile, ConeWithinOnePercent) {
  const double analytic = kPi / 3.0 * kTan3278;  // r = 1 m
  EXPECT_NEAR(analytic, 0.674356, 1e-6);
  const PileContour contour = disk(100, {110.3, 107.9});
  for (DistancePath path : {DistancePath::raster, DistancePath::polygon_exact, DistancePath::mask_outline}) {
    const VolumeEstimate e = estimate_pile(contour, GridGeometry(0.01), sand(), path);
    EXPECT_LT(std::abs(e.volume_m3 - analytic) / analytic, 0.01) << to_string(path);
  }
}

TEST(EstimatePile, SquareHipRoof) {
  // Integral of the distance to the boundary over an a x a square is a^3 / 6.
  const PileContour square("sq", {{0, 0}, {100, 0}, {100, 100}, {0, 100}});
  const double analytic = 1e6 / 6.0;

  // On the raster path pixel (i, j) is min(i + 1, j + 1, 100 - i, 100 - j)
  // centers away from the nearest outside center, half a pixel more than its
  // distance to the edge; the sum is 3 % above the continuous integral.
  long long steps = 0;
  for (int j = 0; j < 100; ++j)
    for (int i = 0; i < 100; ++i) steps += std::min({i + 1, j + 1, 100 - i, 100 - j});
  const VolumeEstimate raster = estimate_pile(square, GridGeometry(1.0), sand(45));
  EXPECT_NEAR(raster.volume_m3, static_cast<double>(steps), 1e-9 * steps);
  EXPECT_NEAR(raster.volume_m3 / analytic - 1.0, 0.0302, 1e-4);

  const VolumeEstimate exact = estimate_pile(square, GridGeometry(1.0), sand(45), DistancePath::polygon_exact);
  EXPECT_LT(std::abs(exact.volume_m3 - analytic) / analytic, 0.001);
}

TEST(EstimatePile, StadiumWithinOnePercent) {
  const double analytic = (kPi / 3.0 * 0.125 + 0.25) * kTan3278;
  EXPECT_NEAR(analytic, 0.245285, 1e-6);
  PileSpec spec;
  spec.kind = PileKind::elongated;
  spec.radius_px = 50;
  spec.ridge_len_px = 100;
  spec.center = {120, 60};
  const PileContour contour = make_contour(spec);
  const VolumeEstimate exact = estimate_pile(contour, GridGeometry(0.01), sand(), DistancePath::polygon_exact);
  EXPECT_LT(std::abs(exact.volume_m3 - analytic) / analytic, 0.01);
  // The raster path carries the half-pixel bias of center-to-center distances,
  // which at r = 50 px is close to 2 %.
  const VolumeEstimate raster = estimate_pile(contour, GridGeometry(0.01), sand(), DistancePath::raster);
  EXPECT_GT(raster.volume_m3, exact.volume_m3);
  EXPECT_LT(std::abs(raster.volume_m3 - analytic) / analytic, 0.02);
}

TEST(EstimatePile, VolumeBoundedByPrism) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const PileContour contour("p", testing::random_star_polygon(rng, {40, 40}, 8, 35, 20));
    for (DistancePath path : {DistancePath::raster, DistancePath::polygon_exact, DistancePath::mask_outline}) {
      const VolumeEstimate e = estimate_pile(contour, GridGeometry(0.05), sand(), path);
      EXPECT_GE(e.volume_m3, 0.0);
      EXPECT_LE(e.volume_m3, e.footprint_m2 * e.max_height_m * (1 + 1e-12));
      EXPECT_DOUBLE_EQ(e.footprint_m2, e.footprint_px * 0.0025);
    }
  }
}

TEST(EstimatePile, TanScalingIsExact) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(5, 80);
  for (int trial = 0; trial < 20; ++trial) {
    const RasterMask mask = testing::random_blob_mask(rng, 40, 32);
    const GridGeometry g(0.02);
    const double t1 = angle(rng);
    const double t2 = angle(rng);
    const DistanceField d = distance_transform(mask);
    const double v1 = integrate_volume(height_field(d, g, ReposeAngle(t1)), "a").volume_m3;
    const double v2 = integrate_volume(height_field(d, g, ReposeAngle(t2)), "a").volume_m3;
    if (v1 == 0.0) continue;
    const double expected = std::tan(t2 * kPi / 180) / std::tan(t1 * kPi / 180);
    EXPECT_NEAR(v2 / v1, expected, 1e-12 * expected);
  }
}

TEST(EstimatePile, FootprintScalesQuadraticallyWithPixelSize) {
  const PileContour contour = disk(30, {40, 40});
  const VolumeEstimate a = estimate_pile(contour, GridGeometry(0.1), sand());
  const VolumeEstimate b = estimate_pile(contour, GridGeometry(0.2), sand());
  EXPECT_EQ(a.footprint_px, b.footprint_px);
  EXPECT_NEAR(b.footprint_m2 / a.footprint_m2, 4.0, 1e-12);
  EXPECT_NEAR(b.volume_m3 / a.volume_m3, 8.0, 1e-12);
}

TEST(EstimatePile, MonotoneInNestedMasks) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const RasterMask a = testing::random_blob_mask(rng, 36, 36);
    RasterMask b = a;
    std::bernoulli_distribution grow(0.15);
    for (int y = 0; y < 36; ++y)
      for (int x = 0; x < 36; ++x)
        if (grow(rng)) b.set(x, y);
    for (DistancePath path : {DistancePath::raster, DistancePath::mask_outline}) {
      const GridGeometry g(0.1);
      const double va = integrate_volume(height_field(mask_distance_field(a, path), g, ReposeAngle(30)), "a").volume_m3;
      const double vb = integrate_volume(height_field(mask_distance_field(b, path), g, ReposeAngle(30)), "b").volume_m3;
      EXPECT_LE(va, vb);
    }
  }
}

TEST(EstimatePile, TranslationInvariantOnRasterPath) {
  std::mt19937_64 rng(3);
  const PileContour contour("p", testing::random_star_polygon(rng, {30.25, 20.75}, 5, 18, 24));
  const VolumeEstimate a = estimate_pile(contour, GridGeometry(0.1), sand());
  const VolumeEstimate b = estimate_pile(contour.translated(117, 45), GridGeometry(0.1), sand());
  EXPECT_EQ(a.footprint_px, b.footprint_px);
  EXPECT_DOUBLE_EQ(a.volume_m3, b.volume_m3);
}

TEST(EstimatePile, FitGridAddsMarginAndRejectsHugeGrids) {
  const PileContour tri("t", {{10.2, 5.5}, {30.7, 5.5}, {10.2, 25}});
  const PileRaster raster = fit_grid(tri);
  EXPECT_EQ(raster.offset_x, 9);
  EXPECT_EQ(raster.offset_y, 4);
  EXPECT_GE(raster.width, 22);
  const BoundingBox box = raster.contour.bounds();
  EXPECT_GE(box.min_x, 1.0);
  EXPECT_LE(box.max_x, raster.width - 1.0 + 1e-12);
  const PileContour huge("h", {{0, 0}, {1e6, 0}, {0, 1e6}});
  EXPECT_EQ(code_of([&] { fit_grid(huge); }), ErrorCode::OutOfBounds);
}

TEST(DistancePathNames, ParseAndPrint) {
  EXPECT_EQ(parse_distance_path("raster"), DistancePath::raster);
  EXPECT_EQ(parse_distance_path("exact"), DistancePath::polygon_exact);
  EXPECT_EQ(parse_distance_path("polygon-exact"), DistancePath::polygon_exact);
  EXPECT_EQ(parse_distance_path("outline"), DistancePath::mask_outline);
  EXPECT_EQ(code_of([] { parse_distance_path("chamfer"); }), ErrorCode::ConfigError);
  for (DistancePath p : {DistancePath::raster, DistancePath::polygon_exact, DistancePath::mask_outline})
    EXPECT_EQ(parse_distance_path(to_string(p)), p);
}

TEST(Weight, TableRows) {
  const MaterialSpec material = sand();
  VolumeEstimate v;
  v.volume_m3 = 15156.62;
  EXPECT_NEAR(estimate_weight(v, material), 24.25, 0.005);
  v.volume_m3 = 3581.5;
  EXPECT_NEAR(estimate_weight(v, material), 5.7304, 1e-9);
  v.volume_m3 = 0.0;
  EXPECT_EQ(estimate_weight(v, material), 0.0);
}

TEST(Weight, TableTotalAndError) {
  std::vector<VolumeEstimate> piles(4);
  const double volumes[] = {15156.62, 3581.5, 5688.625, 4021.75};
  for (int i = 0; i < 4; ++i) piles[i].volume_m3 = volumes[i];
  const WeightTotal total = total_weight(piles, sand(), 40.0);
  EXPECT_NEAR(total.total_kt, 45.517592, 1e-9);
  ASSERT_TRUE(total.relative_error.has_value());
  EXPECT_NEAR(*total.relative_error * 100, 13.79398, 1e-9);

  std::vector<VolumeEstimate> single(1);
  single[0].volume_m3 = 25000;
  EXPECT_DOUBLE_EQ(*total_weight(single, sand(), 40.0).relative_error, 0.0);
  EXPECT_FALSE(total_weight(single, sand()).relative_error.has_value());
  EXPECT_EQ(code_of([] { total_weight({}, sand()); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([&] { total_weight(single, sand(), 0.0); }), ErrorCode::NonPositiveInput);
}

}  // namespace
}  // namespace reposevol
