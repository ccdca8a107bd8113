#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reposevol/error.hpp"
#include "reposevol/grid.hpp"
#include "reposevol/polygon.hpp"

namespace reposevol {

/// Binary occupancy grid; a cell is 1 when it belongs to a pile.
class RasterMask {
 public:
  RasterMask(int width, int height);
  RasterMask(int width, int height, std::vector<std::uint8_t> cells);

  int width() const noexcept { return cells_.width(); }
  int height() const noexcept { return cells_.height(); }

  bool at(int x, int y) const { return cells_.at(x, y) != 0; }
  void set(int x, int y, bool value = true) { cells_.at(x, y) = value ? 1 : 0; }

  /// Out-of-grid cells read as background.
  bool at_or_background(int x, int y) const noexcept {
    return cells_.contains(x, y) && cells_.at(x, y) != 0;
  }

  std::size_t count() const noexcept;
  const Grid<std::uint8_t>& cells() const noexcept { return cells_; }

  bool operator==(const RasterMask&) const = default;

 private:
  Grid<std::uint8_t> cells_;
};

/// Ground sample distance of a calibrated image; pixels are square.
class GridGeometry {
 public:
  explicit GridGeometry(double pixel_size_m);

  double pixel_size_m() const noexcept { return pixel_size_m_; }
  double pixel_area_m2() const noexcept { return pixel_size_m_ * pixel_size_m_; }

  /// Geometry of the same scene resampled to pixels `factor` times larger.
  GridGeometry coarsened(double factor) const { return GridGeometry(pixel_size_m_ * factor); }

  bool operator==(const GridGeometry&) const = default;

 private:
  double pixel_size_m_;
};

struct AnnotationSet {
  std::string source;
  std::vector<PileContour> contours;

  bool operator==(const AnnotationSet&) const = default;
};

// Annotation JSON layout:
//   {"source": "...", "piles": [{"id": "...", "polygon": [[x, y], ...]}, ...]}
// Coordinates are pixels with the origin at the top-left corner, x to the
// right and y downwards. A trailing vertex equal to the first one (as written
// by most polygon exporters) is dropped.
AnnotationSet parse_annotations(std::string_view json_text);
std::string serialize_annotations(const AnnotationSet& set);
AnnotationSet load_annotations(const std::filesystem::path& path);

/// Like parse_annotations, but keeps going when a single pile is invalid.
/// Invalid piles are reported with their id and the error instead of a contour.
struct AnnotationEntry {
  std::string pile_id;
  std::vector<Point> vertices;
  std::optional<ErrorCode> error;
  std::string message;
};
struct LenientAnnotationSet {
  std::string source;
  std::vector<AnnotationEntry> entries;
};
LenientAnnotationSet parse_annotations_lenient(std::string_view json_text);

/// Sets every pixel whose center (x + 0.5, y + 0.5) lies inside the contour.
RasterMask rasterize(const PileContour& contour, int width, int height);

/// Reads a PBM (P1/P4) or PGM (P2/P5, 8 or 16 bit) file; non-zero is inside.
RasterMask load_raster_mask(const std::filesystem::path& path);
RasterMask parse_raster_mask(std::string_view bytes);
/// Writes a binary P5 graymap with 0 for background and 255 for pile pixels.
void save_raster_mask(const RasterMask& mask, const std::filesystem::path& path);

GridGeometry pixel_scale_from_reference(double reference_length_m, double reference_length_px);

}  // namespace reposevol
