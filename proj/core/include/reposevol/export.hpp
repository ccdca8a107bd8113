#pragma once

#include <filesystem>
#include <ostream>

#include "reposevol/geometry.hpp"
#include "reposevol/volume.hpp"

namespace reposevol {

// ASCII grid: six header lines (ncols, nrows, xllcorner, yllcorner, cellsize,
// NODATA_value) followed by one text row per grid row, top row first. Values
// are written with max_digits10 precision so they re-read bit-exact.
void write_ascii_grid(std::ostream& out, const Grid<double>& values, double cellsize,
                      double xllcorner = 0.0, double yllcorner = 0.0);
void write_ascii_grid(const std::filesystem::path& path, const Grid<double>& values, double cellsize);
Grid<double> read_ascii_grid(std::istream& in);

inline void write_distance_grid(const std::filesystem::path& path, const DistanceField& field) {
  write_ascii_grid(path, field, 1.0);
}
inline void write_height_grid(const std::filesystem::path& path, const HeightField& heights) {
  write_ascii_grid(path, heights.values, heights.geometry.pixel_size_m());
}

// 16-bit binary graymap (P5, maxval 65535). Sample = round(h / scale * 65535)
// with scale = max height of the field; the scale is recorded in a header
// comment "# max_height_m <value>" so heights can be recovered.
void write_height_pgm16(const std::filesystem::path& path, const HeightField& heights);

// Wavefront OBJ triangle mesh: one vertex per pixel center (x, y in meters,
// z = height) and two triangles per 2x2 block of pixel centers.
void write_height_obj(std::ostream& out, const HeightField& heights);
void write_height_obj(const std::filesystem::path& path, const HeightField& heights);

}  // namespace reposevol
