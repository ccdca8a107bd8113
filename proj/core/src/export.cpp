#include "reposevol/export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "reposevol/error.hpp"

namespace reposevol {
namespace {

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace

void write_ascii_grid(std::ostream& out, const Grid<double>& values, double cellsize,
                      double xllcorner, double yllcorner) {
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "ncols " << values.width() << '\n'
      << "nrows " << values.height() << '\n'
      << "xllcorner " << xllcorner << '\n'
      << "yllcorner " << yllcorner << '\n'
      << "cellsize " << cellsize << '\n'
      << "NODATA_value -9999\n";
  for (int y = 0; y < values.height(); ++y) {
    const auto row = values.row(y);
    for (std::size_t x = 0; x < row.size(); ++x) {
      if (x != 0) out << ' ';
      out << row[x];
    }
    out << '\n';
  }
  out.precision(precision);
}

void write_ascii_grid(const std::filesystem::path& path, const Grid<double>& values, double cellsize) {
  auto out = open_output(path);
  write_ascii_grid(out, values, cellsize);
  finish(out, path);
}

Grid<double> read_ascii_grid(std::istream& in) {
  int ncols = 0;
  int nrows = 0;
  double nodata = -9999.0;
  for (int i = 0; i < 6; ++i) {
    std::string key;
    double value = 0.0;
    if (!(in >> key >> value)) throw Error(ErrorCode::UnsupportedFormat, "truncated ASCII grid header");
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    if (key == "ncols") ncols = static_cast<int>(value);
    else if (key == "nrows") nrows = static_cast<int>(value);
    else if (key == "nodata_value") nodata = value;
  }
  if (ncols <= 0 || nrows <= 0) throw Error(ErrorCode::UnsupportedFormat, "bad ASCII grid dimensions");
  Grid<double> grid(ncols, nrows, 0.0);
  for (double& v : grid.values()) {
    if (!(in >> v)) throw Error(ErrorCode::UnsupportedFormat, "truncated ASCII grid body");
    if (v == nodata) v = 0.0;
  }
  return grid;
}

void write_height_pgm16(const std::filesystem::path& path, const HeightField& heights) {
  const auto values = heights.values.values();
  const double scale = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  auto out = open_output(path, std::ios::binary);
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "P5\n# max_height_m " << scale << "\n# pixel_size_m " << heights.geometry.pixel_size_m()
      << '\n' << heights.values.width() << ' ' << heights.values.height() << "\n65535\n";
  for (double h : values) {
    const long sample = scale > 0.0 ? std::lround(std::clamp(h / scale, 0.0, 1.0) * 65535.0) : 0;
    out.put(static_cast<char>((sample >> 8) & 0xFF));
    out.put(static_cast<char>(sample & 0xFF));
  }
  finish(out, path);
}

void write_height_obj(std::ostream& out, const HeightField& heights) {
  const Grid<double>& z = heights.values;
  const double px = heights.geometry.pixel_size_m();
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# reposevol height field " << z.width() << "x" << z.height() << " cellsize " << px << '\n';
  for (int y = 0; y < z.height(); ++y) {
    for (int x = 0; x < z.width(); ++x) {
      // y axis of the image points south; flip it so the mesh is right-handed.
      out << "v " << (x + 0.5) * px << ' ' << -(y + 0.5) * px << ' ' << z.at(x, y) << '\n';
    }
  }
  const auto vertex = [&](int x, int y) { return static_cast<long>(y) * z.width() + x + 1; };
  for (int y = 0; y + 1 < z.height(); ++y) {
    for (int x = 0; x + 1 < z.width(); ++x) {
      out << "f " << vertex(x, y) << ' ' << vertex(x, y + 1) << ' ' << vertex(x + 1, y + 1) << '\n';
      out << "f " << vertex(x, y) << ' ' << vertex(x + 1, y + 1) << ' ' << vertex(x + 1, y) << '\n';
    }
  }
  out.precision(precision);
}

void write_height_obj(const std::filesystem::path& path, const HeightField& heights) {
  auto out = open_output(path);
  write_height_obj(out, heights);
  finish(out, path);
}

}  // namespace reposevol
