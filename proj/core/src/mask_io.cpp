#include "reposevol/mask_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

namespace reposevol {

using json = nlohmann::json;

RasterMask::RasterMask(int width, int height) : RasterMask(width, height, {}) {}

RasterMask::RasterMask(int width, int height, std::vector<std::uint8_t> cells) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::NonPositiveInput, "mask dimensions must be positive");
  }
  cells_ = Grid<std::uint8_t>(width, height, 0);
  if (cells.empty()) return;
  if (cells.size() != cells_.size()) {
    throw Error(ErrorCode::SchemaViolation, "mask cell count does not match width x height");
  }
  std::transform(cells.begin(), cells.end(), cells_.values().begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v != 0 ? 1 : 0; });
}

std::size_t RasterMask::count() const noexcept {
  const auto values = cells_.values();
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), std::uint8_t{1}));
}

GridGeometry::GridGeometry(double pixel_size_m) : pixel_size_m_(pixel_size_m) {
  if (!(pixel_size_m > 0.0) || !std::isfinite(pixel_size_m)) {
    throw Error(ErrorCode::NonPositiveInput, "pixel size must be positive and finite");
  }
}

// ---------------------------------------------------------------------------
// Annotation JSON

namespace {

std::vector<Point> read_polygon(const json& pile, const std::string& id) {
  const auto it = pile.find("polygon");
  if (it == pile.end() || !it->is_array()) {
    throw Error(ErrorCode::SchemaViolation, "pile '" + id + "' has no \"polygon\" array");
  }
  std::vector<Point> vertices;
  vertices.reserve(it->size());
  for (const json& v : *it) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw Error(ErrorCode::SchemaViolation, "pile '" + id + "' has a vertex that is not [x, y]");
    }
    vertices.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  if (vertices.size() > 1 && vertices.front() == vertices.back()) vertices.pop_back();
  return vertices;
}

json parse_document(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, "annotation root must be an object");
  const auto piles = doc.find("piles");
  if (piles == doc.end() || !piles->is_array()) {
    throw Error(ErrorCode::SchemaViolation, "missing \"piles\" array");
  }
  if (doc.contains("source") && !doc["source"].is_string()) {
    throw Error(ErrorCode::SchemaViolation, "\"source\" must be a string");
  }
  return doc;
}

std::string read_id(const json& pile) {
  if (!pile.is_object()) throw Error(ErrorCode::SchemaViolation, "pile entry must be an object");
  const auto id = pile.find("id");
  if (id == pile.end() || !id->is_string()) {
    throw Error(ErrorCode::SchemaViolation, "pile entry has no string \"id\"");
  }
  return id->get<std::string>();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return buffer.str();
}

}  // namespace

AnnotationSet parse_annotations(std::string_view json_text) {
  const json doc = parse_document(json_text);
  AnnotationSet set;
  set.source = doc.value("source", std::string{});
  std::set<std::string> seen;
  for (const json& pile : doc["piles"]) {
    std::string id = read_id(pile);
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate pile id '" + id + "'");
    }
    std::vector<Point> vertices = read_polygon(pile, id);
    set.contours.emplace_back(std::move(id), std::move(vertices));
  }
  return set;
}

LenientAnnotationSet parse_annotations_lenient(std::string_view json_text) {
  const json doc = parse_document(json_text);
  LenientAnnotationSet set;
  set.source = doc.value("source", std::string{});
  std::set<std::string> seen;
  std::size_t index = 0;
  for (const json& pile : doc["piles"]) {
    AnnotationEntry entry;
    entry.pile_id = "#" + std::to_string(index++);
    try {
      entry.pile_id = read_id(pile);
      if (!seen.insert(entry.pile_id).second) {
        throw Error(ErrorCode::SchemaViolation, "duplicate pile id '" + entry.pile_id + "'");
      }
      entry.vertices = read_polygon(pile, entry.pile_id);
      PileContour check(entry.pile_id, entry.vertices);
    } catch (const Error& e) {
      entry.error = e.code();
      entry.message = e.what();
    }
    set.entries.push_back(std::move(entry));
  }
  return set;
}

std::string serialize_annotations(const AnnotationSet& set) {
  json piles = json::array();
  for (const PileContour& contour : set.contours) {
    json polygon = json::array();
    for (const Point& p : contour.vertices()) polygon.push_back({p.x, p.y});
    piles.push_back({{"id", contour.pile_id()}, {"polygon", std::move(polygon)}});
  }
  json doc = {{"source", set.source}, {"piles", std::move(piles)}};
  return doc.dump(2) + "\n";
}

AnnotationSet load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_file(path));
}

// ---------------------------------------------------------------------------
// Rasterization

RasterMask rasterize(const PileContour& contour, int width, int height) {
  RasterMask mask(width, height);
  const BoundingBox box = contour.bounds();
  if (box.min_x < 0.0 || box.min_y < 0.0 || box.max_x > width || box.max_y > height) {
    throw Error(ErrorCode::OutOfBounds, "pile '" + contour.pile_id() + "' exceeds the " +
                                            std::to_string(width) + "x" + std::to_string(height) +
                                            " grid");
  }

  const auto& v = contour.vertices();
  const std::size_t n = v.size();
  std::vector<double> crossings;
  for (int y = 0; y < height; ++y) {
    const double yc = y + 0.5;
    crossings.clear();
    // Same crossing formula and edge orientation as point_in_polygon().
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point& a = v[i];
      const Point& b = v[j];
      if ((a.y > yc) != (b.y > yc)) {
        crossings.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    // A center xc is inside iff crossings[2k] <= xc < crossings[2k + 1].
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const double lo = crossings[k];
      const double hi = crossings[k + 1];
      int x = std::max(0, static_cast<int>(std::ceil(lo - 0.5)) - 1);
      while (x < width && x + 0.5 < lo) ++x;
      for (; x < width && x + 0.5 < hi; ++x) mask.set(x, y);
    }
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Portable anymap masks

namespace {

class PnmReader {
 public:
  explicit PnmReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_int() {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw Error(ErrorCode::UnsupportedFormat, "header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::UnsupportedFormat, "expected a number");
    return value;
  }

  // P1 allows pixels without separating whitespace.
  int read_bit() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw Error(ErrorCode::UnsupportedFormat, "truncated bitmap");
    const char c = bytes_[pos_++];
    if (c != '0' && c != '1') throw Error(ErrorCode::UnsupportedFormat, "bad bitmap pixel");
    return c - '0';
  }

  // Exactly one whitespace byte separates the header from binary data.
  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::UnsupportedFormat, "missing header terminator");
    }
    ++pos_;
  }

  std::string_view take(std::size_t count) {
    if (bytes_.size() - pos_ < count) throw Error(ErrorCode::UnsupportedFormat, "truncated raster data");
    const std::string_view out = bytes_.substr(pos_, count);
    pos_ += count;
    return out;
  }

  std::string_view magic() { return take(2); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

RasterMask parse_raster_mask(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::UnsupportedFormat, "not a PBM/PGM file");
  PnmReader in(bytes);
  const std::string_view magic = in.magic();
  const char kind = magic[1];
  if (kind != '1' && kind != '2' && kind != '4' && kind != '5') {
    throw Error(ErrorCode::UnsupportedFormat, "unsupported anymap type P" + std::string(1, kind));
  }
  const long width = in.read_int();
  const long height = in.read_int();
  if (width <= 0 || height <= 0) throw Error(ErrorCode::UnsupportedFormat, "empty raster");
  const bool bitmap = kind == '1' || kind == '4';
  const long maxval = bitmap ? 1 : in.read_int();
  if (maxval <= 0 || maxval > 65535) throw Error(ErrorCode::UnsupportedFormat, "bad maxval");

  RasterMask mask(static_cast<int>(width), static_cast<int>(height));
  switch (kind) {
    case '1':
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) mask.set(x, y, in.read_bit() != 0);
      break;
    case '2':
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) mask.set(x, y, in.read_int() != 0);
      break;
    case '4': {
      in.skip_single_space();
      const std::size_t stride = static_cast<std::size_t>((width + 7) / 8);
      for (int y = 0; y < height; ++y) {
        const std::string_view row = in.take(stride);
        for (int x = 0; x < width; ++x) {
          const auto byte = static_cast<unsigned char>(row[static_cast<std::size_t>(x / 8)]);
          mask.set(x, y, ((byte >> (7 - x % 8)) & 1U) != 0);
        }
      }
      break;
    }
    case '5': {
      in.skip_single_space();
      const std::size_t depth = maxval > 255 ? 2 : 1;
      const std::string_view data =
          in.take(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * depth);
      std::size_t k = 0;
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x, k += depth) {
          bool set = data[k] != 0;
          if (depth == 2) set = set || data[k + 1] != 0;
          mask.set(x, y, set);
        }
      }
      break;
    }
  }
  return mask;
}

RasterMask load_raster_mask(const std::filesystem::path& path) {
  return parse_raster_mask(read_file(path));
}

void save_raster_mask(const RasterMask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  for (std::uint8_t cell : mask.cells().values()) out.put(cell != 0 ? static_cast<char>(255) : '\0');
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

GridGeometry pixel_scale_from_reference(double reference_length_m, double reference_length_px) {
  if (!(reference_length_m > 0.0) || !std::isfinite(reference_length_m) ||
      !(reference_length_px > 0.0) || !std::isfinite(reference_length_px)) {
    throw Error(ErrorCode::NonPositiveInput, "reference length and pixel count must be positive");
  }
  return GridGeometry(reference_length_m / reference_length_px);
}

}  // namespace reposevol
