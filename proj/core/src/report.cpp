#include "reposevol/report.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reposevol/export.hpp"
#include "reposevol/mask_io.hpp"
#include "reposevol/summation.hpp"

#ifndef REPOSEVOL_VERSION_STRING
#define REPOSEVOL_VERSION_STRING "0.0.0"
#endif

namespace reposevol {

using ordered_json = nlohmann::ordered_json;

std::string_view tool_version() noexcept { return REPOSEVOL_VERSION_STRING; }

ExportToggles ExportToggles::parse(std::string_view comma_list) {
  ExportToggles toggles;
  std::size_t start = 0;
  while (start <= comma_list.size()) {
    const std::size_t end = std::min(comma_list.find(',', start), comma_list.size());
    const std::string_view item = comma_list.substr(start, end - start);
    if (item == "heightmap") toggles.heightmap = true;
    else if (item == "mesh") toggles.mesh = true;
    else if (item == "csv") toggles.csv = true;
    else if (item == "json") toggles.json = true;
    else if (!item.empty()) throw Error(ErrorCode::ConfigError, "unknown export '" + std::string(item) + "'");
    start = end + 1;
  }
  return toggles;
}

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
  const bool has_pixel = pixel_size_m.has_value();
  const bool has_ref_m = reference_length_m.has_value();
  const bool has_ref_px = reference_length_px.has_value();
  if (has_ref_m != has_ref_px) {
    throw Error(ErrorCode::ConfigError, "--ref-length and --ref-pixels must be given together");
  }
  if (has_pixel == has_ref_m) {
    throw Error(ErrorCode::ConfigError,
                "give exactly one calibration: --pixel-size or --ref-length with --ref-pixels");
  }
  if (inputs.empty()) throw Error(ErrorCode::ConfigError, "no input files");
  if (!(angle_deg > 0.0 && angle_deg < 90.0)) {
    throw Error(ErrorCode::ConfigError, "angle of repose must lie in (0, 90) degrees");
  }
  if (!(density_t_per_m3 > 0.0) || !std::isfinite(density_t_per_m3)) {
    throw Error(ErrorCode::ConfigError, "bulk density must be positive");
  }
  if (reference_kt && !(*reference_kt > 0.0)) {
    throw Error(ErrorCode::ConfigError, "reference weight must be positive");
  }
  try {
    (void)geometry();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

GridGeometry RunConfig::geometry() const {
  if (pixel_size_m) return GridGeometry(*pixel_size_m);
  if (reference_length_m && reference_length_px) {
    return pixel_scale_from_reference(*reference_length_m, *reference_length_px);
  }
  throw Error(ErrorCode::ConfigError, "no calibration given");
}

MaterialSpec RunConfig::material() const {
  return MaterialSpec(material_name, density_t_per_m3, ReposeAngle(angle_deg));
}

// ---------------------------------------------------------------------------
// Batch run

ReportTotals summarize(const std::vector<PileRow>& piles, std::optional<double> reference_kt) {
  ReportTotals totals;
  CompensatedSum volume;
  CompensatedSum footprint;
  CompensatedSum weight;
  for (const PileRow& row : piles) {
    if (!row.ok()) {
      ++totals.failed_count;
      continue;
    }
    ++totals.pile_count;
    volume.add(row.estimate.volume_m3);
    footprint.add(row.estimate.footprint_m2);
    weight.add(row.weight_kt);
  }
  totals.volume_m3 = volume.value();
  totals.footprint_m2 = footprint.value();
  totals.weight_kt = weight.value();
  totals.reference_kt = reference_kt;
  if (reference_kt && *reference_kt > 0.0) {
    totals.relative_error_pct = 100.0 * (totals.weight_kt - *reference_kt) / *reference_kt;
  }
  return totals;
}

namespace {

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long value = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') now = static_cast<std::time_t>(value);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

InputKind guess_kind(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".json") return InputKind::annotation_json;
  if (ext == ".pgm" || ext == ".pbm" || ext == ".pnm") return InputKind::raster_mask;
  throw Error(ErrorCode::InputError, "cannot tell the input kind of " + path.string());
}

std::string file_safe(std::string_view text) {
  std::string out;
  for (char c : text) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out.empty() ? "pile" : out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InputError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Connected pile regions (8-connectivity), each cropped to its bounding box
// plus a one-pixel margin. Regions are ordered by their first pixel in
// row-major order.
std::vector<RasterMask> split_components(const RasterMask& mask) {
  Grid<int> label(mask.width(), mask.height(), -1);
  std::vector<RasterMask> parts;
  std::deque<std::pair<int, int>> queue;
  std::vector<std::pair<int, int>> members;
  int next = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y) || label.at(x, y) >= 0) continue;
      members.clear();
      queue.emplace_back(x, y);
      label.at(x, y) = next;
      int x0 = x, x1 = x, y0 = y, y1 = y;
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        members.emplace_back(cx, cy);
        x0 = std::min(x0, cx);
        x1 = std::max(x1, cx);
        y0 = std::min(y0, cy);
        y1 = std::max(y1, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (mask.at_or_background(nx, ny) && label.at(nx, ny) < 0) {
              label.at(nx, ny) = next;
              queue.emplace_back(nx, ny);
            }
          }
        }
      }
      RasterMask part(x1 - x0 + 3, y1 - y0 + 3);
      for (const auto& [mx, my] : members) part.set(mx - x0 + 1, my - y0 + 1);
      parts.push_back(std::move(part));
      ++next;
    }
  }
  return parts;
}

class PileExporter {
 public:
  PileExporter(const RunConfig& config) : config_(config) {
    if ((config.exports.heightmap || config.exports.mesh) && !config.output_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(config.output_dir, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create " + config.output_dir.string());
      enabled_ = true;
    }
  }

  void operator()(const std::string& stem, const std::string& pile_id, const HeightField& heights) const {
    if (!enabled_) return;
    const std::string base = file_safe(stem) + "_" + file_safe(pile_id);
    if (config_.exports.heightmap) {
      write_height_grid(config_.output_dir / (base + ".asc"), heights);
      write_height_pgm16(config_.output_dir / (base + ".pgm"), heights);
    }
    if (config_.exports.mesh) write_height_obj(config_.output_dir / (base + ".obj"), heights);
  }

 private:
  const RunConfig& config_;
  bool enabled_ = false;
};

}  // namespace

Report run(const RunConfig& config) {
  config.validate();
  const GridGeometry geometry = config.geometry();
  const MaterialSpec material = config.material();
  const PileExporter exporter(config);

  Report report;
  report.tool_version = std::string(tool_version());
  report.config.material = material.name;
  report.config.pixel_size_m = geometry.pixel_size_m();
  report.config.angle_deg = material.repose.degrees();
  report.config.density_t_per_m3 = material.bulk_density_t_per_m3;
  report.config.path = to_string(config.path);

  auto record = [&](PileRow row, const HeightField* heights, const std::string& stem) {
    if (row.ok()) {
      row.weight_kt = estimate_weight(row.estimate, material);
      if (heights != nullptr) exporter(stem, row.pile_id, *heights);
    }
    report.piles.push_back(std::move(row));
  };
  auto failed = [](PileRow row, const Error& e) {
    row.status = std::string(to_string(e.code()));
    row.message = e.what();
    return row;
  };

  for (const auto& input : config.inputs) {
    const std::string source = input.filename().string();
    const std::string stem = input.stem().string();
    report.config.inputs.push_back(source);
    const InputKind kind = config.input_kind.value_or(guess_kind(input));

    if (kind == InputKind::annotation_json) {
      LenientAnnotationSet set;
      try {
        set = parse_annotations_lenient(read_text(input));
      } catch (const Error& e) {
        throw Error(ErrorCode::InputError, input.string() + ": " + e.what());
      }
      for (const AnnotationEntry& entry : set.entries) {
        PileRow row;
        row.source = source;
        row.pile_id = entry.pile_id;
        if (entry.error) {
          row.status = std::string(to_string(*entry.error));
          row.message = entry.message;
          record(std::move(row), nullptr, stem);
          continue;
        }
        try {
          const PileRaster raster = fit_grid(PileContour(entry.pile_id, entry.vertices));
          const HeightField heights =
              height_field(contour_distance_field(raster, config.path), geometry, material.repose);
          row.estimate = integrate_volume(heights, entry.pile_id);
          record(std::move(row), &heights, stem);
        } catch (const Error& e) {
          record(failed(std::move(row), e), nullptr, stem);
        }
      }
    } else {
      RasterMask mask(1, 1);
      try {
        mask = parse_raster_mask(read_text(input));
      } catch (const Error& e) {
        throw Error(ErrorCode::InputError, input.string() + ": " + e.what());
      }
      const std::vector<RasterMask> parts = split_components(mask);
      for (std::size_t k = 0; k < parts.size(); ++k) {
        PileRow row;
        row.source = source;
        row.pile_id = stem + "-" + std::to_string(k + 1);
        try {
          const HeightField heights =
              height_field(mask_distance_field(parts[k], config.path), geometry, material.repose);
          row.estimate = integrate_volume(heights, row.pile_id);
          record(std::move(row), &heights, stem);
        } catch (const Error& e) {
          record(failed(std::move(row), e), nullptr, stem);
        }
      }
    }
  }

  report.totals = summarize(report.piles, config.reference_kt);
  report.timestamp = utc_timestamp();
  return report;
}

// ---------------------------------------------------------------------------
// Report formats

namespace {

std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  std::string out = buffer;
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

// Value of a printed fixed-point number in units of its last decimal.
long long printed_units(const std::string& printed) {
  std::string digits;
  for (char c : printed) {
    if (c != '.') digits.push_back(c);
  }
  return std::stoll(digits);
}

std::string units_to_fixed(long long units, int decimals) {
  const bool negative = units < 0;
  std::string digits = std::to_string(negative ? -units : units);
  if (digits.size() <= static_cast<std::size_t>(decimals)) {
    digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
  }
  digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
  return (negative ? "-" : "") + digits;
}

// Sums printed values so a total line matches its rows to the last digit.
class PrintedTotal {
 public:
  explicit PrintedTotal(int decimals) : decimals_(decimals) {}
  std::string add(double value) {
    std::string printed = fixed(value, decimals_);
    units_ += printed_units(printed);
    return printed;
  }
  std::string str() const { return units_to_fixed(units_, decimals_); }

 private:
  int decimals_;
  long long units_ = 0;
};

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string format_csv(const Report& report) {
  std::ostringstream out;
  out << "source,pile_id,status,volume_m3,footprint_px,footprint_m2,max_height_m,weight_kt\n";
  PrintedTotal volume(6);
  PrintedTotal footprint(6);
  PrintedTotal weight(6);
  std::size_t pixels = 0;
  for (const PileRow& row : report.piles) {
    out << csv_field(row.source) << ',' << csv_field(row.pile_id) << ',' << csv_field(row.status) << ',';
    if (row.ok()) {
      out << volume.add(row.estimate.volume_m3) << ',' << row.estimate.footprint_px << ','
          << footprint.add(row.estimate.footprint_m2) << ',' << fixed(row.estimate.max_height_m, 6) << ','
          << weight.add(row.weight_kt) << '\n';
      pixels += row.estimate.footprint_px;
    } else {
      out << ",,,,\n";
    }
  }
  out << "TOTAL,," << report.totals.pile_count << " ok/" << report.totals.failed_count << " failed,"
      << volume.str() << ',' << pixels << ',' << footprint.str() << ",," << weight.str() << '\n';
  return out.str();
}

std::string format_text(const Report& report) {
  std::vector<std::array<std::string, 3>> cells;
  cells.push_back({"Pile no.", "Volume (m³)", "Weight (kt)"});
  PrintedTotal volume(6);
  PrintedTotal weight(2);
  for (const PileRow& row : report.piles) {
    if (row.ok()) {
      cells.push_back({row.pile_id, volume.add(row.estimate.volume_m3), weight.add(row.weight_kt)});
    } else {
      cells.push_back({row.pile_id, "failed: " + row.status, "-"});
    }
  }
  cells.push_back({"Total", volume.str(), weight.str()});

  // Width in code points; the header contains a multi-byte superscript.
  auto display_width = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  std::array<std::size_t, 3> widths{};
  for (const auto& line : cells)
    for (std::size_t c = 0; c < 3; ++c) widths[c] = std::max(widths[c], display_width(line[c]));

  std::ostringstream out;
  auto emit = [&](const std::array<std::string, 3>& line) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (c != 0) out << " | ";
      const std::size_t pad = widths[c] - display_width(line[c]);
      if (c == 0) out << line[c] << std::string(pad, ' ');
      else out << std::string(pad, ' ') << line[c];
    }
    out << '\n';
  };
  const std::string rule(widths[0] + widths[1] + widths[2] + 6, '-');
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i + 1 == cells.size()) out << rule << '\n';
    emit(cells[i]);
    if (i == 0) out << rule << '\n';
  }
  if (report.totals.relative_error_pct) {
    out << "Reference " << fixed(*report.totals.reference_kt, 2) << " kt, error "
        << fixed(*report.totals.relative_error_pct, 1) << "%\n";
  }
  return out.str();
}

ordered_json optional_number(const std::optional<double>& value) {
  return value ? ordered_json(*value) : ordered_json(nullptr);
}

ordered_json to_json(const Report& report) {
  ordered_json piles = ordered_json::array();
  for (const PileRow& row : report.piles) {
    piles.push_back({{"source", row.source},
                     {"pile_id", row.pile_id},
                     {"status", row.status},
                     {"message", row.message},
                     {"volume_m3", row.estimate.volume_m3},
                     {"footprint_px", row.estimate.footprint_px},
                     {"footprint_m2", row.estimate.footprint_m2},
                     {"max_height_m", row.estimate.max_height_m},
                     {"weight_kt", row.weight_kt}});
  }
  const ReportTotals& t = report.totals;
  return {{"schema_version", report.schema_version},
          {"tool_version", report.tool_version},
          {"config",
           {{"material", report.config.material},
            {"pixel_size_m", report.config.pixel_size_m},
            {"angle_deg", report.config.angle_deg},
            {"density_t_per_m3", report.config.density_t_per_m3},
            {"path", report.config.path},
            {"inputs", report.config.inputs}}},
          {"piles", std::move(piles)},
          {"totals",
           {{"pile_count", t.pile_count},
            {"failed_count", t.failed_count},
            {"volume_m3", t.volume_m3},
            {"footprint_m2", t.footprint_m2},
            {"weight_kt", t.weight_kt},
            {"reference_kt", optional_number(t.reference_kt)},
            {"relative_error_pct", optional_number(t.relative_error_pct)}}},
          {"metadata", {{"timestamp", report.timestamp}}}};
}

}  // namespace

std::string format_report(const Report& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return format_csv(report);
    case ReportFormat::json: return to_json(report).dump(2) + "\n";
    case ReportFormat::text: return format_text(report);
  }
  return {};
}

void write_report(const Report& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << format_report(report, format);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Report parse_report_json(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text.begin(), json_text.end());
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  try {
    Report report;
    report.schema_version = doc.at("schema_version").get<int>();
    if (report.schema_version != Report::kSchemaVersion) {
      throw Error(ErrorCode::SchemaViolation, "unsupported report schema " + std::to_string(report.schema_version));
    }
    report.tool_version = doc.at("tool_version").get<std::string>();
    const auto& c = doc.at("config");
    report.config.material = c.at("material").get<std::string>();
    report.config.pixel_size_m = c.at("pixel_size_m").get<double>();
    report.config.angle_deg = c.at("angle_deg").get<double>();
    report.config.density_t_per_m3 = c.at("density_t_per_m3").get<double>();
    report.config.path = c.at("path").get<std::string>();
    report.config.inputs = c.at("inputs").get<std::vector<std::string>>();
    for (const auto& p : doc.at("piles")) {
      PileRow row;
      row.source = p.at("source").get<std::string>();
      row.pile_id = p.at("pile_id").get<std::string>();
      row.status = p.at("status").get<std::string>();
      row.message = p.at("message").get<std::string>();
      if (row.ok()) row.estimate.pile_id = row.pile_id;
      row.estimate.volume_m3 = p.at("volume_m3").get<double>();
      row.estimate.footprint_px = p.at("footprint_px").get<std::size_t>();
      row.estimate.footprint_m2 = p.at("footprint_m2").get<double>();
      row.estimate.max_height_m = p.at("max_height_m").get<double>();
      row.weight_kt = p.at("weight_kt").get<double>();
      report.piles.push_back(std::move(row));
    }
    const auto& t = doc.at("totals");
    report.totals.pile_count = t.at("pile_count").get<std::size_t>();
    report.totals.failed_count = t.at("failed_count").get<std::size_t>();
    report.totals.volume_m3 = t.at("volume_m3").get<double>();
    report.totals.footprint_m2 = t.at("footprint_m2").get<double>();
    report.totals.weight_kt = t.at("weight_kt").get<double>();
    if (!t.at("reference_kt").is_null()) report.totals.reference_kt = t.at("reference_kt").get<double>();
    if (!t.at("relative_error_pct").is_null()) {
      report.totals.relative_error_pct = t.at("relative_error_pct").get<double>();
    }
    report.timestamp = doc.at("metadata").at("timestamp").get<std::string>();
    return report;
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
}

std::string json_payload(std::string_view report_json) {
  ordered_json doc = ordered_json::parse(report_json.begin(), report_json.end());
  doc.erase("metadata");
  return doc.dump(2);
}

}  // namespace reposevol
