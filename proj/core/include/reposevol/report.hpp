#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reposevol/error.hpp"
#include "reposevol/volume.hpp"

namespace reposevol {

enum class InputKind { annotation_json, raster_mask };

struct ExportToggles {
  bool heightmap = false;  // .asc ASCII grid and 16-bit .pgm per pile
  bool mesh = false;       // .obj per pile
  bool csv = false;        // report.csv
  bool json = false;       // report.json

  static ExportToggles parse(std::string_view comma_list);
};

/// Everything a batch run needs. Exactly one calibration source must be set:
/// either pixel_size_m, or both reference_length_m and reference_length_px.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::optional<InputKind> input_kind;  // guessed from the extension when unset
  std::optional<double> pixel_size_m;
  std::optional<double> reference_length_m;
  std::optional<double> reference_length_px;
  std::string material_name = "material";
  double angle_deg = 0.0;
  double density_t_per_m3 = 0.0;
  DistancePath path = DistancePath::raster;
  std::filesystem::path output_dir;
  ExportToggles exports;
  std::optional<double> reference_kt;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
  GridGeometry geometry() const;
  MaterialSpec material() const;
};

struct PileRow {
  std::string source;   // input file name
  std::string pile_id;
  std::string status = "ok";  // "ok" or the error code name
  std::string message;
  VolumeEstimate estimate;
  double weight_kt = 0.0;

  bool ok() const noexcept { return status == "ok"; }
  bool operator==(const PileRow&) const = default;
};

struct ReportTotals {
  std::size_t pile_count = 0;
  std::size_t failed_count = 0;
  double volume_m3 = 0.0;
  double footprint_m2 = 0.0;
  double weight_kt = 0.0;
  std::optional<double> reference_kt;
  std::optional<double> relative_error_pct;

  bool operator==(const ReportTotals&) const = default;
};

struct ReportConfigEcho {
  std::string material;
  double pixel_size_m = 0.0;
  double angle_deg = 0.0;
  double density_t_per_m3 = 0.0;
  std::string path;
  std::vector<std::string> inputs;

  bool operator==(const ReportConfigEcho&) const = default;
};

struct Report {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::string tool_version;
  ReportConfigEcho config;
  std::vector<PileRow> piles;
  ReportTotals totals;
  std::string timestamp;  // metadata only; excluded from the payload determinism contract

  bool operator==(const Report&) const = default;
};

std::string_view tool_version() noexcept;

/// Recomputes totals from the per-pile rows.
ReportTotals summarize(const std::vector<PileRow>& piles, std::optional<double> reference_kt);

/// Runs the whole batch. Unreadable or unparsable inputs raise InputError;
/// individual piles that fail are recorded with their error status.
/// Requested exports are written to config.output_dir.
Report run(const RunConfig& config);

enum class ReportFormat { csv, json, text };

// CSV: header
//   source,pile_id,status,volume_m3,footprint_px,footprint_m2,max_height_m,weight_kt
// then one row per pile in input order and a final row with source "TOTAL".
// Volumes, areas and heights have 6 decimals, weights 6 decimals; the TOTAL row
// is the sum of the printed values of successful rows.
//
// JSON: {"schema_version", "tool_version", "config", "piles", "totals",
//        "metadata": {"timestamp"}} with unrounded numbers.
//
// Text: a table "Pile no. | Volume (m³) | Weight (kt)" with weights rounded to
// two decimals and a total line.
std::string format_report(const Report& report, ReportFormat format);
void write_report(const Report& report, ReportFormat format, const std::filesystem::path& path);
Report parse_report_json(std::string_view json_text);

/// The JSON document minus the metadata object, i.e. the part that is
/// byte-identical across runs with the same inputs.
std::string json_payload(std::string_view report_json);

}  // namespace reposevol
