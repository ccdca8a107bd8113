// reposevol command line front end.
//
//   reposevol estimate   piles.json|mask.pgm ... --pixel-size 0.01 --angle 32.78 --density 1.6
//   reposevol synth      --kind reclaimed-cone --radius 90 --bite 40 --out pile.json
//   reposevol sweep      piles.json --mode angle --values 0.25,0.5,...
//   reposevol resstudy   --kind elongated --radius 90 --ridge 370 --factors 1,8.4,28
//   reposevol downsample mask.pgm --factor 8.4 --out small.pgm
//   reposevol calibrate  --ref-length 0.84 --ref-pixels 650
//
// Every option of the form --some-name can also be set through the
// environment variable REPOSEVOL_SOME_NAME; the command line wins.
//
// Exit status: 0 on success, 2 for configuration errors (bad flags or
// parameters), 3 for input errors (unreadable or invalid input files), 1 for
// anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reposevol/error.hpp"
#include "reposevol/mask_io.hpp"
#include "reposevol/pile_synth.hpp"
#include "reposevol/report.hpp"
#include "reposevol/sensitivity.hpp"
#include "reposevol/volume.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace reposevol;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::NonPositiveInput:
    case ErrorCode::InvalidAngle:
    case ErrorCode::InvalidSpec:
    case ErrorCode::AngleOutOfRange:
    case ErrorCode::InvalidPerturbation:
    case ErrorCode::InsufficientPoints:
    case ErrorCode::FactorTooLarge:
      return kExitConfig;
    case ErrorCode::InputError:
    case ErrorCode::MalformedJson:
    case ErrorCode::SchemaViolation:
    case ErrorCode::DegeneratePolygon:
    case ErrorCode::SelfIntersecting:
    case ErrorCode::OutOfBounds:
    case ErrorCode::IoError:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::EmptyInput:
      return kExitInput;
  }
  return kExitFailure;
}

std::string env_name(const std::string& flag) {
  std::string name = "REPOSEVOL_";
  for (char c : flag) name.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return name;
}

// Option with its REPOSEVOL_* environment override attached.
template <typename T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option("--" + name, target, help)->envname(env_name(name));
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "bad number '" + item + "' in " + what);
    }
  }
  return values;
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

// Either an explicit pixel size or a reference length measured in pixels.
struct Calibration {
  std::optional<double> pixel_size;
  std::optional<double> ref_length;
  std::optional<double> ref_pixels;

  void add_to(CLI::App* app) {
    flag(app, "pixel-size", pixel_size, "Ground size of one pixel in meters");
    flag(app, "ref-length", ref_length, "Length of a reference object in meters");
    flag(app, "ref-pixels", ref_pixels, "Length of the same reference object in pixels");
  }

  GridGeometry geometry() const {
    RunConfig probe;
    probe.inputs = {"-"};
    probe.angle_deg = 45.0;
    probe.density_t_per_m3 = 1.0;
    probe.pixel_size_m = pixel_size;
    probe.reference_length_m = ref_length;
    probe.reference_length_px = ref_pixels;
    probe.validate();
    return probe.geometry();
  }
};

// Synthetic pile parameters shared by `synth` and `resstudy`.
struct SpecOptions {
  std::string kind = "cone";
  double radius = 90.0;
  double ridge = 0.0;
  double bite = 0.0;
  double bite_dx = 0.0;
  std::optional<double> bite_dy;
  int vertices = 256;
  std::optional<double> center_x;
  std::optional<double> center_y;
  std::string id = "pile";

  void add_to(CLI::App* app) {
    flag(app, "kind", kind, "cone, elongated, reclaimed-cone or reclaimed-elongated")->capture_default_str();
    flag(app, "radius", radius, "Base radius in pixels")->capture_default_str();
    flag(app, "ridge", ridge, "Ridge length of elongated piles in pixels (total length = ridge + 2 radius)")
        ->capture_default_str();
    flag(app, "bite", bite, "Radius of the reclaim bite in pixels");
    flag(app, "bite-dx", bite_dx, "Bite center x offset from the pile center in pixels")->capture_default_str();
    flag(app, "bite-dy", bite_dy, "Bite center y offset from the pile center in pixels (default: radius)");
    flag(app, "vertices", vertices, "Outline vertex count")->capture_default_str();
    flag(app, "center-x", center_x, "Pile center x in pixels (default: just inside the image corner)");
    flag(app, "center-y", center_y, "Pile center y in pixels");
    flag(app, "id", id, "Pile identifier")->capture_default_str();
  }

  PileSpec spec() const {
    PileSpec s;
    try {
      s.kind = parse_pile_kind(kind);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
    s.radius_px = radius;
    s.ridge_len_px = ridge;
    s.bite_radius_px = bite;
    s.bite_offset = {bite_dx, bite_dy.value_or(radius)};
    s.n_vertices = vertices;
    const double half_length = s.elongated() ? 0.5 * ridge : 0.0;
    s.center = {center_x.value_or(radius + half_length + 2.0), center_y.value_or(radius + 2.0)};
    s.pile_id = id;
    return s;
  }
};

ordered_json spec_json(const PileSpec& spec) {
  ordered_json j = {{"pile_id", spec.pile_id},
                    {"kind", to_string(spec.kind)},
                    {"radius_px", spec.radius_px},
                    {"ridge_len_px", spec.ridge_len_px},
                    {"center", {spec.center.x, spec.center.y}},
                    {"n_vertices", spec.n_vertices}};
  if (spec.reclaimed()) {
    j["bite_radius_px"] = spec.bite_radius_px;
    j["bite_offset"] = {spec.bite_offset.x, spec.bite_offset.y};
  }
  return j;
}

const PileContour& select_pile(const AnnotationSet& set, const std::string& id) {
  if (set.contours.empty()) throw Error(ErrorCode::InputError, "annotation file contains no piles");
  if (id.empty()) return set.contours.front();
  for (const auto& c : set.contours)
    if (c.pile_id() == id) return c;
  throw Error(ErrorCode::InputError, "no pile with id '" + id + "'");
}

AnnotationSet load_annotations_checked(const fs::path& path) {
  try {
    return load_annotations(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::InputError, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

struct EstimateCommand {
  std::vector<std::string> inputs;
  std::string input_kind;
  Calibration calibration;
  std::optional<double> angle;
  std::optional<double> density;
  std::string material = "material";
  std::string path = "raster";
  std::string exports;
  std::string out = ".";
  std::optional<double> reference_kt;
  bool quiet = false;

  void add_to(CLI::App* app) {
    app->add_option("inputs", inputs, "Annotation JSON files or binary mask images (PGM/PBM)")->required();
    flag(app, "input-kind", input_kind, "json or mask (default: guessed from the extension)");
    calibration.add_to(app);
    flag(app, "angle", angle, "Angle of repose in degrees");
    flag(app, "density", density, "Bulk density in t/m3");
    flag(app, "material", material, "Material name echoed in the report")->capture_default_str();
    flag(app, "path", path, "Distance computation: raster, exact (sub-pixel polygon) or outline")
        ->capture_default_str();
    flag(app, "export", exports, "Comma list of heightmap, mesh, csv, json");
    flag(app, "out", out, "Output directory for exports")->capture_default_str();
    flag(app, "reference-kt", reference_kt, "Reference total weight in kt for the error line");
    app->add_flag("-q,--quiet", quiet, "Do not print the summary table");
  }

  int operator()() const {
    RunConfig config;
    for (const auto& input : inputs) config.inputs.emplace_back(input);
    if (input_kind == "json") config.input_kind = InputKind::annotation_json;
    else if (input_kind == "mask") config.input_kind = InputKind::raster_mask;
    else if (!input_kind.empty()) throw Error(ErrorCode::ConfigError, "unknown input kind '" + input_kind + "'");
    config.pixel_size_m = calibration.pixel_size;
    config.reference_length_m = calibration.ref_length;
    config.reference_length_px = calibration.ref_pixels;
    if (!angle) throw Error(ErrorCode::ConfigError, "--angle is required");
    if (!density) throw Error(ErrorCode::ConfigError, "--density is required");
    config.angle_deg = *angle;
    config.density_t_per_m3 = *density;
    config.material_name = material;
    config.path = parse_distance_path(path);
    config.exports = ExportToggles::parse(exports);
    config.output_dir = out;
    config.reference_kt = reference_kt;

    const Report report = run(config);
    if (config.exports.csv || config.exports.json) {
      std::error_code ec;
      fs::create_directories(config.output_dir, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create " + config.output_dir.string());
    }
    if (config.exports.csv) write_report(report, ReportFormat::csv, config.output_dir / "report.csv");
    if (config.exports.json) write_report(report, ReportFormat::json, config.output_dir / "report.json");
    if (!quiet) std::cout << format_report(report, ReportFormat::text);
    for (const PileRow& row : report.piles) {
      if (!row.ok()) std::cerr << "warning: " << row.source << " pile " << row.pile_id << ": " << row.message << '\n';
    }
    return 0;
  }
};

struct SynthCommand {
  SpecOptions spec_options;
  Calibration calibration;
  double angle = 32.78;
  int oversample = 8;
  std::string out;
  std::string mask;

  void add_to(CLI::App* app) {
    spec_options.add_to(app);
    calibration.add_to(app);
    flag(app, "angle", angle, "Angle of repose in degrees for the reference volumes")->capture_default_str();
    flag(app, "oversample", oversample, "Brute-force sampling factor per axis")->capture_default_str();
    flag(app, "out", out, "Annotation JSON to write; <stem>.reference.json is written next to it")->required();
    flag(app, "mask", mask, "Also write the rasterized footprint as a PGM mask");
  }

  int operator()() const {
    const PileSpec spec = spec_options.spec();
    const GridGeometry geometry = calibration.geometry();
    const ReposeAngle repose(angle);
    const PileContour contour = make_contour(spec);

    AnnotationSet set;
    set.source = "reposevol synth";
    set.contours.push_back(contour);
    const fs::path out_path(out);
    write_text(out_path, serialize_annotations(set) + "\n");

    const auto analytic = analytic_volume(spec, geometry, repose);
    ordered_json sidecar = {{"spec", spec_json(spec)},
                            {"pixel_size_m", geometry.pixel_size_m()},
                            {"angle_deg", angle},
                            {"area_px", contour.area()},
                            {"analytic_m3", analytic ? ordered_json(*analytic) : ordered_json(nullptr)},
                            {"brute_force_m3", brute_force_volume(spec, geometry, repose, oversample)},
                            {"oversample", oversample}};
    fs::path sidecar_path = out_path;
    sidecar_path.replace_extension(".reference.json");
    write_text(sidecar_path, sidecar.dump(2) + "\n");

    if (!mask.empty()) {
      const BoundingBox box = contour.bounds();
      const int width = static_cast<int>(std::ceil(box.max_x)) + 2;
      const int height = static_cast<int>(std::ceil(box.max_y)) + 2;
      save_raster_mask(rasterize(contour, width, height), mask);
    }
    std::cout << "wrote " << out_path.string() << " and " << sidecar_path.string() << '\n';
    return 0;
  }
};

struct SweepCommand {
  std::string input;
  std::string pile;
  std::string mode = "angle";
  std::string values;
  Calibration calibration;
  std::optional<double> angle;
  std::optional<std::string> path;
  std::string out;
  std::string fit;

  void add_to(CLI::App* app) {
    app->add_option("input", input, "Annotation JSON holding the pile contour")->required();
    flag(app, "pile", pile, "Pile id (default: the first pile)");
    flag(app, "mode", mode, "angle (delta degrees) or area (percent area change)")->capture_default_str();
    flag(app, "values", values, "Comma list of perturbations")->required();
    calibration.add_to(app);
    flag(app, "angle", angle, "Base angle of repose in degrees");
    flag(app, "path", path, "Distance computation (default: raster for angle, exact for area)");
    flag(app, "out", out, "CSV file (default: standard output)");
    flag(app, "fit", fit, "Write the linear fit as JSON to this file");
  }

  int operator()() const {
    if (!angle) throw Error(ErrorCode::ConfigError, "--angle is required");
    const GridGeometry geometry = calibration.geometry();
    const ReposeAngle repose(*angle);
    const AnnotationSet set = load_annotations_checked(input);
    const PileContour& contour = select_pile(set, pile);
    const std::vector<double> perturbations = parse_list(values, "--values");

    SweepSeries series;
    if (mode == "angle") {
      series = angle_sweep(contour, geometry, repose, perturbations, parse_distance_path(path.value_or("raster")));
    } else if (mode == "area") {
      series = contour_scale_sweep(contour, geometry, repose, perturbations,
                                   parse_distance_path(path.value_or("exact")));
    } else {
      throw Error(ErrorCode::ConfigError, "unknown sweep mode '" + mode + "'");
    }

    std::ostringstream csv;
    csv.precision(10);
    csv << "perturbation,volume_m3,volume_increase_pct\n";
    for (const auto& p : series.points)
      csv << p.perturbation << ',' << p.volume_m3 << ',' << p.volume_increase_pct << '\n';
    if (out.empty()) std::cout << csv.str();
    else write_text(out, csv.str());

    if (!fit.empty()) {
      const SensitivityFit f = fit_linear(series);
      const ordered_json j = {{"mode", mode}, {"slope", f.slope}, {"intercept", f.intercept}, {"rms", f.rms}};
      write_text(fit, j.dump(2) + "\n");
    }
    return 0;
  }
};

struct ResStudyCommand {
  SpecOptions spec_options;
  Calibration calibration;
  double angle = 32.78;
  std::string factors = "1,8.4,28";
  std::string path = "outline";
  int oversample = 8;
  std::string out;
  std::string json;

  void add_to(CLI::App* app) {
    spec_options.add_to(app);
    calibration.add_to(app);
    flag(app, "angle", angle, "Angle of repose in degrees")->capture_default_str();
    flag(app, "factors", factors, "Comma list of downsampling factors")->capture_default_str();
    flag(app, "path", path, "Distance computation on the degraded mask")->capture_default_str();
    flag(app, "oversample", oversample, "Brute-force sampling factor of the reference")->capture_default_str();
    flag(app, "out", out, "CSV file (default: standard output)");
    flag(app, "json", json, "Also write the study as JSON");
  }

  int operator()() const {
    const PileSpec spec = spec_options.spec();
    ResolutionStudyOptions options;
    options.path = parse_distance_path(path);
    options.oversample = oversample;
    const ResolutionStudy study =
        resolution_study(spec, calibration.geometry(), ReposeAngle(angle), parse_list(factors, "--factors"), options);

    std::ostringstream csv;
    csv.precision(10);
    csv << "factor,pixel_size_m,volume_m3,error_pct\n";
    for (const auto& row : study.rows)
      csv << row.factor << ',' << row.pixel_size_m << ',' << row.volume_m3 << ',' << row.error_pct << '\n';
    if (out.empty()) std::cout << csv.str();
    else write_text(out, csv.str());

    if (!json.empty()) {
      ordered_json rows = ordered_json::array();
      for (const auto& row : study.rows) {
        rows.push_back({{"factor", row.factor},
                        {"pixel_size_m", row.pixel_size_m},
                        {"volume_m3", row.volume_m3},
                        {"error_pct", row.error_pct}});
      }
      const ordered_json j = {{"spec", spec_json(spec)},
                              {"path", to_string(options.path)},
                              {"reference_m3", study.reference_m3},
                              {"rows", rows}};
      write_text(json, j.dump(2) + "\n");
    }
    return 0;
  }
};

struct DownsampleCommand {
  std::string input;
  double factor = 0.0;
  std::string out;

  void add_to(CLI::App* app) {
    app->add_option("input", input, "Binary mask image (PGM/PBM)")->required();
    flag(app, "factor", factor, "Reduction factor, greater than 1")->required();
    flag(app, "out", out, "Output PGM mask")->required();
  }

  int operator()() const {
    RasterMask mask(1, 1);
    try {
      mask = load_raster_mask(input);
    } catch (const Error& e) {
      throw Error(ErrorCode::InputError, input + ": " + e.what());
    }
    const RasterMask reduced = downsample_mask(mask, factor);
    save_raster_mask(reduced, out);
    std::cout << mask.width() << "x" << mask.height() << " (" << mask.count() << " set) -> " << reduced.width()
              << "x" << reduced.height() << " (" << reduced.count() << " set)\n";
    return 0;
  }
};

struct CalibrateCommand {
  Calibration calibration;
  bool json = false;

  void add_to(CLI::App* app) {
    calibration.add_to(app);
    app->add_flag("--json", json, "Print a JSON record instead of plain text");
  }

  int operator()() const {
    if (!calibration.ref_length || !calibration.ref_pixels)
      throw Error(ErrorCode::ConfigError, "calibrate needs --ref-length and --ref-pixels");
    const GridGeometry g = calibration.geometry();
    if (json) {
      const ordered_json j = {{"reference_length_m", *calibration.ref_length},
                              {"reference_length_px", *calibration.ref_pixels},
                              {"pixel_size_m", g.pixel_size_m()}};
      std::cout << j.dump(2) << '\n';
    } else {
      char buffer[64];
      std::snprintf(buffer, sizeof buffer, "%.9g", g.pixel_size_m());
      std::cout << "pixel_size_m " << buffer << '\n';
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stockpile volume and weight from footprint contours and the angle of repose"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  EstimateCommand estimate;
  SynthCommand synth;
  SweepCommand sweep;
  ResStudyCommand resstudy;
  DownsampleCommand downsample;
  CalibrateCommand calibrate;
  estimate.add_to(app.add_subcommand("estimate", "Estimate pile volumes and weights"));
  synth.add_to(app.add_subcommand("synth", "Write a synthetic pile annotation and its reference volumes"));
  sweep.add_to(app.add_subcommand("sweep", "Volume response to angle or contour-area perturbations"));
  resstudy.add_to(app.add_subcommand("resstudy", "Volume error of a synthetic pile at coarser resolutions"));
  downsample.add_to(app.add_subcommand("downsample", "Reduce a binary mask by a real factor"));
  calibrate.add_to(app.add_subcommand("calibrate", "Pixel size from a reference object"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "estimate") return estimate();
    if (name == "synth") return synth();
    if (name == "sweep") return sweep();
    if (name == "resstudy") return resstudy();
    if (name == "downsample") return downsample();
    if (name == "calibrate") return calibrate();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
