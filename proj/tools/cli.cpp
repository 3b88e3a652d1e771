// Copyright 2026 The Slopewise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "slopewise/slopewise.hpp"

namespace slopewise::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string input;
  std::string output;
  std::string model;
  std::string terrain;
  std::string config;
  std::string eval_mode;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  // subcommand specific
  std::string scenario;
  std::string manifest;
  std::string report;
  std::string samples;
  std::string axis;
};

Json load_config(const Options& o) {
  return o.config.empty() ? Json::object() : read_json_file(o.config);
}

WrenchModel load_model(const Options& o) {
  if (o.model.empty()) throw Error(ErrorCode::kInvalidArgument, "--model is required");
  WrenchModel m = model_from_json(read_json_file(o.model));
  if (!o.eval_mode.empty()) m.eval_mode = eval_mode_from_string(o.eval_mode);
  return m;
}

Terrain require_terrain(const Options& o) {
  if (o.terrain.empty()) throw Error(ErrorCode::kInvalidArgument, "--terrain is required");
  return load_terrain(o.terrain);
}

double dt_of(const Options& o) {
  const double dt = o.dt.value_or(kDefaultDt);
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--dt must be > 0");
  return dt;
}

// Writes to --output when given, otherwise to `out`.
void emit(const Options& o, std::ostream& out, const std::function<void(std::ostream&)>& fn) {
  if (o.output.empty()) {
    fn(out);
    return;
  }
  std::ofstream f(o.output);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + o.output);
  fn(f);
}

void emit_json(const Options& o, std::ostream& out, const Json& j) {
  emit(o, out, [&](std::ostream& os) { os << std::setw(2) << j << '\n'; });
}

std::vector<TelemetrySample> read_telemetry(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "--input is required");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path);
  return parse_log(in);
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  Scenario sc;
  const std::string path = !o.scenario.empty() ? o.scenario : o.input;
  if (!path.empty()) {
    sc = scenario_from_json(read_json_file(path));
  } else {
    sc.legs = grid_legs(GridSpec{});
  }
  if (o.seed) sc.seed = *o.seed;
  const SyntheticLog log = generate_telemetry(sc);
  emit(o, out, [&](std::ostream& os) { write_log(os, log.samples); });
  std::string manifest = o.manifest;
  if (manifest.empty() && !o.output.empty()) manifest = o.output + ".manifest.json";
  if (!manifest.empty()) {
    std::ofstream f(manifest);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + manifest);
    f << std::setw(2) << manifest_json(sc, log) << '\n';
  }
  err << "synth: " << log.leg_runs << " leg runs, " << log.samples.size() << " samples\n";
  return kExitOk;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.output.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--output is required for cleaned telemetry");
  }
  const auto samples = read_telemetry(o.input);
  const Json cfg_json = load_config(o);
  const PreprocessConfig cfg =
      preprocess_config_from_json(cfg_json.value("preprocess", cfg_json));
  std::optional<WrenchModel> model;
  if (!o.model.empty()) model = load_model(o);
  const PreprocessResult res = preprocess(samples, cfg, model ? &*model : nullptr);
  emit(o, out, [&](std::ostream& os) { write_log(os, res.samples); });
  const Json report = to_json(res.report);
  if (!o.report.empty()) {
    std::ofstream f(o.report);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + o.report);
    f << std::setw(2) << report << '\n';
  } else {
    out << std::setw(2) << report << '\n';
  }
  err << "ingest: " << res.report.input_count << " in, " << res.report.output_count << " out\n";
  return kExitOk;
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.output.empty()) throw Error(ErrorCode::kInvalidArgument, "--output is required");
  const auto samples = read_telemetry(o.input);
  const Json cfg_json = load_config(o);
  CalibrationConfig cfg;
  cfg.idle_power_w = cfg_json.value("idle_power_w", 0.0);
  if (cfg_json.contains("windows")) cfg.windows = window_params_from_json(cfg_json.at("windows"));
  if (cfg_json.contains("basis_masks")) cfg.masks = masks_from_json(cfg_json.at("basis_masks"));
  // A terrain switches slope estimation from the IMU gravity vector to the map.
  std::optional<Terrain> terrain;
  if (!o.terrain.empty()) {
    terrain = load_terrain(o.terrain);
    cfg.terrain = &*terrain;
  }
  const CalibrationResult res = calibrate(samples, cfg);
  WrenchModel model = res.fit.model;
  if (!o.eval_mode.empty()) model.eval_mode = eval_mode_from_string(o.eval_mode);
  emit_json(o, out, to_json(model));
  if (!o.samples.empty()) {
    std::ofstream f(o.samples);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + o.samples);
    write_wrench_samples(f, res.samples);
  }
  Json report = to_json(res.fit.report);
  report["windows_found"] = res.windows_found;
  report["windows_without_dominant_axis"] = res.windows_without_dominant_axis;
  report["repeatability"] = to_json(repeatability_report(
      res.samples, cfg_json.value("alpha_bin_deg", 2.0), cfg_json.value("gamma_bin_deg", 15.0)));
  if (!o.report.empty()) {
    std::ofstream f(o.report);
    if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write " + o.report);
    f << std::setw(2) << report << '\n';
  } else {
    out << std::setw(2) << report << '\n';
  }
  err << "calibrate: " << res.samples.size() << " wrench samples, max residual rms "
      << res.fit.report.max_residual_rms() << '\n';
  return kExitOk;
}

std::vector<double> range_from(const Json& cfg, const char* key, std::vector<double> fallback) {
  const auto r = cfg.value(key, fallback);
  if (r.size() != 3) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " needs [lo, hi, step]");
  std::vector<double> out;
  for (double d : sample_range(r[0], r[1], r[2])) out.push_back(deg2rad(d));
  return out;
}

int cmd_map(const Options& o, std::ostream& out, std::ostream& err) {
  const WrenchModel model = load_model(o);
  const Json cfg = load_config(o);
  const auto alphas = range_from(cfg, "alpha_deg", {0.0, 20.0, 1.0});
  const auto gammas = range_from(cfg, "gamma_deg", {0.0, 180.0, 15.0});
  const MotionAxis axis =
      motion_axis_from_string(!o.axis.empty() ? o.axis : cfg.value("axis", std::string("forward")));
  const CostMap map = export_cost_map(model, alphas, gammas, axis);
  emit(o, out, [&](std::ostream& os) { write_cost_map_csv(os, map); });
  err << "map: " << alphas.size() << "x" << gammas.size() << " " << to_string(axis) << " cost map\n";
  return kExitOk;
}

int cmd_eval_path(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw Error(ErrorCode::kInvalidArgument, "--input is required");
  const PathSpec path = path_from_json(read_json_file(o.input));
  const Terrain terrain = require_terrain(o);
  const WrenchModel model = load_model(o);
  const EnergyReport rep = energy_of_path(path, terrain, model, dt_of(o));
  emit_json(o, out, to_json(rep));
  err << "eval-path: " << rep.total_j << " J over " << rep.duration_s << " s\n";
  return kExitOk;
}

int cmd_superpose(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw Error(ErrorCode::kInvalidArgument, "--input is required");
  const Json j = read_json_file(o.input);
  const PathSpec whole = path_from_json(detail::required<Json>(j, "whole"));
  const Terrain terrain = require_terrain(o);
  const WrenchModel model = load_model(o);
  const double dt = dt_of(o);
  std::vector<PathSpec> parts;
  if (j.contains("split_at")) {
    // Parts derived from the whole, cut on its integration grid.
    const auto [a, b] = split_path(whole, detail::required<double>(j, "split_at"), dt);
    parts = {a, b};
  } else {
    for (const auto& pj : detail::required<Json>(j, "parts")) parts.push_back(path_from_json(pj));
  }
  const double rel = superposition_check(parts, whole, terrain, model, dt);
  double parts_j = 0.0;
  for (const auto& p : parts) parts_j += energy_of_path(p, terrain, model, dt).total_j;
  const double whole_j = energy_of_path(whole, terrain, model, dt).total_j;
  emit_json(o, out,
            {{"schema_version", kSchemaVersion},
             {"relative_difference", rel},
             {"parts_j", parts_j},
             {"whole_j", whole_j}});
  err << "superpose: relative difference " << rel << '\n';
  return kExitOk;
}

int cmd_plan(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw Error(ErrorCode::kInvalidArgument, "--input is required");
  const Json j = read_json_file(o.input);
  const Terrain terrain = require_terrain(o);
  const WrenchModel model = load_model(o);
  LatticeConfig base;
  if (const auto* g = terrain.as_grid()) base = lattice_for(*g);
  if (o.dt) base.dt = dt_of(o);
  const LatticeConfig cfg = lattice_config_from_json(j.value("lattice", Json::object()), base);
  const Json start = detail::required<Json>(j, "start");
  const auto cell = detail::required<std::vector<std::size_t>>(start, "cell");
  const auto goal = detail::required<std::vector<std::size_t>>(j, "goal");
  if (cell.size() != 2 || goal.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "cells are [col, row]");
  }
  PlanQuery q{{cell[0], cell[1], detail::value_or<std::size_t>(start, "heading", 0)}, goal[0],
              goal[1]};
  const Lattice lattice = build_lattice(terrain, model, cfg);
  PlanOptions opts;
  opts.audit = j.value("audit", false);
  const PlanResult res = plan(lattice, q, opts);
  emit_json(o, out, to_json(res));
  err << "plan: " << res.energy_j << " J, " << res.path.primitives.size() << " primitives, "
      << res.expanded_nodes << " expanded\n";
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedRow:
    case ErrorCode::kNonMonotonicTime:
    case ErrorCode::kYawAtBranchCut:
    case ErrorCode::kImplausibleGravityNorm:
    case ErrorCode::kOutOfBounds:
    case ErrorCode::kEndpointMismatch:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"slopewise: heading-dependent energy models for legged robots on slopes"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Input file");
    sub->add_option("--output", o.output, "Output file (default: stdout)");
    sub->add_option("--model", o.model, "Wrench model JSON");
    sub->add_option("--terrain", o.terrain, "Terrain JSON");
    sub->add_option("--config", o.config, "JSON overrides");
    sub->add_option("--eval-mode", o.eval_mode, "Power evaluation mode")
        ->check(CLI::IsMember({"literal", "dissipative"}));
    sub->add_option("--dt", o.dt, "Integration step in seconds");
    sub->add_option("--seed", o.seed, "Random seed");
  };

  std::vector<std::pair<CLI::App*, std::function<int()>>> handlers;
  auto add = [&](const char* name, const char* help, auto fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    handlers.emplace_back(sub, [&o, &out, &err, fn] { return fn(o, out, err); });
    return sub;
  };

  auto* synth = add("synth", "Scenario -> synthetic telemetry CSV + manifest", cmd_synth);
  synth->add_option("--scenario", o.scenario, "Scenario JSON");
  synth->add_option("--manifest", o.manifest, "Manifest JSON path");
  auto* ingest = add("ingest", "Telemetry -> cleaned telemetry + report", cmd_ingest);
  ingest->add_option("--report", o.report, "Report JSON path (default: stdout)");
  auto* calib = add("calibrate", "Cleaned telemetry -> model JSON + fit report", cmd_calibrate);
  calib->add_option("--report", o.report, "Fit report JSON path (default: stdout)");
  calib->add_option("--samples", o.samples, "Wrench sample dataset CSV path");
  auto* map = add("map", "Model -> (alpha, gamma) cost map CSV", cmd_map);
  map->add_option("--axis", o.axis, "forward, lateral or yaw");
  add("eval-path", "Path + terrain + model -> energy report JSON", cmd_eval_path);
  add("superpose", "Parts + whole -> relative energy difference", cmd_superpose);
  add("plan", "Start/goal + terrain + model -> plan JSON", cmd_plan);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    for (auto& [sub, fn] : handlers) {
      if (sub->parsed()) return fn();
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace slopewise::cli
