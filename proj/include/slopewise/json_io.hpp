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

// JSON schemas (schema_version 1) for models, terrains, paths, scenarios,
// and the reports the command line tool emits.

#ifndef SLOPEWISE_JSON_IO_HPP_
#define SLOPEWISE_JSON_IO_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slopewise/calibration.hpp"
#include "slopewise/error.hpp"
#include "slopewise/path_energy.hpp"
#include "slopewise/planner.hpp"
#include "slopewise/synthbench.hpp"
#include "slopewise/telemetry.hpp"
#include "slopewise/terrain.hpp"
#include "slopewise/wrench_model.hpp"

namespace slopewise {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

template <typename T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- model

inline Json to_json(const WrenchModel& m) {
  Json masks = Json::object();
  Json coeffs = Json::object();
  for (Component c : kAllComponents) {
    const std::string name(to_string(c));
    masks[name] = std::vector<bool>(m.mask(c).begin(), m.mask(c).end());
    coeffs[name] = std::vector<double>(m.coeff(c).begin(), m.coeff(c).end());
  }
  return {{"schema_version", kSchemaVersion},
          {"basis", std::vector<std::string>(kBasisNames.begin(), kBasisNames.end())},
          {"basis_masks", masks},
          {"coeffs", coeffs},
          {"eval_mode", std::string(to_string(m.eval_mode))},
          {"idle_power_w", m.idle_power_w},
          {"f_max", m.f_max},
          {"alpha_fit_range_deg",
           {rad2deg(m.alpha_fit_range[0]), rad2deg(m.alpha_fit_range[1])}}};
}

inline WrenchModel model_from_json(const Json& j) {
  WrenchModel m;
  m.coeffs = {};
  const Json masks = detail::value_or(j, "basis_masks", Json::object());
  const Json coeffs = detail::required<Json>(j, "coeffs");
  for (Component c : kAllComponents) {
    const std::string name(to_string(c));
    if (masks.contains(name)) {
      const auto v = masks.at(name).get<std::vector<bool>>();
      if (v.size() != kBasisSize) {
        throw Error(ErrorCode::kInvalidArgument, "basis_masks." + name + " needs 4 entries");
      }
      std::copy(v.begin(), v.end(), m.mask(c).begin());
    }
    if (coeffs.contains(name)) {
      const auto v = coeffs.at(name).get<std::vector<double>>();
      if (v.size() != kBasisSize) {
        throw Error(ErrorCode::kInvalidArgument, "coeffs." + name + " needs 4 entries");
      }
      std::copy(v.begin(), v.end(), m.coeff(c).begin());
    }
  }
  m.eval_mode = eval_mode_from_string(detail::value_or<std::string>(j, "eval_mode", "dissipative"));
  m.idle_power_w = detail::value_or(j, "idle_power_w", 0.0);
  m.f_max = detail::value_or(j, "f_max", 500.0);
  if (!(m.f_max > 0.0)) throw Error(ErrorCode::kInvalidArgument, "f_max must be > 0");
  const auto range = detail::value_or(j, "alpha_fit_range_deg", std::vector<double>{0.0, 90.0});
  if (range.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_fit_range_deg needs [lo, hi]");
  }
  m.alpha_fit_range = {deg2rad(range[0]), deg2rad(range[1])};
  return m;
}

// -------------------------------------------------------------- terrain

/// Relative heights_csv paths resolve against `base_dir`.
inline Terrain terrain_from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
  const auto type = detail::required<std::string>(j, "type");
  if (type == "plane") {
    UniformPlane p;
    p.alpha = deg2rad(detail::required<double>(j, "alpha_deg"));
    p.aspect = deg2rad(detail::value_or(j, "aspect_deg", 0.0));
    if (j.contains("bounds")) {
      const auto b = j.at("bounds").get<std::vector<double>>();
      if (b.size() != 4) {
        throw Error(ErrorCode::kInvalidArgument, "bounds needs [x_min, x_max, y_min, y_max]");
      }
      p.bounds = {b[0], b[1], b[2], b[3]};
    }
    return Terrain(p);
  }
  if (type == "grid") {
    const double cell = detail::required<double>(j, "cell_size_m");
    const auto origin = detail::value_or(j, "origin", std::vector<double>{0.0, 0.0});
    if (origin.size() != 2) throw Error(ErrorCode::kInvalidArgument, "origin needs [x, y]");
    std::filesystem::path csv = detail::required<std::string>(j, "heights_csv");
    if (csv.is_relative()) csv = base_dir / csv;
    std::ifstream in(csv);
    if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + csv.string());
    return Terrain(read_heightmap_csv(in, origin[0], origin[1], cell));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown terrain type '" + type + "'");
}

inline Terrain load_terrain(const std::filesystem::path& path) {
  return terrain_from_json(read_json_file(path), path.parent_path());
}

// ----------------------------------------------------------------- path

inline Json to_json(const Primitive& p) {
  return std::visit(
      [](const auto& q) -> Json {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Straight>) {
          Json j = {{"type", "straight"},
                    {"length_m", q.length_m},
                    {"speed_mps", q.speed_mps},
                    {"axis", std::string(to_string(q.axis))}};
          if (q.reverse) j["reverse"] = true;
          return j;
        } else if constexpr (std::is_same_v<T, Arc>) {
          return {{"type", "arc"},
                  {"radius_m", q.radius_m},
                  {"arc_angle_rad", q.arc_angle_rad},
                  {"speed_mps", q.speed_mps}};
        } else {
          return {{"type", "turn"},
                  {"delta_yaw_rad", q.delta_yaw_rad},
                  {"omega_radps", q.omega_radps}};
        }
      },
      p);
}

inline Primitive primitive_from_json(const Json& j) {
  const auto type = detail::required<std::string>(j, "type");
  Primitive p;
  if (type == "straight") {
    p = Straight{detail::required<double>(j, "length_m"), detail::required<double>(j, "speed_mps"),
                 motion_axis_from_string(detail::value_or<std::string>(j, "axis", "forward")),
                 detail::value_or(j, "reverse", false)};
  } else if (type == "arc") {
    p = Arc{detail::required<double>(j, "radius_m"), detail::required<double>(j, "arc_angle_rad"),
            detail::required<double>(j, "speed_mps")};
  } else if (type == "turn") {
    p = TurnInPlace{detail::required<double>(j, "delta_yaw_rad"),
                    detail::required<double>(j, "omega_radps")};
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown primitive type '" + type + "'");
  }
  validate(p);
  return p;
}

inline Json to_json(const PathSpec& path) {
  Json prims = Json::array();
  for (const auto& p : path.primitives) prims.push_back(to_json(p));
  return {{"start", {path.start.x, path.start.y, path.start.yaw}}, {"primitives", prims}};
}

inline PathSpec path_from_json(const Json& j) {
  PathSpec path;
  const auto start = detail::value_or(j, "start", std::vector<double>{0.0, 0.0, 0.0});
  if (start.size() != 3) throw Error(ErrorCode::kInvalidArgument, "start needs [x, y, yaw_rad]");
  path.start = {start[0], start[1], normalize_angle(start[2])};
  for (const auto& pj : detail::value_or(j, "primitives", Json::array())) {
    path.primitives.push_back(primitive_from_json(pj));
  }
  return path;
}

inline Json to_json(const EnergyReport& r) {
  return {{"schema_version", kSchemaVersion}, {"total_j", r.total_j},
          {"per_primitive_j", r.per_primitive_j}, {"duration_s", r.duration_s},
          {"samples_used", r.samples_used}, {"warnings", r.warnings}};
}

// ------------------------------------------------------------ telemetry

/// Applies overrides from `j` on top of `base`.
inline PreprocessConfig preprocess_config_from_json(const Json& j, PreprocessConfig base = {}) {
  base.v_min = detail::value_or(j, "v_min", base.v_min);
  base.median_window = detail::value_or(j, "median_window", base.median_window);
  base.mad_threshold = detail::value_or(j, "mad_threshold", base.mad_threshold);
  base.ema_alpha = detail::value_or(j, "ema_alpha", base.ema_alpha);
  base.consistency_eta = detail::value_or(j, "consistency_eta", base.consistency_eta);
  base.power_floor_w = detail::value_or(j, "power_floor_w", base.power_floor_w);
  base.gap_factor = detail::value_or(j, "gap_factor", base.gap_factor);
  base.validate();
  return base;
}

inline Json to_json(const PreprocessReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"input_count", r.input_count},
          {"dropped_low_speed", r.dropped_low_speed},
          {"rejected_outlier", r.rejected_outlier},
          {"rejected_consistency", r.rejected_consistency},
          {"consistency_checked", r.consistency_checked},
          {"outlier_passes", r.outlier_passes},
          {"output_count", r.output_count}};
}

// ---------------------------------------------------------- calibration

inline WindowParams window_params_from_json(const Json& j, WindowParams base = {}) {
  base.min_duration_s = detail::value_or(j, "min_duration_s", base.min_duration_s);
  base.max_twist_cv = detail::value_or(j, "max_twist_cv", base.max_twist_cv);
  if (j.contains("max_alpha_drift_deg")) {
    base.max_alpha_drift = deg2rad(j.at("max_alpha_drift_deg").get<double>());
  }
  if (j.contains("max_gamma_drift_deg")) {
    base.max_gamma_drift = deg2rad(j.at("max_gamma_drift_deg").get<double>());
  }
  base.max_sample_deviation = detail::value_or(j, "max_sample_deviation", base.max_sample_deviation);
  base.gap_factor = detail::value_or(j, "gap_factor", base.gap_factor);
  return base;
}

inline std::array<BasisMask, 3> masks_from_json(const Json& j,
                                                std::array<BasisMask, 3> base =
                                                    WrenchModel::default_masks()) {
  for (Component c : kAllComponents) {
    const std::string name(to_string(c));
    if (!j.contains(name)) continue;
    const auto v = j.at(name).get<std::vector<bool>>();
    if (v.size() != kBasisSize) {
      throw Error(ErrorCode::kInvalidArgument, "basis mask " + name + " needs 4 entries");
    }
    std::copy(v.begin(), v.end(), base[static_cast<std::size_t>(c)].begin());
  }
  return base;
}

inline Json to_json(const FitReport& r) {
  Json comps = Json::array();
  for (const auto& c : r.components) {
    Json per = Json::array();
    for (const auto& pc : c.per_condition) {
      per.push_back({{"alpha_deg", pc.alpha_deg},
                     {"gamma_deg", pc.gamma_deg},
                     {"n", pc.n},
                     {"mean_residual", pc.mean_residual}});
    }
    comps.push_back({{"component", std::string(to_string(c.component))},
                     {"n_samples", c.n_samples},
                     {"coeffs", std::vector<double>(c.coeffs.begin(), c.coeffs.end())},
                     {"residual_rms", c.residual_rms},
                     {"condition_number", c.condition_number},
                     {"per_condition", per}});
  }
  return {{"schema_version", kSchemaVersion},
          {"components", comps},
          {"max_residual_rms", r.max_residual_rms()}};
}

inline Json to_json(const std::vector<RepeatabilityBin>& bins) {
  Json out = Json::array();
  for (const auto& b : bins) {
    out.push_back({{"component", std::string(to_string(b.component))},
                   {"alpha_lo_deg", b.alpha_lo_deg},
                   {"gamma_lo_deg", b.gamma_lo_deg},
                   {"n", b.n},
                   {"mean", b.mean},
                   {"std", b.stddev},
                   {"cv", b.cv},
                   {"flagged", b.flagged}});
  }
  return out;
}

// ------------------------------------------------------------ synthbench

inline Scenario scenario_from_json(const Json& j) {
  Scenario sc;
  if (j.contains("ground_truth")) sc.ground_truth = model_from_json(j.at("ground_truth"));
  sc.sample_rate_hz = detail::value_or(j, "sample_rate_hz", sc.sample_rate_hz);
  sc.seed = detail::value_or<std::uint64_t>(j, "seed", sc.seed);
  sc.gap_s = detail::value_or(j, "gap_s", sc.gap_s);
  sc.voltage = detail::value_or(j, "voltage_v", sc.voltage);
  const Json noise = detail::value_or(j, "noise", Json::object());
  sc.noise.power_mult_sigma = detail::value_or(noise, "power_mult_sigma", 0.0);
  sc.noise.twist_add_sigma = detail::value_or(noise, "twist_add_sigma", 0.0);
  sc.noise.gravity_add_sigma = detail::value_or(noise, "gravity_add_sigma", 0.0);
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    GridSpec spec;
    spec.alphas_deg = detail::value_or(g, "alpha_deg", spec.alphas_deg);
    spec.gammas_deg = detail::value_or(g, "gamma_deg", spec.gammas_deg);
    spec.repeats = detail::value_or(g, "repeats", spec.repeats);
    spec.speed_mps = detail::value_or(g, "speed_mps", spec.speed_mps);
    spec.duration_s = detail::value_or(g, "duration_s", spec.duration_s);
    spec.lateral = detail::value_or(g, "lateral", spec.lateral);
    spec.rotation = detail::value_or(g, "rotation", spec.rotation);
    spec.omega_radps = detail::value_or(g, "omega_radps", spec.omega_radps);
    sc.legs = grid_legs(spec);
  }
  for (const auto& lj : detail::value_or(j, "legs", Json::array())) {
    Leg l;
    l.alpha = deg2rad(detail::required<double>(lj, "alpha_deg"));
    l.gamma = deg2rad(detail::value_or(lj, "gamma_deg", 0.0));
    l.axis = motion_axis_from_string(detail::value_or<std::string>(lj, "axis", "forward"));
    l.speed = detail::value_or(lj, "speed", l.axis == MotionAxis::kYaw ? 0.5 : 0.3);
    l.duration_s = detail::value_or(lj, "duration_s", l.duration_s);
    l.repeats = detail::value_or(lj, "repeats", l.repeats);
    sc.legs.push_back(l);
  }
  sc.validate();
  return sc;
}

inline Json to_json(const Leg& l) {
  return {{"alpha_deg", rad2deg(l.alpha)}, {"gamma_deg", rad2deg(l.gamma)},
          {"axis", std::string(to_string(l.axis))}, {"speed", l.speed},
          {"duration_s", l.duration_s}, {"repeats", l.repeats}};
}

/// Ground-truth echo written next to synthetic telemetry.
inline Json manifest_json(const Scenario& sc, const SyntheticLog& log) {
  Json legs = Json::array();
  for (const auto& l : sc.legs) legs.push_back(to_json(l));
  return {{"schema_version", kSchemaVersion},
          {"ground_truth", to_json(sc.ground_truth)},
          {"ground_truth_note", "invented defaults, not measured values"},
          {"seed", sc.seed},
          {"sample_rate_hz", sc.sample_rate_hz},
          {"gap_s", sc.gap_s},
          {"voltage_v", sc.voltage},
          {"noise",
           {{"power_mult_sigma", sc.noise.power_mult_sigma},
            {"twist_add_sigma", sc.noise.twist_add_sigma},
            {"gravity_add_sigma", sc.noise.gravity_add_sigma}}},
          {"legs", legs},
          {"leg_runs", log.leg_runs},
          {"sample_count", log.samples.size()}};
}

// --------------------------------------------------------------- planner

inline LatticeConfig lattice_config_from_json(const Json& j, LatticeConfig base = {}) {
  if (j.contains("origin")) {
    const auto o = j.at("origin").get<std::vector<double>>();
    if (o.size() != 2) throw Error(ErrorCode::kInvalidArgument, "origin needs [x, y]");
    base.origin_x = o[0];
    base.origin_y = o[1];
  }
  base.cell_size_m = detail::value_or(j, "cell_size_m", base.cell_size_m);
  base.cols = detail::value_or(j, "cols", base.cols);
  base.rows = detail::value_or(j, "rows", base.rows);
  base.headings = detail::value_or(j, "headings", base.headings);
  base.speed_mps = detail::value_or(j, "speed_mps", base.speed_mps);
  base.turn_omega_radps = detail::value_or(j, "turn_omega_radps", base.turn_omega_radps);
  base.allow_lateral = detail::value_or(j, "allow_lateral", base.allow_lateral);
  if (j.contains("max_alpha_deg")) base.max_alpha = deg2rad(j.at("max_alpha_deg").get<double>());
  const auto mode = detail::value_or<std::string>(j, "edge_cost", "midpoint");
  if (mode == "midpoint") {
    base.edge_cost = EdgeCostMode::kMidpoint;
  } else if (mode == "integrated") {
    base.edge_cost = EdgeCostMode::kIntegrated;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "edge_cost must be midpoint or integrated");
  }
  base.dt = detail::value_or(j, "dt", base.dt);
  base.validate();
  return base;
}

inline Json to_json(const PlanResult& r) {
  Json j = {{"schema_version", kSchemaVersion},
            {"path", to_json(r.path)},
            {"energy_j", r.energy_j},
            {"expanded_nodes", r.expanded_nodes},
            {"runtime_ms", r.runtime_ms},
            {"heading_changes", r.heading_changes}};
  if (r.audited) j["heuristic_violations"] = r.heuristic_violations;
  return j;
}

}  // namespace slopewise

#endif  // SLOPEWISE_JSON_IO_HPP_
