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

#ifndef SLOPEWISE_PATH_ENERGY_HPP_
#define SLOPEWISE_PATH_ENERGY_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slopewise/error.hpp"
#include "slopewise/se2.hpp"
#include "slopewise/terrain.hpp"
#include "slopewise/wrench_model.hpp"

namespace slopewise {

/// Constant-speed straight motion along a body axis (forward or lateral).
struct Straight {
  double length_m = 0.0;
  double speed_mps = 0.0;
  MotionAxis axis = MotionAxis::kForward;
  bool reverse = false;  // backward / rightward
};

/// Constant body twist (v, 0, v/r); positive arc_angle turns left.
struct Arc {
  double radius_m = 0.0;
  double arc_angle_rad = 0.0;
  double speed_mps = 0.0;
};

struct TurnInPlace {
  double delta_yaw_rad = 0.0;
  double omega_radps = 0.0;  // magnitude; direction follows delta_yaw_rad
};

using Primitive = std::variant<Straight, Arc, TurnInPlace>;

struct PathSpec {
  Pose start;
  std::vector<Primitive> primitives;
};

inline void validate(const Primitive& p) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  std::visit(
      [&](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Straight>) {
          if (!positive(q.length_m) || !positive(q.speed_mps)) {
            throw Error(ErrorCode::kInvalidArgument, "straight needs length and speed > 0");
          }
          if (q.axis == MotionAxis::kYaw) {
            throw Error(ErrorCode::kInvalidArgument, "straight axis must be forward or lateral");
          }
        } else if constexpr (std::is_same_v<T, Arc>) {
          if (!positive(q.radius_m) || !positive(q.speed_mps) || !positive(std::abs(q.arc_angle_rad))) {
            throw Error(ErrorCode::kInvalidArgument, "arc needs radius, speed and |angle| > 0");
          }
        } else {
          if (!positive(q.omega_radps) || !positive(std::abs(q.delta_yaw_rad))) {
            throw Error(ErrorCode::kInvalidArgument, "turn needs omega and |delta_yaw| > 0");
          }
        }
      },
      p);
}

inline Twist primitive_twist(const Primitive& p) {
  return std::visit(
      [](const auto& q) -> Twist {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Straight>) {
          const double v = q.reverse ? -q.speed_mps : q.speed_mps;
          return q.axis == MotionAxis::kLateral ? Twist{0.0, v, 0.0} : Twist{v, 0.0, 0.0};
        } else if constexpr (std::is_same_v<T, Arc>) {
          const double sign = q.arc_angle_rad < 0.0 ? -1.0 : 1.0;
          return {q.speed_mps, 0.0, sign * q.speed_mps / q.radius_m};
        } else {
          return {0.0, 0.0, std::copysign(q.omega_radps, q.delta_yaw_rad)};
        }
      },
      p);
}

inline double primitive_duration(const Primitive& p) {
  return std::visit(
      [](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Straight>) {
          return q.length_m / q.speed_mps;
        } else if constexpr (std::is_same_v<T, Arc>) {
          return q.radius_m * std::abs(q.arc_angle_rad) / q.speed_mps;
        } else {
          return std::abs(q.delta_yaw_rad) / q.omega_radps;
        }
      },
      p);
}

/// Pose after executing `p` from `from`.
inline Pose primitive_end(const Pose& from, const Primitive& p) {
  return compose(from, exp(primitive_twist(p), primitive_duration(p)));
}

inline Pose end_pose(const PathSpec& path) {
  Pose p = path.start;
  for (const auto& q : path.primitives) p = primitive_end(p, q);
  return p;
}

inline double path_duration(const PathSpec& path) {
  double t = 0.0;
  for (const auto& q : path.primitives) t += primitive_duration(q);
  return t;
}

/// Pose at time t into the path (clamped to the path's extent).
inline Pose pose_at(const PathSpec& path, double t) {
  Pose p = path.start;
  for (const auto& q : path.primitives) {
    const double d = primitive_duration(q);
    if (t <= d) return compose(p, exp(primitive_twist(q), std::max(t, 0.0)));
    t -= d;
    p = primitive_end(p, q);
  }
  return p;
}

struct EnergyReport {
  double total_j = 0.0;
  std::vector<double> per_primitive_j;
  double duration_s = 0.0;
  std::size_t samples_used = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultDt = 0.01;

/// Step count used for a primitive of duration T at nominal step dt.
inline std::size_t integration_steps(double duration, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration / dt - 1e-9)));
}

/**
 * Midpoint-rule integral of the model power along the path.
 *
 * Each primitive is split into ceil(T/dt) equal steps; the slope frame is
 * sampled at the pose reached at each step midpoint.
 */
inline EnergyReport energy_of_path(const PathSpec& path, const Terrain& terrain,
                                   const WrenchModel& model, double dt = kDefaultDt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  }
  EnergyReport rep;
  bool capped = false;
  bool extrapolated = false;
  Pose p0 = path.start;
  const Bounds bounds = terrain.bounds();
  if (!bounds.contains(p0.x, p0.y)) {
    throw Error(ErrorCode::kOutOfBounds, "path start outside terrain");
  }
  for (const auto& prim : path.primitives) {
    validate(prim);
    const Twist xi = primitive_twist(prim);
    const double duration = primitive_duration(prim);
    const std::size_t n = integration_steps(duration, dt);
    const double h = duration / static_cast<double>(n);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double tm = (static_cast<double>(i) + 0.5) * h;
      const Pose pm = compose(p0, exp(xi, tm));
      const SlopeFrame frame = terrain.frame_at(pm);
      const WrenchEvaluation ev = model.evaluate_checked(frame);
      capped = capped || ev.capped;
      extrapolated = extrapolated || !model.in_fit_range(frame.alpha);
      const double power = WrenchModel::power_of(ev.wrench, xi, model.eval_mode, model.idle_power_w);
      if (!std::isfinite(power)) {
        throw Error(ErrorCode::kNonFinitePower, "non-finite power at step " + std::to_string(i));
      }
      e += power * h;
    }
    p0 = primitive_end(p0, prim);
    if (!bounds.contains(p0.x, p0.y)) {
      throw Error(ErrorCode::kOutOfBounds, "primitive ends outside terrain");
    }
    rep.per_primitive_j.push_back(e);
    rep.duration_s += duration;
    rep.samples_used += n;
  }
  for (double e : rep.per_primitive_j) rep.total_j += e;
  if (capped) rep.warnings.emplace_back("wrench_capped_at_f_max");
  if (extrapolated) rep.warnings.emplace_back("alpha_outside_fit_range");
  return rep;
}

inline constexpr double kEndpointTolerance = 1e-6;

inline bool poses_match(const Pose& a, const Pose& b, double tol = kEndpointTolerance) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(normalize_angle(a.yaw - b.yaw)) <= tol;
}

/**
 * Relative difference |sum E(parts) - E(whole)| / E(whole) for paths that
 * produce the same pose change. Parts must chain end to start and share the
 * whole's endpoints.
 */
inline double superposition_check(std::span<const PathSpec> parts, const PathSpec& whole,
                                  const Terrain& terrain, const WrenchModel& model,
                                  double dt = kDefaultDt) {
  if (parts.empty()) throw Error(ErrorCode::kInvalidArgument, "no parts given");
  if (!poses_match(parts.front().start, whole.start)) {
    throw Error(ErrorCode::kEndpointMismatch, "first part does not start at the whole's start");
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!poses_match(end_pose(parts[i]), parts[i + 1].start)) {
      throw Error(ErrorCode::kEndpointMismatch,
                  "part " + std::to_string(i) + " does not end where part " +
                      std::to_string(i + 1) + " starts");
    }
  }
  if (!poses_match(end_pose(parts.back()), end_pose(whole))) {
    throw Error(ErrorCode::kEndpointMismatch, "last part does not end at the whole's end");
  }
  double sum = 0.0;
  for (const auto& p : parts) sum += energy_of_path(p, terrain, model, dt).total_j;
  const double e_whole = energy_of_path(whole, terrain, model, dt).total_j;
  if (e_whole == 0.0) return sum == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(sum - e_whole) / std::abs(e_whole);
}

/**
 * Splits `path` near fraction `at` of its duration. The cut is snapped to
 * the nearest integration step boundary of the primitive it falls in, so
 * the two parts sample exactly the same midpoints as the whole at this dt.
 */
inline std::pair<PathSpec, PathSpec> split_path(const PathSpec& path, double at,
                                                double dt = kDefaultDt) {
  if (!(at >= 0.0 && at <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "split fraction must be in [0, 1]");
  }
  PathSpec first{path.start, {}};
  PathSpec second;
  double t_split = path_duration(path) * at;
  Pose p = path.start;
  bool split_done = false;
  for (const auto& prim : path.primitives) {
    if (split_done) {
      second.primitives.push_back(prim);
      continue;
    }
    const double d = primitive_duration(prim);
    const std::size_t n = integration_steps(d, dt);
    const auto k = static_cast<std::size_t>(
        std::clamp(std::llround(t_split / d * static_cast<double>(n)), 0LL,
                   static_cast<long long>(n)));
    if (k == n && t_split >= d) {
      first.primitives.push_back(prim);
      p = primitive_end(p, prim);
      t_split -= d;
      continue;
    }
    auto scaled = [&](std::size_t steps) -> Primitive {
      const double f = static_cast<double>(steps) / static_cast<double>(n);
      return std::visit(
          [&](auto q) -> Primitive {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, Straight>) q.length_m *= f;
            else if constexpr (std::is_same_v<T, Arc>) q.arc_angle_rad *= f;
            else q.delta_yaw_rad *= f;
            return q;
          },
          prim);
    };
    if (k > 0) {
      first.primitives.push_back(scaled(k));
      p = primitive_end(p, first.primitives.back());
    }
    if (k < n) second.primitives.push_back(scaled(n - k));
    split_done = true;
  }
  second.start = p;
  return {first, second};
}

}  // namespace slopewise

#endif  // SLOPEWISE_PATH_ENERGY_HPP_
