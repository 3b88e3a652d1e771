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

#ifndef SLOPEWISE_SYNTHBENCH_HPP_
#define SLOPEWISE_SYNTHBENCH_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "slopewise/error.hpp"
#include "slopewise/path_energy.hpp"
#include "slopewise/se2.hpp"
#include "slopewise/telemetry.hpp"
#include "slopewise/terrain.hpp"
#include "slopewise/wrench_model.hpp"

namespace slopewise {

/// One constant-twist run on a uniform slope. For kYaw legs `speed` is the
/// yaw rate in rad/s; gamma is the heading at the start of the leg.
struct Leg {
  double alpha = 0.0;
  double gamma = 0.0;
  MotionAxis axis = MotionAxis::kForward;
  double speed = 0.3;
  double duration_s = 20.0;
  std::size_t repeats = 1;
};

struct NoiseConfig {
  double power_mult_sigma = 0.0;
  double twist_add_sigma = 0.0;
  double gravity_add_sigma = 0.0;
};

struct Scenario {
  WrenchModel ground_truth = WrenchModel::default_ground_truth();
  std::vector<Leg> legs;
  NoiseConfig noise;
  double sample_rate_hz = 50.0;
  std::uint64_t seed = 0;
  /// Idle time between legs; longer than any filter gap threshold.
  double gap_s = 1.0;
  double voltage = 50.0;

  void validate() const {
    if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sample rate must be > 0");
    if (!(gap_s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gap_s must be > 0");
    if (!(voltage > 0.0)) throw Error(ErrorCode::kInvalidArgument, "voltage must be > 0");
    if (!(noise.power_mult_sigma >= 0.0) || !(noise.twist_add_sigma >= 0.0) ||
        !(noise.gravity_add_sigma >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "noise sigmas must be >= 0");
    }
    for (const auto& l : legs) {
      if (!(l.speed > 0.0)) throw Error(ErrorCode::kInvalidArgument, "leg speed must be > 0");
      if (!(l.duration_s >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "leg duration must be >= 0");
      if (!(l.alpha >= 0.0 && l.alpha < kPi / 2)) {
        throw Error(ErrorCode::kInvalidArgument, "leg alpha must be in [0, pi/2)");
      }
    }
  }
};

/// Slope/heading grid of straight constant-speed runs, repeated.
struct GridSpec {
  std::vector<double> alphas_deg = {5.0, 10.0, 15.0, 20.0};
  std::vector<double> gammas_deg = {0.0, 45.0, 90.0, 135.0, 180.0};
  std::size_t repeats = 3;
  double speed_mps = 0.3;
  double duration_s = 20.0;
  bool lateral = true;   // same alpha x gamma grid, walking sideways
  bool rotation = true;  // one in-place rotation leg per alpha
  double omega_radps = 0.5;
};

inline std::vector<Leg> grid_legs(const GridSpec& g) {
  std::vector<Leg> legs;
  auto add = [&](double a, double gm, MotionAxis axis, double speed) {
    legs.push_back({deg2rad(a), deg2rad(gm), axis, speed, g.duration_s, g.repeats});
  };
  for (double a : g.alphas_deg) {
    for (double gm : g.gammas_deg) add(a, gm, MotionAxis::kForward, g.speed_mps);
  }
  if (g.lateral) {
    for (double a : g.alphas_deg) {
      for (double gm : g.gammas_deg) add(a, gm, MotionAxis::kLateral, g.speed_mps);
    }
  }
  if (g.rotation) {
    for (double a : g.alphas_deg) add(a, 0.0, MotionAxis::kYaw, g.omega_radps);
  }
  return legs;
}

/**
 * Model under which climbing straight up a slope of `alpha0` costs `ratio`
 * times as much per meter as walking at 60 degrees off the fall line.
 * At alpha0, fx(gamma) = r * (1 + cos(gamma + phi)) with
 * (1 + cos phi) / (1 + cos(60 deg + phi)) = ratio, so fx >= 0 for every
 * heading. A small idle draw keeps every lattice edge strictly positive.
 */
inline WrenchModel switchback_model(double alpha0 = deg2rad(15.0), double ratio = 3.0,
                                    double r = 100.0) {
  if (!(alpha0 > 0.0) || !(ratio > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "switchback model needs alpha0 > 0, ratio > 1");
  }
  // Solve (1 + cos p) = ratio * (1 + cos(p + 60 deg)) for p in [0, 2pi/3] by bisection.
  auto residual = [&](double p) {
    return (1.0 + std::cos(p)) - ratio * (1.0 + std::cos(p + kPi / 3));
  };
  double lo = 0.0, hi = 2.0 * kPi / 3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(lo) * residual(mid) <= 0.0 ? hi : lo) = mid;
  }
  const double phi = 0.5 * (lo + hi);
  WrenchModel m;
  m.masks = {BasisMask{true, false, true, true}, BasisMask{true, true, false, false},
             BasisMask{true, true, false, false}};
  m.coeff(Component::kFx) = {r, 0.0, r * std::cos(phi) / alpha0, -r * std::sin(phi) / alpha0};
  m.coeff(Component::kFy) = {2.0 * r, 0.0, 0.0, 0.0};
  m.coeff(Component::kTau) = {5.0, 20.0, 0.0, 0.0};
  m.idle_power_w = 1.0;
  return m;
}

/// Generator integrand; same contract as WrenchModel::power.
inline double oracle_power(const WrenchModel& ground_truth, const SlopeFrame& frame,
                           const Twist& twist) {
  return ground_truth.power(frame, twist);
}

inline Twist leg_twist(const Leg& l) {
  switch (l.axis) {
    case MotionAxis::kForward: return {l.speed, 0.0, 0.0};
    case MotionAxis::kLateral: return {0.0, l.speed, 0.0};
    case MotionAxis::kYaw: return {0.0, 0.0, l.speed};
  }
  return {};
}

struct SyntheticLog {
  std::vector<TelemetrySample> samples;
  std::size_t leg_runs = 0;  // legs x repeats that produced samples
};

/**
 * Synthetic telemetry for a scenario. Each leg starts on a plane whose
 * uphill azimuth is world +x, with yaw = -gamma, and integrates its constant
 * twist exactly. Power is the ground-truth power times (1 + N(0, sigma)).
 */
inline SyntheticLog generate_telemetry(const Scenario& sc) {
  sc.validate();
  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SyntheticLog log;
  const double step = 1.0 / sc.sample_rate_hz;
  double t0 = 0.0;
  double x = 0.0, y = 0.0;
  for (const auto& leg : sc.legs) {
    for (std::size_t rep = 0; rep < leg.repeats; ++rep) {
      const auto n = static_cast<std::size_t>(std::llround(leg.duration_s * sc.sample_rate_hz));
      if (n == 0) continue;
      ++log.leg_runs;
      const Twist xi = leg_twist(leg);
      const Pose start{x, y, normalize_angle(-leg.gamma)};
      Pose p = start;
      for (std::size_t i = 0; i < n; ++i) {
        const double tau = static_cast<double>(i) * step;
        p = compose(start, exp(xi, tau));
        const SlopeFrame frame{leg.alpha, normalize_angle_positive(-p.yaw)};
        TelemetrySample s;
        s.t = t0 + tau;
        s.pose = p;
        s.gravity_body = gravity_from_slope(frame);
        s.twist = xi;
        double power = oracle_power(sc.ground_truth, frame, xi);
        if (sc.noise.gravity_add_sigma > 0.0) {
          for (auto& gk : s.gravity_body) gk += sc.noise.gravity_add_sigma * normal(rng);
        }
        if (sc.noise.twist_add_sigma > 0.0) {
          s.twist.vx += sc.noise.twist_add_sigma * normal(rng);
          s.twist.vy += sc.noise.twist_add_sigma * normal(rng);
          s.twist.omega += sc.noise.twist_add_sigma * normal(rng);
        }
        if (sc.noise.power_mult_sigma > 0.0) {
          power *= 1.0 + sc.noise.power_mult_sigma * normal(rng);
        }
        s.voltage = sc.voltage;
        s.current = std::max(0.0, power) / sc.voltage;
        log.samples.push_back(s);
      }
      t0 += static_cast<double>(n - 1) * step + sc.gap_s;
      x = p.x;
      y = p.y;
    }
  }
  return log;
}

/**
 * Energy a noisy power meter would report along a path: midpoint samples at
 * the given rate, each multiplied by (1 + N(0, sigma)).
 */
inline double noisy_path_energy(const PathSpec& path, const Terrain& terrain,
                                const WrenchModel& model, double power_mult_sigma,
                                double sample_rate_hz, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dt = 1.0 / sample_rate_hz;
  double e = 0.0;
  Pose p0 = path.start;
  for (const auto& prim : path.primitives) {
    const Twist xi = primitive_twist(prim);
    const double duration = primitive_duration(prim);
    const std::size_t n = integration_steps(duration, dt);
    const double h = duration / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Pose pm = compose(p0, exp(xi, (static_cast<double>(i) + 0.5) * h));
      const double power = oracle_power(model, terrain.frame_at(pm), xi);
      e += power * (1.0 + power_mult_sigma * normal(rng)) * h;
    }
    p0 = primitive_end(p0, prim);
  }
  return e;
}

}  // namespace slopewise

#endif  // SLOPEWISE_SYNTHBENCH_HPP_
