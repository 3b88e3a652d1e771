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

#ifndef SLOPEWISE_WRENCH_MODEL_HPP_
#define SLOPEWISE_WRENCH_MODEL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string_view>
#include <vector>

#include "slopewise/error.hpp"
#include "slopewise/se2.hpp"
#include "slopewise/terrain.hpp"

namespace slopewise {

enum class Component : std::size_t { kFx = 0, kFy = 1, kTau = 2 };
inline constexpr std::array<Component, 3> kAllComponents = {Component::kFx, Component::kFy,
                                                            Component::kTau};

inline std::string_view to_string(Component c) {
  switch (c) {
    case Component::kFx: return "fx";
    case Component::kFy: return "fy";
    case Component::kTau: return "tau";
  }
  return "?";
}

inline Component component_from_string(std::string_view s) {
  if (s == "fx") return Component::kFx;
  if (s == "fy") return Component::kFy;
  if (s == "tau") return Component::kTau;
  throw Error(ErrorCode::kInvalidArgument, "unknown component '" + std::string(s) + "'");
}

enum class EvalMode { kLiteral, kDissipative };

inline std::string_view to_string(EvalMode m) {
  return m == EvalMode::kLiteral ? "literal" : "dissipative";
}

inline EvalMode eval_mode_from_string(std::string_view s) {
  if (s == "literal") return EvalMode::kLiteral;
  if (s == "dissipative") return EvalMode::kDissipative;
  throw Error(ErrorCode::kInvalidArgument, "unknown eval mode '" + std::string(s) + "'");
}

enum class MotionAxis { kForward, kLateral, kYaw };

inline std::string_view to_string(MotionAxis a) {
  switch (a) {
    case MotionAxis::kForward: return "forward";
    case MotionAxis::kLateral: return "lateral";
    case MotionAxis::kYaw: return "yaw";
  }
  return "?";
}

inline MotionAxis motion_axis_from_string(std::string_view s) {
  if (s == "forward") return MotionAxis::kForward;
  if (s == "lateral") return MotionAxis::kLateral;
  if (s == "yaw" || s == "rotation") return MotionAxis::kYaw;
  throw Error(ErrorCode::kInvalidArgument, "unknown motion axis '" + std::string(s) + "'");
}

inline Component component_for_axis(MotionAxis a) {
  switch (a) {
    case MotionAxis::kForward: return Component::kFx;
    case MotionAxis::kLateral: return Component::kFy;
    case MotionAxis::kYaw: return Component::kTau;
  }
  return Component::kFx;
}

inline constexpr std::size_t kBasisSize = 4;
using BasisVector = std::array<double, kBasisSize>;
using BasisMask = std::array<bool, kBasisSize>;

// Basis terms, in coefficient order. Every gamma-dependent term carries a
// factor alpha, so flat ground is isotropic; cos and |sin| make the basis
// mirror-symmetric in gamma.
inline constexpr std::array<std::string_view, kBasisSize> kBasisNames = {
    "1", "alpha", "alpha_cos_gamma", "alpha_abs_sin_gamma"};

inline BasisVector basis(const SlopeFrame& f) {
  return {1.0, f.alpha, f.alpha * std::cos(f.gamma), f.alpha * std::abs(std::sin(f.gamma))};
}

/// Generalized force in body coordinates: fx, fy in N, tau in N*m.
struct Wrench {
  double fx = 0.0;
  double fy = 0.0;
  double tau = 0.0;

  double operator[](Component c) const {
    switch (c) {
      case Component::kFx: return fx;
      case Component::kFy: return fy;
      case Component::kTau: return tau;
    }
    return 0.0;
  }
  double& operator[](Component c) {
    switch (c) {
      case Component::kFx: return fx;
      case Component::kFy: return fy;
      case Component::kTau: break;
    }
    return tau;
  }
};

struct WrenchEvaluation {
  Wrench wrench;
  bool capped = false;
};

/**
 * Heading-dependent wrench model f(alpha, gamma) = (fx, fy, tau).
 *
 * Each component is a linear combination of the enabled basis terms
 * {1, alpha, alpha*cos(gamma), alpha*|sin(gamma)|}. Disabled terms are
 * ignored regardless of their stored coefficient.
 *
 * Power modes:
 *   literal      P = fx*vx + fy*vy + tau*omega + idle
 *   dissipative  P = fx*|vx| + fy*|vy| + tau*|omega| + idle
 */
struct WrenchModel {
  std::array<BasisMask, 3> masks = default_masks();
  std::array<BasisVector, 3> coeffs{};
  EvalMode eval_mode = EvalMode::kDissipative;
  double idle_power_w = 0.0;
  double f_max = 500.0;
  /// Slope range covered by calibration data, radians.
  std::array<double, 2> alpha_fit_range = {0.0, kPi / 2};

  static std::array<BasisMask, 3> default_masks() {
    return {BasisMask{true, true, true, false}, BasisMask{true, true, false, false},
            BasisMask{true, true, false, false}};
  }

  const BasisMask& mask(Component c) const { return masks[static_cast<std::size_t>(c)]; }
  BasisMask& mask(Component c) { return masks[static_cast<std::size_t>(c)]; }
  const BasisVector& coeff(Component c) const { return coeffs[static_cast<std::size_t>(c)]; }
  BasisVector& coeff(Component c) { return coeffs[static_cast<std::size_t>(c)]; }

  /// Uncapped value of one component.
  double raw_component(Component c, const SlopeFrame& frame) const {
    const BasisVector b = basis(frame);
    const BasisVector& k = coeff(c);
    const BasisMask& m = mask(c);
    double v = 0.0;
    for (std::size_t i = 0; i < kBasisSize; ++i) {
      if (m[i]) v += k[i] * b[i];
    }
    return v;
  }

  WrenchEvaluation evaluate_checked(const SlopeFrame& frame) const {
    WrenchEvaluation out;
    for (Component c : kAllComponents) {
      const double v = raw_component(c, frame);
      const double capped = std::clamp(v, -f_max, f_max);
      out.capped = out.capped || capped != v;
      out.wrench[c] = capped;
    }
    return out;
  }

  Wrench evaluate(const SlopeFrame& frame) const { return evaluate_checked(frame).wrench; }

  static double power_of(const Wrench& f, const Twist& xi, EvalMode mode, double idle) {
    if (mode == EvalMode::kLiteral) {
      return f.fx * xi.vx + f.fy * xi.vy + f.tau * xi.omega + idle;
    }
    return f.fx * std::abs(xi.vx) + f.fy * std::abs(xi.vy) + f.tau * std::abs(xi.omega) + idle;
  }

  double power(const SlopeFrame& frame, const Twist& xi) const {
    return power_of(evaluate(frame), xi, eval_mode, idle_power_w);
  }

  /// Cost per meter (per radian for kYaw) of unit motion along a body axis,
  /// excluding idle draw.
  double per_meter_cost(const SlopeFrame& frame, MotionAxis axis) const {
    return evaluate(frame)[component_for_axis(axis)];
  }

  bool in_fit_range(double alpha) const {
    return alpha >= alpha_fit_range[0] - 1e-12 && alpha <= alpha_fit_range[1] + 1e-12;
  }

  /// Exact bounds of a capped component over alpha in [0, alpha_max] and all gamma.
  std::array<double, 2> component_range(Component c, double alpha_max) const {
    const BasisVector& k = coeff(c);
    const BasisMask& m = mask(c);
    const double c0 = m[0] ? k[0] : 0.0;
    const double c1 = m[1] ? k[1] : 0.0;
    const double c2 = m[2] ? k[2] : 0.0;
    const double c3 = m[3] ? k[3] : 0.0;
    // Over gamma in [0, pi], c2*cos + c3*sin = R*cos(gamma - phi).
    const double r = std::hypot(c2, c3);
    const double phi = std::atan2(c3, c2);
    double lo = std::min(c2, -c2);
    double hi = std::max(c2, -c2);
    if (phi >= 0.0) hi = std::max(hi, r);
    if (phi <= 0.0) lo = std::min(lo, -r);
    std::array<double, 2> out = {std::min(c0, c0 + alpha_max * (c1 + lo)),
                                 std::max(c0, c0 + alpha_max * (c1 + hi))};
    out[0] = std::clamp(out[0], -f_max, f_max);
    out[1] = std::clamp(out[1], -f_max, f_max);
    return out;
  }

  /**
   * Default ground truth used by the synthetic bench:
   * fx = 40 + 30 a + 120 a cos(g), fy = 70 + 150 a, tau = 5 + 20 a.
   * Shapes follow the measured trends; the numbers are invented.
   */
  static WrenchModel default_ground_truth() {
    WrenchModel m;
    m.coeff(Component::kFx) = {40.0, 30.0, 120.0, 0.0};
    m.coeff(Component::kFy) = {70.0, 150.0, 0.0, 0.0};
    m.coeff(Component::kTau) = {5.0, 20.0, 0.0, 0.0};
    return m;
  }
};

/// Per-meter cost grid; values[i * gammas.size() + j] is at (alphas[i], gammas[j]).
struct CostMap {
  MotionAxis axis = MotionAxis::kForward;
  std::vector<double> alphas;
  std::vector<double> gammas;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * gammas.size() + j]; }
};

inline CostMap export_cost_map(const WrenchModel& model, const std::vector<double>& alphas,
                               const std::vector<double>& gammas, MotionAxis axis) {
  if (alphas.empty() || gammas.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cost map ranges must be non-empty");
  }
  CostMap map{axis, alphas, gammas, {}};
  map.values.reserve(alphas.size() * gammas.size());
  for (double a : alphas) {
    for (double g : gammas) map.values.push_back(model.per_meter_cost({a, g}, axis));
  }
  return map;
}

/// Samples lo, lo + step, ... up to and including hi when it lies on the grid.
inline std::vector<double> sample_range(double lo, double hi, double step) {
  if (!(hi >= lo) || !(step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "range needs hi >= lo and step > 0");
  }
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

inline void write_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

/// Header row of gamma degrees, first column alpha degrees.
inline void write_cost_map_csv(std::ostream& os, const CostMap& map) {
  os << "alpha_deg";
  for (double g : map.gammas) {
    os << ',';
    write_double(os, rad2deg(g));
  }
  os << '\n';
  for (std::size_t i = 0; i < map.alphas.size(); ++i) {
    write_double(os, rad2deg(map.alphas[i]));
    for (std::size_t j = 0; j < map.gammas.size(); ++j) {
      os << ',';
      write_double(os, map.at(i, j));
    }
    os << '\n';
  }
}

}  // namespace slopewise

#endif  // SLOPEWISE_WRENCH_MODEL_HPP_
