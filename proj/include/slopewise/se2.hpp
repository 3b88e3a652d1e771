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

#ifndef SLOPEWISE_SE2_HPP_
#define SLOPEWISE_SE2_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "slopewise/error.hpp"

namespace slopewise {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Wraps an angle into [0, 2pi).
inline double normalize_angle_positive(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/**
 * Planar rigid-body pose, an element of SE(2).
 *
 * Lie group matrix form
 * ---------------------
 * [ cos(yaw) -sin(yaw) x ]
 * [ sin(yaw)  cos(yaw) y ]
 * [    0         0     1 ]
 *
 * yaw is kept in (-pi, pi] by every operation in this header.
 */
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  static Pose identity() { return {}; }
};

/**
 * Body-frame velocity coordinates of a planar rigid body (se(2)).
 *
 * vx is forward, vy is left, omega is the yaw rate (counter-clockwise).
 */
struct Twist {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  Twist operator+(const Twist& o) const { return {vx + o.vx, vy + o.vy, omega + o.omega}; }
  Twist operator-(const Twist& o) const { return {vx - o.vx, vy - o.vy, omega - o.omega}; }
  Twist operator*(double s) const { return {vx * s, vy * s, omega * s}; }
  Twist operator/(double s) const { return {vx / s, vy / s, omega / s}; }
  friend Twist operator*(double s, const Twist& t) { return t * s; }

  double inf_norm() const {
    return std::max({std::abs(vx), std::abs(vy), std::abs(omega)});
  }
  bool is_finite() const {
    return std::isfinite(vx) && std::isfinite(vy) && std::isfinite(omega);
  }
};

struct TimedPose {
  double t = 0.0;
  Pose pose;
};

/// Twist estimated over [t, t_next). t_mid is where the estimate is
/// second-order accurate.
struct TimedTwist {
  double t = 0.0;
  double t_mid = 0.0;
  Twist twist;
};

inline Pose compose(const Pose& a, const Pose& b) {
  const double c = std::cos(a.yaw);
  const double s = std::sin(a.yaw);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y,
          normalize_angle(a.yaw + b.yaw)};
}

inline Pose inverse(const Pose& p) {
  const double c = std::cos(p.yaw);
  const double s = std::sin(p.yaw);
  return {-c * p.x - s * p.y, s * p.x - c * p.y, normalize_angle(-p.yaw)};
}

/// Rotation angle below which exp/log use truncated series.
inline constexpr double kSmallAngle = 1e-8;

namespace detail {

// Coefficients of the SE(2) left Jacobian V(th) = [[a, -b], [b, a]]
// with a = sin(th)/th and b = (1 - cos(th))/th = 2 sin^2(th/2)/th.
inline void jacobian_coeffs(double th, double& a, double& b) {
  if (std::abs(th) < kSmallAngle) {
    const double th2 = th * th;
    a = 1.0 - th2 / 6.0;
    b = th / 2.0 - th * th2 / 24.0;
  } else {
    const double h = std::sin(0.5 * th);
    a = std::sin(th) / th;
    b = 2.0 * h * h / th;
  }
}

}  // namespace detail

/// Pose reached after holding body twist `xi` for `dt` seconds from the origin.
inline Pose exp(const Twist& xi, double dt) {
  if (!(dt >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "exp requires dt >= 0");
  }
  const double ux = xi.vx * dt;
  const double uy = xi.vy * dt;
  const double th = xi.omega * dt;
  double a, b;
  detail::jacobian_coeffs(th, a, b);
  return {a * ux - b * uy, b * ux + a * uy, normalize_angle(th)};
}

/// Principal logarithm; inverse of exp(., 1) for |yaw| < pi.
inline Twist log(const Pose& p) {
  if (std::abs(p.yaw) >= kPi - 1e-6) {
    throw Error(ErrorCode::kYawAtBranchCut, "log undefined for |yaw| near pi");
  }
  const double th = p.yaw;
  double a, b;
  detail::jacobian_coeffs(th, a, b);
  const double det = a * a + b * b;
  return {(a * p.x + b * p.y) / det, (-b * p.x + a * p.y) / det, th};
}

/// Forward-difference body velocity: log(P_i^-1 P_{i+1}) / (t_{i+1} - t_i).
/// The last sample repeats the previous twist.
inline std::vector<TimedTwist> body_velocity(std::span<const TimedPose> poses) {
  if (poses.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "body_velocity needs at least 2 poses");
  }
  std::vector<TimedTwist> out;
  out.reserve(poses.size());
  for (std::size_t i = 0; i + 1 < poses.size(); ++i) {
    const double dt = poses[i + 1].t - poses[i].t;
    if (!(dt > 0.0)) {
      throw Error(ErrorCode::kNonMonotonicTime,
                  "timestamps must strictly increase at index " + std::to_string(i + 1));
    }
    const Pose rel = compose(inverse(poses[i].pose), poses[i + 1].pose);
    out.push_back({poses[i].t, 0.5 * (poses[i].t + poses[i + 1].t), log(rel) / dt});
  }
  TimedTwist last = out.back();
  last.t = poses.back().t;
  out.push_back(last);
  return out;
}

}  // namespace slopewise

#endif  // SLOPEWISE_SE2_HPP_
