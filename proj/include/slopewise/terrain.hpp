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

#ifndef SLOPEWISE_TERRAIN_HPP_
#define SLOPEWISE_TERRAIN_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slopewise/error.hpp"
#include "slopewise/se2.hpp"

namespace slopewise {

/**
 * Local slope angle and robot heading relative to the steepest ascent.
 *
 * gamma = 0 faces uphill, pi/2 has uphill on the robot's left, pi faces
 * downhill. Kept in [0, 2pi); the model folds it through cos and |sin|.
 */
struct SlopeFrame {
  double alpha = 0.0;
  double gamma = 0.0;
};

struct LocalSlope {
  double alpha = 0.0;
  /// World azimuth of steepest ascent; 0 on flat ground by convention.
  double uphill_azimuth = 0.0;
};

struct Bounds {
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();

  bool contains(double x, double y, double tol = 1e-9) const {
    return x >= x_min - tol && x <= x_max + tol && y >= y_min - tol && y <= y_max + tol;
  }
  bool is_finite() const {
    return std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
           std::isfinite(y_max);
  }
};

/// Infinite tilted plane. `bounds` optionally restricts the valid domain.
struct UniformPlane {
  double alpha = 0.0;
  double aspect = 0.0;
  Bounds bounds{};
};

/**
 * Regular heightmap. heights[r * cols + c] is the elevation at
 * (origin_x + c * cell_size, origin_y + r * cell_size); row 0 is minimum y.
 */
class GridHeightmap {
 public:
  GridHeightmap(double origin_x, double origin_y, double cell_size, std::size_t rows,
                std::size_t cols, std::vector<double> heights)
      : origin_x_(origin_x),
        origin_y_(origin_y),
        cell_size_(cell_size),
        rows_(rows),
        cols_(cols),
        heights_(std::move(heights)) {
    if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
      throw Error(ErrorCode::kInvalidArgument, "cell_size must be > 0");
    }
    if (rows_ < 2 || cols_ < 2) {
      throw Error(ErrorCode::kInvalidArgument, "heightmap must be at least 2x2");
    }
    if (heights_.size() != rows_ * cols_) {
      throw Error(ErrorCode::kInvalidArgument, "heightmap size does not match rows*cols");
    }
    for (double h : heights_) {
      if (!std::isfinite(h)) throw Error(ErrorCode::kInvalidArgument, "non-finite height");
    }
    compute_node_gradients();
  }

  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double cell_size() const { return cell_size_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& heights() const { return heights_; }
  double height_at_node(std::size_t r, std::size_t c) const { return heights_[r * cols_ + c]; }

  Bounds bounds() const {
    return {origin_x_, origin_x_ + cell_size_ * static_cast<double>(cols_ - 1), origin_y_,
            origin_y_ + cell_size_ * static_cast<double>(rows_ - 1)};
  }

  /// Bilinear interpolation of node gradients (central differences inside,
  /// second-order one-sided at the border). Exact for quadratic surfaces.
  std::array<double, 2> gradient(double x, double y) const {
    if (!bounds().contains(x, y)) {
      throw Error(ErrorCode::kOutOfBounds, "point (" + std::to_string(x) + ", " +
                                               std::to_string(y) + ") outside heightmap");
    }
    const auto [c0, fx] = cell_index((x - origin_x_) / cell_size_, cols_);
    const auto [r0, fy] = cell_index((y - origin_y_) / cell_size_, rows_);
    std::array<double, 2> g{};
    for (int k = 0; k < 2; ++k) {
      const auto& field = k == 0 ? grad_x_ : grad_y_;
      const double g00 = field[r0 * cols_ + c0];
      const double g01 = field[r0 * cols_ + c0 + 1];
      const double g10 = field[(r0 + 1) * cols_ + c0];
      const double g11 = field[(r0 + 1) * cols_ + c0 + 1];
      g[k] = (1 - fy) * ((1 - fx) * g00 + fx * g01) + fy * ((1 - fx) * g10 + fx * g11);
    }
    return g;
  }

 private:
  static std::pair<std::size_t, double> cell_index(double u, std::size_t n) {
    u = std::clamp(u, 0.0, static_cast<double>(n - 1));
    auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= n - 1) i = n - 2;
    return {i, u - static_cast<double>(i)};
  }

  // Derivative along one axis for a line of n samples with stride.
  static double axis_derivative(const double* h, std::size_t i, std::size_t n,
                                std::size_t stride, double d) {
    auto at = [&](std::size_t k) { return h[k * stride]; };
    if (n == 2) return (at(1) - at(0)) / d;
    if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * d);
    if (i == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * d);
    return (at(i + 1) - at(i - 1)) / (2.0 * d);
  }

  void compute_node_gradients() {
    grad_x_.assign(rows_ * cols_, 0.0);
    grad_y_.assign(rows_ * cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        grad_x_[r * cols_ + c] =
            axis_derivative(&heights_[r * cols_], c, cols_, 1, cell_size_);
        grad_y_[r * cols_ + c] = axis_derivative(&heights_[c], r, rows_, cols_, cell_size_);
      }
    }
  }

  double origin_x_;
  double origin_y_;
  double cell_size_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> heights_;
  std::vector<double> grad_x_;
  std::vector<double> grad_y_;
};

/// Locally planar terrain: either a uniform plane or a heightmap.
class Terrain {
 public:
  Terrain(UniformPlane plane) : repr_(plane) {  // NOLINT(google-explicit-constructor)
    if (!(plane.alpha >= 0.0 && plane.alpha < kPi / 2)) {
      throw Error(ErrorCode::kInvalidArgument, "plane alpha must be in [0, pi/2)");
    }
    std::get<UniformPlane>(repr_).aspect = normalize_angle_positive(plane.aspect);
  }
  Terrain(GridHeightmap grid) : repr_(std::move(grid)) {}  // NOLINT

  static Terrain plane(double alpha, double aspect) { return Terrain(UniformPlane{alpha, aspect}); }

  bool is_plane() const { return std::holds_alternative<UniformPlane>(repr_); }
  const UniformPlane* as_plane() const { return std::get_if<UniformPlane>(&repr_); }
  const GridHeightmap* as_grid() const { return std::get_if<GridHeightmap>(&repr_); }

  Bounds bounds() const {
    if (const auto* p = as_plane()) return p->bounds;
    return as_grid()->bounds();
  }

  LocalSlope local_slope(double x, double y) const {
    if (const auto* p = as_plane()) {
      if (!p->bounds.contains(x, y)) {
        throw Error(ErrorCode::kOutOfBounds, "point outside plane bounds");
      }
      return {p->alpha, p->alpha == 0.0 ? 0.0 : p->aspect};
    }
    const auto g = as_grid()->gradient(x, y);
    const double norm = std::hypot(g[0], g[1]);
    if (norm < 1e-12) return {0.0, 0.0};
    return {std::atan(norm), normalize_angle_positive(std::atan2(g[1], g[0]))};
  }

  /// Slope frame seen by a robot standing at `pose`.
  SlopeFrame frame_at(const Pose& pose) const;

 private:
  std::variant<UniformPlane, GridHeightmap> repr_;
};

/// gamma = uphill_azimuth - yaw, wrapped to [0, 2pi).
inline double heading_relative_to_slope(const Pose& pose, double uphill_azimuth) {
  return normalize_angle_positive(uphill_azimuth - pose.yaw);
}

inline SlopeFrame Terrain::frame_at(const Pose& pose) const {
  const LocalSlope s = local_slope(pose.x, pose.y);
  return {s.alpha, heading_relative_to_slope(pose, s.uphill_azimuth)};
}

inline constexpr double kGravityNormMin = 8.0;
inline constexpr double kGravityNormMax = 11.5;

/**
 * Slope frame from the gravity vector measured in the body frame
 * (x forward, y left, z up; a level robot reads (0, 0, -g)).
 *
 * Assumes the body plane is parallel to the terrain plane, so the
 * horizontal part of -g points uphill in body coordinates.
 */
inline SlopeFrame slope_from_gravity(const std::array<double, 3>& gravity_body) {
  const double norm =
      std::sqrt(gravity_body[0] * gravity_body[0] + gravity_body[1] * gravity_body[1] +
                gravity_body[2] * gravity_body[2]);
  if (!(norm >= kGravityNormMin && norm <= kGravityNormMax)) {
    throw Error(ErrorCode::kImplausibleGravityNorm,
                "gravity norm " + std::to_string(norm) + " outside [8.0, 11.5] m/s^2");
  }
  const double ux = -gravity_body[0] / norm;
  const double uy = -gravity_body[1] / norm;
  const double uz = -gravity_body[2] / norm;
  SlopeFrame f;
  f.alpha = std::acos(std::clamp(uz, -1.0, 1.0));
  f.gamma = std::hypot(ux, uy) < 1e-15 ? 0.0 : normalize_angle_positive(std::atan2(uy, ux));
  return f;
}

/// Body-frame gravity a robot at `frame` would read; inverse of slope_from_gravity.
inline std::array<double, 3> gravity_from_slope(const SlopeFrame& frame, double g = 9.81) {
  const double sa = std::sin(frame.alpha);
  return {-g * sa * std::cos(frame.gamma), -g * sa * std::sin(frame.gamma),
          -g * std::cos(frame.alpha)};
}

/// Reads a row-major heightmap CSV (comma separated, row 0 = minimum y).
inline GridHeightmap read_heightmap_csv(std::istream& in, double origin_x, double origin_y,
                                        double cell_size) {
  std::vector<double> heights;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{}) {
        throw LineError(ErrorCode::kMalformedRow, lineno, "bad height value");
      }
      heights.push_back(v);
      ++count;
      p = next;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (*p != ',') throw LineError(ErrorCode::kMalformedRow, lineno, "expected ','");
      ++p;
    }
    if (cols == 0) cols = count;
    if (count != cols) {
      throw LineError(ErrorCode::kMalformedRow, lineno, "ragged heightmap row");
    }
    ++rows;
  }
  return GridHeightmap(origin_x, origin_y, cell_size, rows, cols, std::move(heights));
}

}  // namespace slopewise

#endif  // SLOPEWISE_TERRAIN_HPP_
