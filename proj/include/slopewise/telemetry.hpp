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

#ifndef SLOPEWISE_TELEMETRY_HPP_
#define SLOPEWISE_TELEMETRY_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slopewise/error.hpp"
#include "slopewise/se2.hpp"
#include "slopewise/terrain.hpp"
#include "slopewise/wrench_model.hpp"

namespace slopewise {

/// One onboard record: IMU gravity, odometry pose and twist, battery readings.
struct TelemetrySample {
  double t = 0.0;
  std::array<double, 3> gravity_body{0.0, 0.0, -9.81};
  Pose pose;
  Twist twist;
  double voltage = 0.0;
  double current = 0.0;
};

inline constexpr std::string_view kTelemetryHeader =
    "t_s,gx_mps2,gy_mps2,gz_mps2,x_m,y_m,yaw_rad,vx_mps,vy_mps,omega_radps,voltage_v,current_a";

inline double electrical_power(const TelemetrySample& s) { return s.voltage * s.current; }

namespace detail {

inline std::array<double, 12> parse_fields(std::string_view line, std::size_t lineno) {
  std::array<double, 12> v{};
  std::size_t n = 0;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (true) {
    if (n == v.size()) {
      throw LineError(ErrorCode::kMalformedRow, lineno, "too many fields");
    }
    const char* field_end = std::find(p, end, ',');
    auto [next, ec] = std::from_chars(p, field_end, v[n]);
    if (ec != std::errc{} || next != field_end || !std::isfinite(v[n])) {
      throw LineError(ErrorCode::kMalformedRow, lineno,
                      "field " + std::to_string(n + 1) + " is not a finite number: '" +
                          std::string(p, field_end) + "'");
    }
    ++n;
    if (field_end == end) break;
    p = field_end + 1;
  }
  if (n != v.size()) {
    throw LineError(ErrorCode::kMalformedRow, lineno,
                    "expected 12 fields, got " + std::to_string(n));
  }
  return v;
}

}  // namespace detail

/// Parses a telemetry CSV with the exact kTelemetryHeader header.
inline std::vector<TelemetrySample> parse_log(std::istream& in) {
  std::vector<TelemetrySample> out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line != kTelemetryHeader) {
        throw LineError(ErrorCode::kMalformedRow, lineno, "unexpected header");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = detail::parse_fields(line, lineno);
    TelemetrySample s;
    s.t = f[0];
    s.gravity_body = {f[1], f[2], f[3]};
    s.pose = {f[4], f[5], f[6]};
    s.twist = {f[7], f[8], f[9]};
    s.voltage = f[10];
    s.current = f[11];
    if (!(s.voltage > 0.0)) {
      throw LineError(ErrorCode::kMalformedRow, lineno, "voltage must be > 0");
    }
    if (s.current < 0.0) {
      throw LineError(ErrorCode::kMalformedRow, lineno, "current must be >= 0");
    }
    if (!out.empty() && !(s.t > out.back().t)) {
      throw LineError(ErrorCode::kNonMonotonicTime, lineno, "timestamp does not increase");
    }
    out.push_back(s);
  }
  if (!header_seen) throw LineError(ErrorCode::kMalformedRow, 1, "missing header");
  return out;
}

/// Writes samples with round-trip precision.
inline void write_log(std::ostream& os, std::span<const TelemetrySample> samples) {
  os << kTelemetryHeader << '\n';
  for (const auto& s : samples) {
    const double f[12] = {s.t,      s.gravity_body[0], s.gravity_body[1], s.gravity_body[2],
                          s.pose.x, s.pose.y,          s.pose.yaw,        s.twist.vx,
                          s.twist.vy, s.twist.omega,   s.voltage,         s.current};
    for (int i = 0; i < 12; ++i) {
      if (i) os << ',';
      write_double(os, f[i]);
    }
    os << '\n';
  }
}

struct PreprocessConfig {
  double v_min = 0.05;         // m/s, reused as rad/s for omega
  std::size_t median_window = 5;
  double mad_threshold = 3.0;
  double ema_alpha = 0.2;
  double consistency_eta = 5.0;
  double power_floor_w = 1.0;
  /// A time step larger than gap_factor x the median step starts a new run;
  /// filters never reach across runs.
  double gap_factor = 5.0;

  void validate() const {
    if (!(v_min >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "v_min must be >= 0");
    if (median_window < 1 || median_window % 2 == 0) {
      throw Error(ErrorCode::kInvalidArgument, "median_window must be odd and >= 1");
    }
    if (!(mad_threshold > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "mad_threshold must be > 0");
    }
    if (!(ema_alpha > 0.0 && ema_alpha <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "ema_alpha must be in (0, 1]");
    }
    if (!(consistency_eta >= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "consistency_eta must be >= 1");
    }
    if (!(power_floor_w >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "power_floor_w must be >= 0");
    }
    if (!(gap_factor > 1.0)) throw Error(ErrorCode::kInvalidArgument, "gap_factor must be > 1");
  }
};

struct PreprocessReport {
  std::size_t input_count = 0;
  std::size_t dropped_low_speed = 0;
  std::size_t rejected_outlier = 0;
  std::size_t rejected_consistency = 0;
  std::size_t output_count = 0;
  std::size_t outlier_passes = 0;
  bool consistency_checked = false;
};

struct PreprocessResult {
  std::vector<TelemetrySample> samples;
  PreprocessReport report;
};

inline bool is_low_speed(const TelemetrySample& s, double v_min) {
  return std::hypot(s.twist.vx, s.twist.vy) < v_min && std::abs(s.twist.omega) < v_min;
}

/// Start index of each contiguous run; a run breaks where the time step
/// exceeds gap_factor times the median step.
inline std::vector<std::size_t> run_starts(std::span<const TelemetrySample> s,
                                           double gap_factor) {
  std::vector<std::size_t> starts;
  if (s.empty()) return starts;
  starts.push_back(0);
  if (s.size() < 2) return starts;
  std::vector<double> dts;
  dts.reserve(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) dts.push_back(s[i].t - s[i - 1].t);
  std::vector<double> sorted = dts;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median_dt = sorted[sorted.size() / 2];
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (dts[i - 1] > gap_factor * median_dt) starts.push_back(i);
  }
  return starts;
}

namespace detail {

inline double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double m = v[n / 2];
  if (n % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + n / 2);
    m = 0.5 * (m + lower);
  }
  return m;
}

// One pass of the sliding median/MAD test. Windows are centred where
// possible and shifted inward at run edges.
inline std::vector<bool> mad_outliers(std::span<const TelemetrySample> s,
                                      const PreprocessConfig& cfg) {
  std::vector<bool> reject(s.size(), false);
  auto starts = run_starts(s, cfg.gap_factor);
  starts.push_back(s.size());
  std::vector<double> window;
  for (std::size_t r = 0; r + 1 < starts.size(); ++r) {
    const std::size_t lo = starts[r];
    const std::size_t hi = starts[r + 1];
    const std::size_t len = hi - lo;
    const std::size_t w = std::min(cfg.median_window, len);
    for (std::size_t i = lo; i < hi; ++i) {
      std::size_t first = i >= lo + w / 2 ? i - w / 2 : lo;
      if (first + w > hi) first = hi - w;
      window.clear();
      for (std::size_t k = first; k < first + w; ++k) window.push_back(electrical_power(s[k]));
      const double med = median_of(window);
      for (double& v : window) v = std::abs(v - med);
      const double mad = median_of(window);
      const double dev = std::abs(electrical_power(s[i]) - med);
      if (dev > cfg.mad_threshold * 1.4826 * mad) reject[i] = true;
    }
  }
  return reject;
}

}  // namespace detail

/// Rule 1: drops samples moving slower than v_min both in translation and yaw.
inline std::vector<TelemetrySample> drop_low_speed(std::span<const TelemetrySample> s,
                                                   double v_min) {
  std::vector<TelemetrySample> out;
  out.reserve(s.size());
  for (const auto& x : s) {
    if (!is_low_speed(x, v_min)) out.push_back(x);
  }
  return out;
}

/// Rule 2: median/MAD power outlier rejection, repeated until a pass removes
/// nothing. Returns the number of passes that removed samples.
inline std::size_t reject_power_outliers(std::vector<TelemetrySample>& s,
                                         const PreprocessConfig& cfg) {
  std::size_t passes = 0;
  while (true) {
    if (s.size() < cfg.median_window) {
      throw Error(ErrorCode::kWindowTooShort,
                  std::to_string(s.size()) + " samples left, median window is " +
                      std::to_string(cfg.median_window));
    }
    const auto reject = detail::mad_outliers(s, cfg);
    std::vector<TelemetrySample> kept;
    kept.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!reject[i]) kept.push_back(s[i]);
    }
    if (kept.size() == s.size()) return passes;
    ++passes;
    s = std::move(kept);
  }
}

/// Rule 3: exponential moving average of power and twist, restarted at gaps.
/// Power is smoothed and written back through the current.
inline void smooth_ema(std::vector<TelemetrySample>& s, const PreprocessConfig& cfg) {
  const double a = cfg.ema_alpha;
  const auto starts = run_starts(s, cfg.gap_factor);
  std::size_t next_run = 0;
  double p = 0.0;
  Twist v;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p_in = electrical_power(s[i]);
    if (next_run < starts.size() && starts[next_run] == i) {
      ++next_run;
      p = p_in;
      v = s[i].twist;
      continue;
    }
    // y += a * (x - y) keeps a constant signal bit-exact.
    p += a * (p_in - p);
    v = v + (s[i].twist - v) * a;
    s[i].twist = v;
    if (p != p_in) s[i].current = p / s[i].voltage;
  }
}

/// Full cleaning pipeline: low-speed discard, MAD outliers, EMA smoothing,
/// then the electrical/mechanical consistency bound when a model is given.
inline PreprocessResult preprocess(std::span<const TelemetrySample> samples,
                                   const PreprocessConfig& cfg,
                                   const WrenchModel* model = nullptr) {
  cfg.validate();
  PreprocessResult res;
  res.report.input_count = samples.size();

  std::vector<TelemetrySample> s = drop_low_speed(samples, cfg.v_min);
  res.report.dropped_low_speed = samples.size() - s.size();
  if (s.empty()) {
    res.report.output_count = 0;
    return res;
  }

  const std::size_t before_outliers = s.size();
  res.report.outlier_passes = reject_power_outliers(s, cfg);
  res.report.rejected_outlier = before_outliers - s.size();

  smooth_ema(s, cfg);

  if (model != nullptr) {
    res.report.consistency_checked = true;
    std::vector<TelemetrySample> kept;
    kept.reserve(s.size());
    for (const auto& x : s) {
      const double p_mech = model->power(slope_from_gravity(x.gravity_body), x.twist);
      const double p_elec = electrical_power(x);
      const bool low = p_elec < p_mech / cfg.consistency_eta;
      const bool high = p_elec > cfg.consistency_eta * std::max(p_mech, cfg.power_floor_w);
      if (!low && !high) kept.push_back(x);
    }
    res.report.rejected_consistency = s.size() - kept.size();
    s = std::move(kept);
  }

  res.report.output_count = s.size();
  res.samples = std::move(s);
  return res;
}

}  // namespace slopewise

#endif  // SLOPEWISE_TELEMETRY_HPP_
