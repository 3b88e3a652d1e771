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

#ifndef SLOPEWISE_CALIBRATION_HPP_
#define SLOPEWISE_CALIBRATION_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "slopewise/error.hpp"
#include "slopewise/se2.hpp"
#include "slopewise/telemetry.hpp"
#include "slopewise/terrain.hpp"
#include "slopewise/wrench_model.hpp"

namespace slopewise {

struct WindowQuality {
  std::size_t n_samples = 0;
  double twist_cv = 0.0;
  double power_cv = 0.0;
};

/// One short-window wrench estimate indexed by slope and heading.
struct WrenchSample {
  std::size_t window_id = 0;
  double alpha = 0.0;
  double gamma = 0.0;
  Component component = Component::kFx;
  double value = 0.0;
  WindowQuality quality;
};

struct WindowParams {
  double min_duration_s = 2.0;
  double max_twist_cv = 0.2;
  double max_alpha_drift = deg2rad(3.0);
  double max_gamma_drift = deg2rad(10.0);
  /// A single sample may deviate from the running mean of the dominant
  /// component by at most this fraction of it.
  double max_sample_deviation = 0.4;
  /// Larger than the preprocessing gap factor so holes left by outlier
  /// rejection do not split a run.
  double gap_factor = 25.0;
};

/// Half-open sample index range [begin, end).
struct Window {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

namespace detail {

struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 0 ? std::max(0.0, m2 / static_cast<double>(n)) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double cv() const {
    return mean != 0.0 ? stddev() / std::abs(mean) : std::numeric_limits<double>::infinity();
  }
};

inline std::array<double, 3> twist_components(const Twist& t) { return {t.vx, t.vy, t.omega}; }

struct WindowStats {
  std::array<Welford, 3> comp;
  std::array<double, 3> abs_sum{};
  double alpha_min = std::numeric_limits<double>::infinity();
  double alpha_max = -std::numeric_limits<double>::infinity();
  double gamma_ref = 0.0;
  double gamma_off_min = 0.0;
  double gamma_off_max = 0.0;

  void add(const Twist& t, const SlopeFrame& f) {
    const auto c = twist_components(t);
    if (comp[0].n == 0) gamma_ref = f.gamma;
    for (int k = 0; k < 3; ++k) {
      comp[k].add(c[k]);
      abs_sum[k] += std::abs(c[k]);
    }
    alpha_min = std::min(alpha_min, f.alpha);
    alpha_max = std::max(alpha_max, f.alpha);
    const double off = normalize_angle(f.gamma - gamma_ref);
    gamma_off_min = std::min(gamma_off_min, off);
    gamma_off_max = std::max(gamma_off_max, off);
  }

  std::size_t dominant() const {
    return static_cast<std::size_t>(std::max_element(abs_sum.begin(), abs_sum.end()) -
                                    abs_sum.begin());
  }
};

}  // namespace detail

inline std::vector<SlopeFrame> frames_from_gravity(std::span<const TelemetrySample> samples) {
  std::vector<SlopeFrame> frames;
  frames.reserve(samples.size());
  for (const auto& s : samples) frames.push_back(slope_from_gravity(s.gravity_body));
  return frames;
}

/// Slope frames along a log: from the body gravity vector, or from the map at
/// each logged pose when a terrain is given.
inline std::vector<SlopeFrame> slope_frames(std::span<const TelemetrySample> samples,
                                            const Terrain* terrain = nullptr) {
  if (terrain == nullptr) return frames_from_gravity(samples);
  std::vector<SlopeFrame> frames;
  frames.reserve(samples.size());
  for (const auto& s : samples) frames.push_back(terrain->frame_at(s.pose));
  return frames;
}

/**
 * Greedy maximal windows of coherent motion.
 *
 * A window grows while the dominant twist component keeps its coefficient
 * of variation within max_twist_cv, each new sample stays within
 * max_sample_deviation of the running mean, and alpha/gamma drift stay
 * bounded. Gamma drift is not checked for yaw-dominant windows, since
 * rotating in place sweeps the heading by construction. Windows never
 * span a time gap; those shorter than min_duration_s are dropped. Slopes
 * come from gravity unless a terrain is given.
 */
inline std::vector<Window> segment_windows(std::span<const TelemetrySample> samples,
                                           const WindowParams& params,
                                           const Terrain* terrain = nullptr) {
  std::vector<Window> out;
  if (samples.empty()) return out;
  const auto frames = slope_frames(samples, terrain);
  const auto starts = run_starts(samples, params.gap_factor);
  std::vector<bool> is_run_start(samples.size(), false);
  for (auto s : starts) is_run_start[s] = true;

  auto acceptable = [&](const detail::WindowStats& st, const Twist& added) {
    const std::size_t d = st.dominant();
    if (st.comp[d].cv() > params.max_twist_cv) return false;
    const double mean = st.comp[d].mean;
    const double x = detail::twist_components(added)[d];
    if (std::abs(x - mean) > params.max_sample_deviation * std::abs(mean)) return false;
    if (st.alpha_max - st.alpha_min > params.max_alpha_drift) return false;
    if (d != 2 && st.gamma_off_max - st.gamma_off_min > params.max_gamma_drift) return false;
    return true;
  };

  std::size_t i = 0;
  const std::size_t n = samples.size();
  while (i < n) {
    detail::WindowStats st;
    st.add(samples[i].twist, frames[i]);
    std::size_t j = i + 1;
    while (j < n && !is_run_start[j]) {
      detail::WindowStats trial = st;
      trial.add(samples[j].twist, frames[j]);
      if (!acceptable(trial, samples[j].twist)) break;
      st = trial;
      ++j;
    }
    if (samples[j - 1].t - samples[i].t >= params.min_duration_s) out.push_back({i, j});
    i = j;
  }
  return out;
}

/// Ratio the dominant axis must hold over every other axis (means of magnitudes).
inline constexpr double kDominanceRatio = 3.0;

/**
 * Wrench component for one window: (mean power - idle) / mean |dominant twist|.
 * alpha and gamma are window means (gamma circular), from gravity unless a
 * terrain is given.
 */
inline WrenchSample estimate_wrench_sample(std::span<const TelemetrySample> window,
                                           double idle_power_w, std::size_t window_id = 0,
                                           const Terrain* terrain = nullptr) {
  if (window.empty()) throw Error(ErrorCode::kInvalidArgument, "empty window");
  const auto frames = slope_frames(window, terrain);
  std::array<double, 3> abs_mean{};
  std::array<detail::Welford, 3> comp;
  detail::Welford power;
  double alpha_sum = 0.0, gc = 0.0, gs = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const TelemetrySample& s = window[i];
    const auto c = detail::twist_components(s.twist);
    for (int k = 0; k < 3; ++k) {
      abs_mean[k] += std::abs(c[k]);
      comp[k].add(c[k]);
    }
    power.add(electrical_power(s));
    const SlopeFrame& f = frames[i];
    alpha_sum += f.alpha;
    gc += std::cos(f.gamma);
    gs += std::sin(f.gamma);
  }
  const auto n = static_cast<double>(window.size());
  for (auto& a : abs_mean) a /= n;
  const std::size_t d = static_cast<std::size_t>(
      std::max_element(abs_mean.begin(), abs_mean.end()) - abs_mean.begin());
  for (std::size_t k = 0; k < 3; ++k) {
    if (k != d && abs_mean[d] < kDominanceRatio * abs_mean[k]) {
      throw Error(ErrorCode::kNoDominantAxis,
                  "window " + std::to_string(window_id) + " has no dominant twist axis");
    }
  }
  if (abs_mean[d] == 0.0) {
    throw Error(ErrorCode::kNoDominantAxis, "window " + std::to_string(window_id) + " is static");
  }
  WrenchSample w;
  w.window_id = window_id;
  w.alpha = alpha_sum / n;
  w.gamma = std::hypot(gc, gs) < 1e-12 ? 0.0 : normalize_angle_positive(std::atan2(gs, gc));
  w.component = static_cast<Component>(d);
  w.value = (power.mean - idle_power_w) / abs_mean[d];
  w.quality = {window.size(), comp[d].cv(), power.cv()};
  return w;
}

struct ConditionResidual {
  double alpha_deg = 0.0;
  double gamma_deg = 0.0;
  std::size_t n = 0;
  double mean_residual = 0.0;
};

struct ComponentFit {
  Component component = Component::kFx;
  std::size_t n_samples = 0;
  BasisVector coeffs{};
  double residual_rms = 0.0;
  double condition_number = 0.0;
  std::vector<ConditionResidual> per_condition;
};

struct FitReport {
  std::vector<ComponentFit> components;
  double max_residual_rms() const {
    double m = 0.0;
    for (const auto& c : components) m = std::max(m, c.residual_rms);
    return m;
  }
};

struct FitResult {
  WrenchModel model;
  FitReport report;
};

inline constexpr double kMaxConditionNumber = 1e8;

/**
 * Independent ordinary least squares per component over its enabled basis.
 * Components whose mask is empty are left at zero.
 */
inline FitResult fit_model(std::span<const WrenchSample> samples,
                           const std::array<BasisMask, 3>& masks, double idle_power_w = 0.0) {
  std::vector<WrenchSample> sorted(samples.begin(), samples.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.window_id < b.window_id; });

  FitResult res;
  res.model.masks = masks;
  res.model.coeffs = {};
  res.model.idle_power_w = idle_power_w;
  double a_lo = std::numeric_limits<double>::infinity();
  double a_hi = -std::numeric_limits<double>::infinity();

  for (Component c : kAllComponents) {
    const BasisMask& mask = masks[static_cast<std::size_t>(c)];
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < kBasisSize; ++k) {
      if (mask[k]) cols.push_back(k);
    }
    if (cols.empty()) continue;
    std::vector<const WrenchSample*> rows;
    for (const auto& s : sorted) {
      if (s.component == c) rows.push_back(&s);
    }
    if (rows.size() < cols.size()) {
      throw Error(ErrorCode::kInsufficientSamples,
                  std::string(to_string(c)) + ": " + std::to_string(rows.size()) +
                      " samples for " + std::to_string(cols.size()) + " basis terms");
    }
    Eigen::MatrixXd a(rows.size(), cols.size());
    Eigen::VectorXd b(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const BasisVector phi = basis({rows[r]->alpha, rows[r]->gamma});
      for (std::size_t k = 0; k < cols.size(); ++k) a(r, k) = phi[cols[k]];
      b(r) = rows[r]->value;
      a_lo = std::min(a_lo, rows[r]->alpha);
      a_hi = std::max(a_hi, rows[r]->alpha);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxConditionNumber)) {
      throw Error(ErrorCode::kIllConditioned, std::string(to_string(c)) +
                                                  ": condition number " + std::to_string(cond));
    }
    const Eigen::VectorXd x = svd.solve(b);
    const Eigen::VectorXd resid = b - a * x;

    ComponentFit fit;
    fit.component = c;
    fit.n_samples = rows.size();
    for (std::size_t k = 0; k < cols.size(); ++k) fit.coeffs[cols[k]] = x(k);
    fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(rows.size()));
    fit.condition_number = cond;

    std::map<std::pair<long long, long long>, ConditionResidual> by_condition;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      // Conditions keyed at 0.1 degree resolution.
      const auto key = std::make_pair(std::llround(rad2deg(rows[r]->alpha) * 10.0),
                                      std::llround(rad2deg(rows[r]->gamma) * 10.0));
      auto& cr = by_condition[key];
      cr.alpha_deg = static_cast<double>(key.first) / 10.0;
      cr.gamma_deg = static_cast<double>(key.second) / 10.0;
      ++cr.n;
      cr.mean_residual += (resid(r) - cr.mean_residual) / static_cast<double>(cr.n);
    }
    for (const auto& [_, cr] : by_condition) fit.per_condition.push_back(cr);

    res.model.coeff(c) = fit.coeffs;
    res.report.components.push_back(std::move(fit));
  }
  if (std::isfinite(a_lo)) res.model.alpha_fit_range = {a_lo, a_hi};
  return res;
}

struct RepeatabilityBin {
  Component component = Component::kFx;
  double alpha_lo_deg = 0.0;
  double gamma_lo_deg = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double cv = 0.0;
  bool flagged = false;  // fewer than 2 samples
};

/// Groups samples into half-open [lo, lo + width) bins by window mean and
/// reports per-bin spread.
inline std::vector<RepeatabilityBin> repeatability_report(std::span<const WrenchSample> samples,
                                                          double alpha_bin_deg = 2.0,
                                                          double gamma_bin_deg = 15.0) {
  if (!(alpha_bin_deg > 0.0) || !(gamma_bin_deg > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bin widths must be > 0");
  }
  // Tolerance keeps values that sit on a bin edge up to rounding in the upper bin.
  auto bin_of = [](double v, double w) {
    return static_cast<long long>(std::floor(v / w + 1e-9));
  };
  std::map<std::tuple<std::size_t, long long, long long>, std::vector<double>> bins;
  for (const auto& s : samples) {
    bins[{static_cast<std::size_t>(s.component), bin_of(rad2deg(s.alpha), alpha_bin_deg),
          bin_of(rad2deg(s.gamma), gamma_bin_deg)}]
        .push_back(s.value);
  }
  std::vector<RepeatabilityBin> out;
  for (const auto& [key, values] : bins) {
    detail::Welford w;
    for (double v : values) w.add(v);
    RepeatabilityBin b;
    b.component = static_cast<Component>(std::get<0>(key));
    b.alpha_lo_deg = static_cast<double>(std::get<1>(key)) * alpha_bin_deg;
    b.gamma_lo_deg = static_cast<double>(std::get<2>(key)) * gamma_bin_deg;
    b.n = values.size();
    b.mean = w.mean;
    b.stddev = w.stddev();
    b.cv = b.stddev == 0.0 ? 0.0 : w.cv();
    b.flagged = values.size() < 2;
    out.push_back(b);
  }
  return out;
}

inline constexpr std::string_view kWrenchSampleHeader =
    "window_id,alpha_rad,gamma_rad,component,value,n_samples,twist_cv,power_cv";

inline void write_wrench_samples(std::ostream& os, std::span<const WrenchSample> samples) {
  os << kWrenchSampleHeader << '\n';
  for (const auto& s : samples) {
    os << s.window_id << ',';
    write_double(os, s.alpha);
    os << ',';
    write_double(os, s.gamma);
    os << ',' << to_string(s.component) << ',';
    write_double(os, s.value);
    os << ',' << s.quality.n_samples << ',';
    write_double(os, s.quality.twist_cv);
    os << ',';
    write_double(os, s.quality.power_cv);
    os << '\n';
  }
}

inline std::vector<WrenchSample> read_wrench_samples(std::istream& in) {
  std::vector<WrenchSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kWrenchSampleHeader) {
        throw LineError(ErrorCode::kMalformedRow, lineno, "unexpected header");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 8) throw LineError(ErrorCode::kMalformedRow, lineno, "expected 8 fields");
    auto num = [&](const std::string& s) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) {
        throw LineError(ErrorCode::kMalformedRow, lineno, "bad number '" + s + "'");
      }
      return v;
    };
    WrenchSample w;
    w.window_id = static_cast<std::size_t>(num(f[0]));
    w.alpha = num(f[1]);
    w.gamma = num(f[2]);
    try {
      w.component = component_from_string(f[3]);
    } catch (const Error&) {
      throw LineError(ErrorCode::kMalformedRow, lineno, "bad component '" + f[3] + "'");
    }
    w.value = num(f[4]);
    w.quality = {static_cast<std::size_t>(num(f[5])), num(f[6]), num(f[7])};
    out.push_back(w);
  }
  return out;
}

struct CalibrationConfig {
  WindowParams windows;
  std::array<BasisMask, 3> masks = WrenchModel::default_masks();
  double idle_power_w = 0.0;
  /// Slope source: null reads the IMU gravity vector, otherwise the map is
  /// queried at each logged pose. Not owned.
  const Terrain* terrain = nullptr;
};

struct CalibrationResult {
  std::vector<WrenchSample> samples;
  std::size_t windows_found = 0;
  std::size_t windows_without_dominant_axis = 0;
  FitResult fit;
};

/// segment -> estimate -> fit on already cleaned telemetry.
inline CalibrationResult calibrate(std::span<const TelemetrySample> cleaned,
                                   const CalibrationConfig& cfg) {
  CalibrationResult out;
  const auto windows = segment_windows(cleaned, cfg.windows, cfg.terrain);
  out.windows_found = windows.size();
  for (std::size_t id = 0; id < windows.size(); ++id) {
    const auto& w = windows[id];
    try {
      out.samples.push_back(
          estimate_wrench_sample(cleaned.subspan(w.begin, w.size()), cfg.idle_power_w, id,
                                 cfg.terrain));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoDominantAxis) throw;
      ++out.windows_without_dominant_axis;
    }
  }
  out.fit = fit_model(out.samples, cfg.masks, cfg.idle_power_w);
  return out;
}

}  // namespace slopewise

#endif  // SLOPEWISE_CALIBRATION_HPP_
