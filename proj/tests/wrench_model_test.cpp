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

#include "slopewise/wrench_model.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_util.hpp"

namespace slopewise {
namespace {

using testing::ExpectErrorCode;

// fx = 40 + 120 alpha cos(gamma); other components zero.
WrenchModel ForwardOnly() {
  WrenchModel m;
  m.coeff(Component::kFx) = {40.0, 0.0, 120.0, 0.0};
  return m;
}

WrenchModel RandomModel(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-50, 150);
  WrenchModel m;
  m.masks = {BasisMask{true, true, true, true}, BasisMask{true, true, true, true},
             BasisMask{true, true, true, true}};
  for (auto& c : m.coeffs) c = {u(rng), u(rng), u(rng), u(rng)};
  m.f_max = 1e9;
  return m;
}

TEST(Evaluate, ZeroCoefficients) {
  const Wrench w = WrenchModel{}.evaluate({0.3, 1.0});
  EXPECT_EQ(w.fx, 0.0);
  EXPECT_EQ(w.fy, 0.0);
  EXPECT_EQ(w.tau, 0.0);
}

TEST(Evaluate, HandComputedUphill) {
  const Wrench w = ForwardOnly().evaluate({deg2rad(10), 0.0});
  EXPECT_NEAR(w.fx, 60.943951023931955, 1e-12);
}

TEST(Evaluate, FlatGroundIsIsotropic) {
  std::mt19937_64 rng(1);
  const WrenchModel m = RandomModel(rng);
  const Wrench ref = m.evaluate({0.0, 0.0});
  for (double g : {0.5, 1.7, kPi, 5.0}) {
    const Wrench w = m.evaluate({0.0, g});
    EXPECT_EQ(w.fx, ref.fx);
    EXPECT_EQ(w.fy, ref.fy);
    EXPECT_EQ(w.tau, ref.tau);
  }
}

TEST(Evaluate, MaskDisablesStoredCoefficient) {
  WrenchModel m;
  m.coeff(Component::kFy) = {1.0, 0.0, 99.0, 99.0};
  EXPECT_DOUBLE_EQ(m.evaluate({0.2, 0.0}).fy, 1.0);
}

TEST(Evaluate, CapAtFMax) {
  WrenchModel m;
  m.coeff(Component::kTau) = {0.0, 1000.0, 0.0, 0.0};
  const auto e = m.evaluate_checked({1.0, 0.0});
  EXPECT_TRUE(e.capped);
  EXPECT_EQ(e.wrench.tau, 500.0);
  EXPECT_FALSE(m.evaluate_checked({0.1, 0.0}).capped);
}

TEST(Power, ZeroTwistIsIdle) {
  WrenchModel m = WrenchModel::default_ground_truth();
  m.idle_power_w = 12.5;
  EXPECT_EQ(m.power({0.2, 1.0}, {0, 0, 0}), 12.5);
}

TEST(Power, LiteralProduct) {
  WrenchModel m = ForwardOnly();
  m.eval_mode = EvalMode::kLiteral;
  EXPECT_NEAR(m.power({deg2rad(10), 0.0}, {0.3, 0, 0}), 18.283185307179586, 1e-12);
}

TEST(Power, DissipativeSignSymmetry) {
  WrenchModel m;
  m.coeff(Component::kTau) = {5.0, 20.0, 0.0, 0.0};
  const SlopeFrame f{0.2, 0.4};
  EXPECT_EQ(m.power(f, {0, 0, -0.5}), m.power(f, {0, 0, 0.5}));
  m.eval_mode = EvalMode::kLiteral;
  EXPECT_EQ(m.power(f, {0, 0, -0.5}), -m.power(f, {0, 0, 0.5}));
}

TEST(Power, MirrorSymmetryInGamma) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ua(0, 0.5), ug(0, kTwoPi);
  for (int i = 0; i < 200; ++i) {
    const WrenchModel m = RandomModel(rng);
    const double a = ua(rng), g = ug(rng);
    const Twist xi{0.3, 0.0, 0.0};
    EXPECT_NEAR(m.power({a, g}, xi), m.power({a, kTwoPi - g}, xi), 1e-9);
  }
}

TEST(Power, LiteralLinearity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1), ua(0, 0.5), ug(0, kTwoPi);
  for (int i = 0; i < 500; ++i) {
    WrenchModel m = RandomModel(rng);
    m.eval_mode = EvalMode::kLiteral;
    const SlopeFrame f{ua(rng), ug(rng)};
    const Twist a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
    const double lambda = 3 * u(rng);
    const double lhs = m.power(f, lambda * a + b);
    const double rhs = lambda * m.power(f, a) + m.power(f, b);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Power, DissipativeNonNegativeForNonNegativeCoefficients) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 100), v(-1, 1), ua(0, 1.5), ug(0, kTwoPi);
  for (int i = 0; i < 500; ++i) {
    WrenchModel m;
    for (auto& c : m.coeffs) c = {u(rng), u(rng), u(rng), u(rng)};
    m.idle_power_w = u(rng) * 0.1;
    const Twist xi{v(rng), v(rng), v(rng)};
    EXPECT_GE(m.power({ua(rng), ug(rng)}, xi), 0.0);
  }
}

TEST(ComponentRange, MatchesDenseSampling) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const WrenchModel m = RandomModel(rng);
    for (Component c : kAllComponents) {
      const double amax = 0.4;
      const auto range = m.component_range(c, amax);
      double lo = 1e300, hi = -1e300;
      for (int i = 0; i <= 40; ++i) {
        for (int j = 0; j <= 720; ++j) {
          const double v = m.raw_component(c, {amax * i / 40.0, kTwoPi * j / 720.0});
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      EXPECT_LE(range[0], lo + 1e-12);
      EXPECT_GE(range[1], hi - 1e-12);
      EXPECT_NEAR(range[0], lo, 1e-2);
      EXPECT_NEAR(range[1], hi, 1e-2);
    }
  }
}

TEST(CostMap, SingleCellZeroModel) {
  const CostMap map = export_cost_map(WrenchModel{}, {0.0}, {0.0}, MotionAxis::kForward);
  ASSERT_EQ(map.values.size(), 1u);
  EXPECT_EQ(map.values[0], 0.0);
}

TEST(CostMap, UphillForwardNonDecreasingInAlpha) {
  const WrenchModel m = WrenchModel::default_ground_truth();
  const auto alphas = sample_range(0, deg2rad(20), deg2rad(1));
  const std::vector<double> gammas = {0.0, deg2rad(30), deg2rad(60)};
  const CostMap map = export_cost_map(m, alphas, gammas, MotionAxis::kForward);
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    for (std::size_t i = 1; i < alphas.size(); ++i) EXPECT_GE(map.at(i, j), map.at(i - 1, j));
  }
}

TEST(CostMap, LateralCrossSlopeExceedsForwardUphill) {
  const WrenchModel m = WrenchModel::default_ground_truth();
  const auto alphas = sample_range(deg2rad(5), deg2rad(20), deg2rad(5));
  const CostMap fwd = export_cost_map(m, alphas, {0.0}, MotionAxis::kForward);
  const CostMap lat = export_cost_map(m, alphas, {kPi / 2}, MotionAxis::kLateral);
  for (std::size_t i = 0; i < alphas.size(); ++i) EXPECT_GT(lat.at(i, 0), fwd.at(i, 0));
}

TEST(CostMap, EmptyRangeRejected) {
  ExpectErrorCode([] { export_cost_map(WrenchModel{}, {}, {0.0}, MotionAxis::kForward); },
                  ErrorCode::kInvalidArgument);
}

TEST(CostMap, CsvLayout) {
  const CostMap map =
      export_cost_map(ForwardOnly(), {0.0, deg2rad(10)}, {0.0, kPi}, MotionAxis::kForward);
  std::ostringstream os;
  write_cost_map_csv(os, map);
  std::istringstream in(os.str());
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  EXPECT_EQ(header, "alpha_deg,0,180");
  EXPECT_EQ(row0, "0,40,40");
  EXPECT_EQ(row1.substr(0, 3), "10,");
}

TEST(SampleRange, InclusiveEnds) {
  EXPECT_EQ(sample_range(0, 20, 5).size(), 5u);
  EXPECT_EQ(sample_range(0, 0, 1).size(), 1u);
  EXPECT_EQ(sample_range(0, 0.3, 0.1).size(), 4u);
  ExpectErrorCode([] { sample_range(1, 0, 1); }, ErrorCode::kInvalidArgument);
}

TEST(Names, RoundTrip) {
  for (Component c : kAllComponents) EXPECT_EQ(component_from_string(to_string(c)), c);
  for (EvalMode m : {EvalMode::kLiteral, EvalMode::kDissipative}) {
    EXPECT_EQ(eval_mode_from_string(to_string(m)), m);
  }
  for (MotionAxis a : {MotionAxis::kForward, MotionAxis::kLateral, MotionAxis::kYaw}) {
    EXPECT_EQ(motion_axis_from_string(to_string(a)), a);
  }
  ExpectErrorCode([] { eval_mode_from_string("bogus"); }, ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace slopewise
