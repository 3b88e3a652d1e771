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

#include "slopewise/path_energy.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace slopewise {
namespace {

using testing::ExpectErrorCode;
using testing::ExpectPoseNear;

WrenchModel ConstantModel(double fx, double fy, double tau) {
  WrenchModel m;
  m.coeff(Component::kFx) = {fx, 0, 0, 0};
  m.coeff(Component::kFy) = {fy, 0, 0, 0};
  m.coeff(Component::kTau) = {tau, 0, 0, 0};
  return m;
}

GridHeightmap Bowl() {
  // h = 0.02 x^2 + 0.01 x y + 0.03 y^2 - 0.1 x on [0, 20]^2.
  std::vector<double> h;
  for (int r = 0; r <= 40; ++r) {
    for (int c = 0; c <= 40; ++c) {
      const double x = 0.5 * c, y = 0.5 * r;
      h.push_back(0.02 * x * x + 0.01 * x * y + 0.03 * y * y - 0.1 * x);
    }
  }
  return GridHeightmap(0, 0, 0.5, 41, 41, std::move(h));
}

const Terrain kPlane = Terrain::plane(deg2rad(15), 0.3);

TEST(EnergyOfPath, EmptyPathIsZero) {
  const auto r = energy_of_path(PathSpec{}, kPlane, WrenchModel::default_ground_truth());
  EXPECT_EQ(r.total_j, 0.0);
  EXPECT_TRUE(r.per_primitive_j.empty());
}

TEST(EnergyOfPath, StraightForceTimesDistance) {
  const WrenchModel m = ConstantModel(60.943951023931955, 0, 0);
  const PathSpec p{{}, {Straight{10.0, 0.3}}};
  const auto r = energy_of_path(p, kPlane, m);
  EXPECT_NEAR(r.total_j, 609.43951023931955, 1e-9);
  EXPECT_NEAR(r.duration_s, 10.0 / 0.3, 1e-12);
  EXPECT_EQ(r.samples_used, 3334u);
  // Refining dt leaves a constant integrand unchanged.
  EXPECT_NEAR(energy_of_path(p, kPlane, m, 0.001).total_j, r.total_j, 1e-9);
}

TEST(EnergyOfPath, TurnInPlaceTorqueTimesAngle) {
  const WrenchModel m = ConstantModel(0, 0, 12.0);
  const PathSpec p{{}, {TurnInPlace{kPi / 2, 0.5}}};
  EXPECT_NEAR(energy_of_path(p, kPlane, m).total_j, 18.849555921538759, 1e-9);
  const PathSpec neg{{}, {TurnInPlace{-kPi / 2, 0.5}}};
  EXPECT_NEAR(energy_of_path(neg, kPlane, m).total_j, 18.849555921538759, 1e-9);
}

TEST(EnergyOfPath, TotalIsSumOfPrimitives) {
  const PathSpec p{{6, 6, 0.2},
                   {Straight{2.0, 0.3}, Arc{1.5, -1.0, 0.3}, TurnInPlace{0.7, 0.5},
                    Straight{1.0, 0.2, MotionAxis::kLateral, true}}};
  const auto r = energy_of_path(p, Terrain(Bowl()), WrenchModel::default_ground_truth());
  ASSERT_EQ(r.per_primitive_j.size(), 4u);
  double sum = 0;
  for (double e : r.per_primitive_j) sum += e;
  EXPECT_NEAR(r.total_j, sum, 1e-9);
  EXPECT_GT(r.per_primitive_j[3], 0.0);
}

TEST(EnergyOfPath, UphillCostsMoreThanDownhill) {
  const Terrain t = Terrain::plane(deg2rad(10), 0.0);
  const WrenchModel m = WrenchModel::default_ground_truth();
  const double up = energy_of_path({{0, 0, 0}, {Straight{5, 0.3}}}, t, m).total_j;
  const double down = energy_of_path({{0, 0, kPi}, {Straight{5, 0.3}}}, t, m).total_j;
  const double across = energy_of_path({{0, 0, kPi / 2}, {Straight{5, 0.3}}}, t, m).total_j;
  EXPECT_GT(up, across);
  EXPECT_GT(across, down);
  EXPECT_GT(down, 0.0);
}

TEST(EnergyOfPath, Errors) {
  const Terrain grid(Bowl());
  const WrenchModel m = WrenchModel::default_ground_truth();
  ExpectErrorCode([&] { energy_of_path({{19, 5, 0}, {Straight{3, 0.3}}}, grid, m); },
                  ErrorCode::kOutOfBounds);
  ExpectErrorCode([&] { energy_of_path({{-1, 5, 0}, {}}, grid, m); }, ErrorCode::kOutOfBounds);
  ExpectErrorCode([&] { energy_of_path({{5, 5, 0}, {Straight{1, 0.3}}}, grid, m, 0.0); },
                  ErrorCode::kInvalidArgument);
  ExpectErrorCode([&] { energy_of_path({{5, 5, 0}, {Straight{-1, 0.3}}}, grid, m); },
                  ErrorCode::kInvalidArgument);
  ExpectErrorCode([&] { energy_of_path({{5, 5, 0}, {TurnInPlace{1, 0}}}, grid, m); },
                  ErrorCode::kInvalidArgument);
  WrenchModel bad = m;
  bad.coeff(Component::kFx)[0] = std::numeric_limits<double>::quiet_NaN();
  ExpectErrorCode([&] { energy_of_path({{5, 5, 0}, {Straight{1, 0.3}}}, grid, bad); },
                  ErrorCode::kNonFinitePower);
}

TEST(EnergyOfPath, Warnings) {
  WrenchModel m = WrenchModel::default_ground_truth();
  m.alpha_fit_range = {deg2rad(5), deg2rad(10)};
  m.f_max = 50.0;
  const auto r = energy_of_path({{0, 0, 0}, {Straight{1, 0.3}}}, kPlane, m);
  ASSERT_EQ(r.warnings.size(), 2u);
  EXPECT_EQ(r.warnings[0], "wrench_capped_at_f_max");
  EXPECT_EQ(r.warnings[1], "alpha_outside_fit_range");
  m.alpha_fit_range = {0, deg2rad(20)};
  m.f_max = 500.0;
  EXPECT_TRUE(energy_of_path({{0, 0, 0}, {Straight{1, 0.3}}}, kPlane, m).warnings.empty());
}

TEST(Geometry, ArcEndpointAndPoseAt) {
  const PathSpec p{{1, 2, 0}, {Arc{2.0, kPi / 2, 0.5}}};
  ExpectPoseNear(end_pose(p), {3, 4, kPi / 2}, 1e-12);
  EXPECT_NEAR(path_duration(p), kPi / 0.5, 1e-12);
  ExpectPoseNear(pose_at(p, 100.0), end_pose(p), 1e-12);
  ExpectPoseNear(pose_at(p, 0.0), p.start, 0.0);
  const PathSpec q{{}, {Arc{1.0, -kPi, 1.0}}};
  ExpectPoseNear(end_pose(q), {0, -2, kPi}, 1e-12);
}

TEST(Superposition, MidpointSplitIsExact) {
  const Terrain grid(Bowl());
  const WrenchModel m = WrenchModel::default_ground_truth();
  const std::vector<PathSpec> wholes = {
      {{2, 2, 0.4}, {Straight{4.0, 0.3}, Arc{3.0, 1.2, 0.3}, TurnInPlace{-1.0, 0.5}}},
      {{5, 10, -1.0}, {Arc{2.5, -2.0, 0.27}}},
      {{3, 3, 2.0}, {TurnInPlace{2.5, 0.45}, Straight{2.2, 0.31, MotionAxis::kLateral}}}};
  for (const auto& whole : wholes) {
    for (double at : {0.5, 0.1234, 0.9}) {
      const auto [a, b] = split_path(whole, at);
      ExpectPoseNear(end_pose(b), end_pose(whole), 1e-9);
      const std::vector<PathSpec> parts = {a, b};
      EXPECT_LE(superposition_check(parts, whole, grid, m), 1e-9);
    }
  }
}

TEST(Superposition, SplitAtEndsKeepsWholeOnOneSide) {
  const PathSpec whole{{2, 2, 0}, {Straight{1.0, 0.3}, Straight{1.0, 0.3}}};
  const auto [a, b] = split_path(whole, 0.0);
  EXPECT_TRUE(a.primitives.empty());
  EXPECT_EQ(b.primitives.size(), 2u);
  const auto [c, d] = split_path(whole, 1.0);
  EXPECT_EQ(c.primitives.size(), 2u);
  EXPECT_TRUE(d.primitives.empty());
  const auto [e, f] = split_path(whole, 0.5);
  EXPECT_EQ(e.primitives.size(), 1u);
  EXPECT_EQ(f.primitives.size(), 1u);
  ExpectErrorCode([&] { split_path(whole, 1.5); }, ErrorCode::kInvalidArgument);
}

TEST(Superposition, CollinearSegmentsOnPlane) {
  const WrenchModel m = WrenchModel::default_ground_truth();
  const PathSpec a{{0, 0, 0.7}, {Straight{5.0, 0.3}}};
  const PathSpec b{end_pose(a), {Straight{5.0, 0.3}}};
  const PathSpec c{{0, 0, 0.7}, {Straight{10.0, 0.3}}};
  const std::vector<PathSpec> parts = {a, b};
  EXPECT_LE(superposition_check(parts, c, kPlane, m), 1e-6);
}

TEST(Superposition, TurnThenStraightDiffersFromArc) {
  const WrenchModel m = WrenchModel::default_ground_truth();
  const PathSpec arc{{}, {Arc{2.0, kPi / 2, 0.3}}};
  const PathSpec t1{{}, {TurnInPlace{kPi / 4, 0.5}}};
  const PathSpec s{end_pose(t1), {Straight{2.0 * std::sqrt(2.0), 0.3}}};
  const PathSpec t2{end_pose(s), {TurnInPlace{kPi / 4, 0.5}}};
  const std::vector<PathSpec> parts = {t1, s, t2};
  const double d = superposition_check(parts, arc, kPlane, m);
  EXPECT_GT(d, 1e-3);
  EXPECT_LT(d, 0.5);
}

TEST(Superposition, EndpointMismatch) {
  const WrenchModel m = WrenchModel::default_ground_truth();
  const PathSpec a{{0, 0, 0}, {Straight{5.0, 0.3}}};
  const PathSpec b{{5.0 + 1e-5, 0, 0}, {Straight{5.0, 0.3}}};
  const PathSpec c{{0, 0, 0}, {Straight{10.0, 0.3}}};
  const std::vector<PathSpec> gap = {a, b};
  ExpectErrorCode([&] { superposition_check(gap, c, kPlane, m); }, ErrorCode::kEndpointMismatch);
  const std::vector<PathSpec> short_parts = {a};
  ExpectErrorCode([&] { superposition_check(short_parts, c, kPlane, m); },
                  ErrorCode::kEndpointMismatch);
  const std::vector<PathSpec> none;
  ExpectErrorCode([&] { superposition_check(none, c, kPlane, m); }, ErrorCode::kInvalidArgument);
}

TEST(Invariants, DissipativeSpeedRescaling) {
  const Terrain grid(Bowl());
  const WrenchModel m = WrenchModel::default_ground_truth();
  const PathSpec slow{{4, 4, 0.3},
                      {Straight{3.0, 0.2}, Arc{2.0, 1.0, 0.2}, TurnInPlace{-0.8, 0.4}}};
  PathSpec fast = slow;
  for (auto& p : fast.primitives) {
    std::visit(
        [](auto& q) {
          using T = std::decay_t<decltype(q)>;
          if constexpr (std::is_same_v<T, TurnInPlace>) q.omega_radps *= 2;
          else q.speed_mps *= 2;
        },
        p);
  }
  // Halving dt with doubled speed keeps the same spatial sample points.
  const double e_slow = energy_of_path(slow, grid, m, 0.01).total_j;
  const double e_fast = energy_of_path(fast, grid, m, 0.005).total_j;
  EXPECT_NEAR(e_fast, e_slow, 1e-9 * e_slow);
}

TEST(Invariants, LiteralSpeedScalingScalesPower) {
  WrenchModel m = WrenchModel::default_ground_truth();
  m.eval_mode = EvalMode::kLiteral;
  const PathSpec p{{4, 4, 0.3}, {Arc{2.0, 1.0, 0.2}}};
  PathSpec q = p;
  std::get<Arc>(q.primitives[0]).speed_mps *= 3;
  // Power triples, duration shrinks by 3: same energy at matched dt.
  const Terrain grid(Bowl());
  const double e1 = energy_of_path(p, grid, m, 0.03).total_j;
  const double e3 = energy_of_path(q, grid, m, 0.01).total_j;
  EXPECT_NEAR(e1, e3, 1e-9 * std::abs(e1));
}

TEST(Invariants, MidpointConvergenceIsSecondOrder) {
  const Terrain grid(Bowl());
  const WrenchModel m = WrenchModel::default_ground_truth();
  const PathSpec p{{3, 3, 0.2}, {Arc{4.0, 1.5, 0.3}, Straight{4.0, 0.3}}};
  const double ref = energy_of_path(p, grid, m, 1e-4).total_j;
  const double e1 = energy_of_path(p, grid, m, 0.4).total_j;
  const double e2 = energy_of_path(p, grid, m, 0.2).total_j;
  const double ratio = (e1 - ref) / (e2 - ref);
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

}  // namespace
}  // namespace slopewise
