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

#include "slopewise/planner.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "slopewise/synthbench.hpp"
#include "test_util.hpp"

namespace slopewise {
namespace {

using testing::ExpectErrorCode;
using testing::ExpectPoseNear;

WrenchModel Isotropic(double fx) {
  WrenchModel m;
  m.coeff(Component::kFx) = {fx, 0, 0, 0};
  m.coeff(Component::kFy) = {fx, 0, 0, 0};
  m.coeff(Component::kTau) = {2.0, 0, 0, 0};
  return m;
}

LatticeConfig Config(std::size_t cols, std::size_t rows, double cell = 1.0) {
  LatticeConfig c;
  c.cols = cols;
  c.rows = rows;
  c.cell_size_m = cell;
  return c;
}

// Plain uniform-cost search on a std::set frontier, to any node in the goal cell.
double UcsOracle(const Lattice& lat, const PlanQuery& q) {
  const std::size_t n = lat.node_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::set<std::pair<double, std::size_t>> frontier;
  const std::size_t s = lat.index(q.start);
  dist[s] = 0.0;
  frontier.insert({0.0, s});
  while (!frontier.empty()) {
    const auto [d, u] = *frontier.begin();
    frontier.erase(frontier.begin());
    const LatticeState st = lat.state(u);
    if (st.col == q.goal_col && st.row == q.goal_row) return d;
    for (const auto& e : lat.successors(u)) {
      if (d + e.cost < dist[e.to]) {
        frontier.erase({dist[e.to], e.to});
        dist[e.to] = d + e.cost;
        frontier.insert({dist[e.to], e.to});
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

GridHeightmap RandomHills(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  std::vector<double> h;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      const double x = static_cast<double>(k), y = static_cast<double>(r);
      h.push_back(0.4 * a * std::sin(0.3 * x + b) + 0.4 * c * std::cos(0.25 * y + d) +
                  0.02 * a * x - 0.03 * c * y);
    }
  }
  return GridHeightmap(0, 0, 1.0, rows, cols, std::move(h));
}

TEST(Lattice, HeadingOffsets) {
  const Terrain t = Terrain::plane(0.0, 0.0);
  const WrenchModel m = Isotropic(10);
  const Lattice lat(t, m, Config(3, 3));
  EXPECT_EQ(lat.heading_offset(0), (std::pair<int, int>{1, 0}));
  EXPECT_EQ(lat.heading_offset(1), (std::pair<int, int>{2, 1}));
  EXPECT_EQ(lat.heading_offset(2), (std::pair<int, int>{1, 1}));
  EXPECT_EQ(lat.heading_offset(3), (std::pair<int, int>{1, 2}));
  EXPECT_EQ(lat.heading_offset(4), (std::pair<int, int>{0, 1}));
  EXPECT_EQ(lat.heading_offset(9), (std::pair<int, int>{-2, -1}));
  EXPECT_NEAR(lat.heading_yaw(1), std::atan2(1.0, 2.0), 1e-15);
  LatticeConfig c32 = Config(3, 3);
  c32.headings = 32;
  EXPECT_NO_THROW(Lattice(t, m, c32));
  LatticeConfig c64 = c32;
  c64.headings = 64;
  ExpectErrorCode([&] { Lattice(t, m, c64); }, ErrorCode::kInvalidArgument);
  LatticeConfig c6 = c32;
  c6.headings = 6;
  ExpectErrorCode([&] { Lattice(t, m, c6); }, ErrorCode::kInvalidArgument);
}

TEST(Lattice, SingleCellHasOnlyTurns) {
  const Terrain t = Terrain::plane(0.1, 0.0);
  const WrenchModel m = Isotropic(10);
  const Lattice lat(t, m, Config(1, 1));
  EXPECT_EQ(lat.node_count(), 16u);
  for (std::size_t i = 0; i < lat.node_count(); ++i) {
    const auto edges = lat.successors(i);
    ASSERT_EQ(edges.size(), 2u);
    for (const auto& e : edges) EXPECT_TRUE(e.is_turn);
  }
}

TEST(Lattice, FlatIsotropicEqualLengthEdgesEqualCost) {
  const Terrain t = Terrain::plane(0.0, 0.0);
  const WrenchModel m = Isotropic(25);
  const Lattice lat(t, m, Config(3, 3));
  const std::size_t centre = lat.index({1, 1, 0});
  std::vector<double> axis_costs, diag_costs;
  for (std::size_t h : {0u, 4u, 8u, 12u}) {
    axis_costs.push_back(lat.successors(lat.index({1, 1, h}))[0].cost);
  }
  for (std::size_t h : {2u, 6u, 10u, 14u}) {
    diag_costs.push_back(lat.successors(lat.index({1, 1, h}))[0].cost);
  }
  for (double c : axis_costs) EXPECT_DOUBLE_EQ(c, 25.0);
  for (double c : diag_costs) EXPECT_DOUBLE_EQ(c, 25.0 * std::sqrt(2.0));
  EXPECT_EQ(lat.successors(centre).size(), 3u);
}

TEST(Lattice, SlopeEdgeCostMatchesDirectEvaluation) {
  const double alpha = deg2rad(15);
  const Terrain t = Terrain::plane(alpha, 0.0);
  const WrenchModel m = WrenchModel::default_ground_truth();
  const Lattice lat(t, m, Config(5, 5));
  const auto up = lat.successors(lat.index({2, 2, 0}))[0];
  const auto across = lat.successors(lat.index({2, 2, 4}))[0];
  const CostMap map = export_cost_map(m, {alpha}, {0.0, 3 * kPi / 2}, MotionAxis::kForward);
  EXPECT_NEAR(up.cost, map.at(0, 0) * 1.0, 1e-12);
  EXPECT_NEAR(across.cost, map.at(0, 1) * 1.0, 1e-12);
  EXPECT_GT(up.cost, across.cost);
}

TEST(Lattice, TurnCostIsTorqueTimesAngle) {
  const Terrain t = Terrain::plane(deg2rad(10), 0.0);
  const WrenchModel m = WrenchModel::default_ground_truth();
  const Lattice lat(t, m, Config(2, 2));
  const auto edges = lat.successors(lat.index({0, 0, 0}));
  const double tau = m.evaluate({deg2rad(10), 0.0}).tau;
  EXPECT_NEAR(edges[1].cost, tau * std::atan2(1.0, 2.0), 1e-12);
  EXPECT_EQ(lat.state(edges[1].to).heading, 1u);
  EXPECT_EQ(lat.state(edges[2].to).heading, 15u);
}

TEST(Lattice, LateralMovesBehindFlag) {
  const Terrain t = Terrain::plane(0.0, 0.0);
  const WrenchModel m = Isotropic(10);
  LatticeConfig c = Config(3, 3);
  c.allow_lateral = true;
  const Lattice lat(t, m, c);
  const auto edges = lat.successors(lat.index({1, 1, 0}));
  ASSERT_EQ(edges.size(), 5u);
  EXPECT_EQ(lat.state(edges[1].to).row, 2u);
  EXPECT_EQ(lat.state(edges[2].to).row, 0u);
  EXPECT_EQ(std::get<Straight>(edges[2].primitive).axis, MotionAxis::kLateral);
  EXPECT_TRUE(std::get<Straight>(edges[2].primitive).reverse);
}

TEST(Lattice, NegativeCostRejected) {
  const Terrain t = Terrain::plane(deg2rad(20), 0.0);
  WrenchModel m;
  m.coeff(Component::kFx) = {10.0, 0.0, 120.0, 0.0};
  const Lattice lat(t, m, Config(3, 3));
  ExpectErrorCode([&] { lat.successors(lat.index({1, 1, 8})); }, ErrorCode::kInvalidArgument);
}

TEST(Plan, StartEqualsGoal) {
  const Terrain t = Terrain::plane(0.0, 0.0);
  const WrenchModel m = Isotropic(10);
  const Lattice lat(t, m, Config(4, 4));
  const auto r = plan(lat, {{2, 1, 3}, 2, 1});
  EXPECT_TRUE(r.path.primitives.empty());
  EXPECT_EQ(r.energy_j, 0.0);
}

TEST(Plan, FlatStraightLine) {
  const Terrain t = Terrain::plane(0.0, 0.0);
  const WrenchModel m = Isotropic(10);
  const Lattice lat(t, m, Config(8, 3, 0.5));
  const auto r = plan(lat, {{0, 1, 0}, 7, 1});
  EXPECT_NEAR(r.energy_j, 10.0 * 3.5, 1e-12);
  EXPECT_EQ(r.heading_changes, 0u);
  EXPECT_EQ(r.path.primitives.size(), 7u);
  ExpectPoseNear(end_pose(r.path), {3.5, 0.5, 0.0}, 1e-12);
}

TEST(Plan, MatchesUniformCostOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(2, 12);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t cols = dim(rng), rows = dim(rng);
    const Terrain t(RandomHills(rng, rows, cols));
    WrenchModel m = WrenchModel::default_ground_truth();
    m.idle_power_w = 2.0;
    LatticeConfig c = lattice_for(*t.as_grid());
    c.allow_lateral = trial % 2 == 0;
    const Lattice lat(t, m, c);
    std::uniform_int_distribution<std::size_t> uc(0, cols - 1), ur(0, rows - 1), uh(0, 15);
    const PlanQuery q{{uc(rng), ur(rng), uh(rng)}, uc(rng), ur(rng)};
    const auto r = plan(lat, q, {.audit = true});
    const double oracle = UcsOracle(lat, q);
    EXPECT_NEAR(r.energy_j, oracle, 1e-9 * std::max(1.0, oracle));
    EXPECT_EQ(r.heuristic_violations, 0u);
  }
}

TEST(Plan, SwitchbackBeatsDirectClimb) {
  const Terrain t = Terrain::plane(deg2rad(15), kPi / 2);
  const WrenchModel m = switchback_model();
  const Lattice lat(t, m, Config(9, 13));
  const PlanQuery q{{4, 0, 4}, 4, 12};
  const auto r = plan(lat, q);
  const PathSpec direct{lat.pose_of(q.start), {Straight{12.0, 0.3}}};
  const double e_direct = energy_of_path(direct, t, m).total_j;
  EXPECT_LT(r.energy_j, e_direct);
  EXPECT_GE(r.heading_changes, 2u);
  EXPECT_NEAR(r.energy_j, UcsOracle(lat, q), 1e-9 * r.energy_j);
  const auto re = energy_of_path(r.path, t, m);
  EXPECT_NEAR(re.total_j, r.energy_j, 1e-6 * r.energy_j);
  const Pose end = end_pose(r.path);
  EXPECT_NEAR(end.x, 4.0, 1e-9);
  EXPECT_NEAR(end.y, 12.0, 1e-9);
}

TEST(Plan, IntegratedEdgesMatchPathEnergyOnHeightmap) {
  std::mt19937_64 rng(5);
  const Terrain t(RandomHills(rng, 10, 10));
  const WrenchModel m = WrenchModel::default_ground_truth();
  LatticeConfig c = lattice_for(*t.as_grid());
  c.edge_cost = EdgeCostMode::kIntegrated;
  const Lattice lat(t, m, c);
  const auto r = plan(lat, {{0, 0, 0}, 9, 7}, {.audit = true});
  EXPECT_EQ(r.heuristic_violations, 0u);
  const double re = energy_of_path(r.path, t, m, c.dt).total_j;
  EXPECT_NEAR(re, r.energy_j, 1e-9 * r.energy_j);
}

TEST(Lattice, CachedIntegratedEdgesMatchFreshEvaluation) {
  std::mt19937_64 rng(6);
  const Terrain t(RandomHills(rng, 6, 6));
  const WrenchModel m = WrenchModel::default_ground_truth();
  LatticeConfig c = lattice_for(*t.as_grid());
  c.edge_cost = EdgeCostMode::kIntegrated;
  c.allow_lateral = true;
  const Lattice lat(t, m, c);
  const std::size_t node = lat.index({2, 3, 5});
  const auto first = lat.successors(node);
  const auto second = lat.successors(node);
  ASSERT_EQ(first.size(), second.size());
  const Pose from = lat.pose_of(lat.state(node));
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].cost, second[i].cost);
    EXPECT_EQ(first[i].cost, energy_of_path({from, {first[i].primitive}}, t, m, c.dt).total_j);
  }
}

TEST(Plan, Deterministic) {
  std::mt19937_64 rng(8);
  const Terrain t(RandomHills(rng, 12, 12));
  const WrenchModel m = WrenchModel::default_ground_truth();
  const Lattice lat(t, m, lattice_for(*t.as_grid()));
  const auto a = plan(lat, {{1, 2, 3}, 10, 9});
  const auto b = plan(lat, {{1, 2, 3}, 10, 9});
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.energy_j, b.energy_j);
}

TEST(Plan, FlatTieBreakPrefersFewerTurns) {
  const Terrain t = Terrain::plane(0.0, 0.0);
  WrenchModel m = Isotropic(10);
  m.coeff(Component::kTau) = {0.0, 0, 0, 0};
  const Lattice lat(t, m, Config(5, 5));
  const auto r = plan(lat, {{0, 0, 0}, 4, 0});
  EXPECT_EQ(r.heading_changes, 0u);
}

TEST(Plan, NoPathBehindSteepWall) {
  std::vector<double> h;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 7; ++c) h.push_back(c >= 3 ? 3.0 : 0.0);
  }
  const Terrain t(GridHeightmap(0, 0, 1.0, 5, 7, std::move(h)));
  const WrenchModel m = Isotropic(10);
  LatticeConfig c = lattice_for(*t.as_grid());
  c.max_alpha = deg2rad(30);
  const Lattice lat(t, m, c);
  ExpectErrorCode([&] { plan(lat, {{0, 2, 0}, 6, 2}); }, ErrorCode::kNoPath);
  ExpectErrorCode([&] { plan(lat, {{0, 9, 0}, 6, 2}); }, ErrorCode::kOutOfBounds);
}

TEST(Lattice, MustFitInsideTerrain) {
  const Terrain t(GridHeightmap(0, 0, 1.0, 3, 3, std::vector<double>(9, 0.0)));
  ExpectErrorCode([&] { Lattice(t, Isotropic(1), Config(4, 3)); }, ErrorCode::kOutOfBounds);
}

}  // namespace
}  // namespace slopewise
