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

#ifndef SLOPEWISE_PLANNER_HPP_
#define SLOPEWISE_PLANNER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

#include "slopewise/error.hpp"
#include "slopewise/path_energy.hpp"
#include "slopewise/se2.hpp"
#include "slopewise/terrain.hpp"
#include "slopewise/wrench_model.hpp"

namespace slopewise {

enum class EdgeCostMode {
  kMidpoint,    // model power at the edge midpoint times duration
  kIntegrated,  // energy_of_path on the edge primitive with config dt
};

struct LatticeConfig {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size_m = 1.0;
  std::size_t cols = 1;
  std::size_t rows = 1;
  std::size_t headings = 16;
  double speed_mps = 0.3;
  double turn_omega_radps = 0.5;
  bool allow_lateral = false;
  /// Forward/lateral edges whose midpoint slope exceeds this are not traversable.
  double max_alpha = kPi / 2;
  EdgeCostMode edge_cost = EdgeCostMode::kMidpoint;
  double dt = kDefaultDt;

  void validate() const {
    if (!(cell_size_m > 0.0)) throw Error(ErrorCode::kInvalidArgument, "cell_size must be > 0");
    if (cols < 1 || rows < 1) throw Error(ErrorCode::kInvalidArgument, "empty lattice");
    if (headings < 4 || headings % 4 != 0) {
      throw Error(ErrorCode::kInvalidArgument, "headings must be a multiple of 4 and >= 4");
    }
    if (!(speed_mps > 0.0) || !(turn_omega_radps > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "speeds must be > 0");
    }
    if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be > 0");
  }
};

/// Lattice covering a heightmap's nodes one to one.
inline LatticeConfig lattice_for(const GridHeightmap& grid) {
  LatticeConfig c;
  c.origin_x = grid.origin_x();
  c.origin_y = grid.origin_y();
  c.cell_size_m = grid.cell_size();
  c.cols = grid.cols();
  c.rows = grid.rows();
  return c;
}

struct LatticeState {
  std::size_t col = 0;
  std::size_t row = 0;
  std::size_t heading = 0;
  auto operator<=>(const LatticeState&) const = default;
};

struct LatticeEdge {
  std::size_t to = 0;
  double cost = 0.0;
  bool is_turn = false;
  Primitive primitive;
};

/**
 * Implicit (cell, heading) state lattice with forward steps, optional
 * lateral steps and +/-1 heading turns in place.
 *
 * Heading k points along the integer offset closest to 2*pi*k/H (ties go to
 * the shorter offset); its yaw is the exact direction of that offset, so
 * forward steps are pure body-x motion.
 *
 * Integrated edge costs are cached on first use, so a Lattice must not be
 * shared across threads in that mode.
 */
class Lattice {
 public:
  Lattice(const Terrain& terrain, const WrenchModel& model, LatticeConfig config)
      : terrain_(&terrain), model_(&model), cfg_(config) {
    cfg_.validate();
    build_headings();
    const Bounds b = terrain.bounds();
    const double x1 = cfg_.origin_x + cfg_.cell_size_m * static_cast<double>(cfg_.cols - 1);
    const double y1 = cfg_.origin_y + cfg_.cell_size_m * static_cast<double>(cfg_.rows - 1);
    if (!b.contains(cfg_.origin_x, cfg_.origin_y) || !b.contains(x1, y1)) {
      throw Error(ErrorCode::kOutOfBounds, "lattice extends beyond the terrain");
    }
  }

  const LatticeConfig& config() const { return cfg_; }
  std::size_t node_count() const { return cfg_.cols * cfg_.rows * cfg_.headings; }

  std::size_t index(const LatticeState& s) const {
    return (s.row * cfg_.cols + s.col) * cfg_.headings + s.heading;
  }
  LatticeState state(std::size_t idx) const {
    const std::size_t h = idx % cfg_.headings;
    const std::size_t cell = idx / cfg_.headings;
    return {cell % cfg_.cols, cell / cfg_.cols, h};
  }
  bool in_grid(long long col, long long row) const {
    return col >= 0 && row >= 0 && col < static_cast<long long>(cfg_.cols) &&
           row < static_cast<long long>(cfg_.rows);
  }

  double heading_yaw(std::size_t k) const { return yaw_[k]; }
  std::pair<int, int> heading_offset(std::size_t k) const { return offset_[k]; }

  Pose pose_of(const LatticeState& s) const {
    return {cfg_.origin_x + cfg_.cell_size_m * static_cast<double>(s.col),
            cfg_.origin_y + cfg_.cell_size_m * static_cast<double>(s.row), yaw_[s.heading]};
  }

  /// Outgoing edges in a fixed order: forward, lateral left/right, turn +1, turn -1.
  std::vector<LatticeEdge> successors(std::size_t idx) const {
    std::vector<LatticeEdge> out;
    const LatticeState s = state(idx);
    const Pose p = pose_of(s);
    const std::size_t h = cfg_.headings;

    auto add_step = [&](std::size_t slot, std::pair<int, int> d, MotionAxis axis, bool reverse) {
      const long long c = static_cast<long long>(s.col) + d.first;
      const long long r = static_cast<long long>(s.row) + d.second;
      if (!in_grid(c, r)) return;
      const double len = cfg_.cell_size_m * std::hypot(d.first, d.second);
      const Pose mid{p.x + 0.5 * cfg_.cell_size_m * d.first,
                     p.y + 0.5 * cfg_.cell_size_m * d.second, p.yaw};
      if (terrain_->local_slope(mid.x, mid.y).alpha > cfg_.max_alpha) return;
      const Primitive prim = Straight{len, cfg_.speed_mps, axis, reverse};
      out.push_back({index({static_cast<std::size_t>(c), static_cast<std::size_t>(r), s.heading}),
                     edge_cost(idx, slot, p, mid, prim), false, prim});
    };
    add_step(0, offset_[s.heading], MotionAxis::kForward, false);
    if (cfg_.allow_lateral) {
      const auto left = offset_[(s.heading + h / 4) % h];
      add_step(1, left, MotionAxis::kLateral, false);
      add_step(2, {-left.first, -left.second}, MotionAxis::kLateral, true);
    }
    for (int dir : {+1, -1}) {
      const std::size_t slot = dir > 0 ? 3 : 4;
      const std::size_t k = dir > 0 ? (s.heading + 1) % h : (s.heading + h - 1) % h;
      const double dyaw = normalize_angle(yaw_[k] - yaw_[s.heading]);
      const Primitive prim = TurnInPlace{dyaw, cfg_.turn_omega_radps};
      const Pose mid{p.x, p.y, normalize_angle(p.yaw + 0.5 * dyaw)};
      out.push_back({index({s.col, s.row, k}), edge_cost(idx, slot, p, mid, prim), true, prim});
    }
    return out;
  }

  /// Lower bound on cost per meter of translation anywhere on the lattice.
  double min_cost_per_meter() const {
    // Integrated edges sample slopes away from the midpoint, past max_alpha.
    double alpha_max = cfg_.edge_cost == EdgeCostMode::kMidpoint ? cfg_.max_alpha : kPi / 2;
    if (const auto* pl = terrain_->as_plane()) {
      alpha_max = std::min(alpha_max, pl->alpha);
    } else {
      // Interpolated gradients are convex combinations of node gradients.
      const auto* g = terrain_->as_grid();
      double gmax = 0.0;
      for (std::size_t r = 0; r < g->rows(); ++r) {
        for (std::size_t c = 0; c < g->cols(); ++c) {
          const auto gr = g->gradient(g->origin_x() + g->cell_size() * static_cast<double>(c),
                                      g->origin_y() + g->cell_size() * static_cast<double>(r));
          gmax = std::max(gmax, std::hypot(gr[0], gr[1]));
        }
      }
      alpha_max = std::min(alpha_max, std::atan(gmax));
    }
    auto axis_min = [&](Component c) {
      const auto range = model_->component_range(c, alpha_max);
      if (model_->eval_mode == EvalMode::kDissipative) return range[0];
      return std::min(range[0], -range[1]);
    };
    double k = axis_min(Component::kFx);
    if (cfg_.allow_lateral) k = std::min(k, axis_min(Component::kFy));
    return std::max(0.0, k + model_->idle_power_w / cfg_.speed_mps);
  }

 private:
  void build_headings() {
    const std::size_t h = cfg_.headings;
    const std::size_t quarter = h / 4;
    offset_.resize(h);
    yaw_.resize(h);
    for (std::size_t k = 0; k < quarter; ++k) {
      const double target = kTwoPi * static_cast<double>(k) / static_cast<double>(h);
      std::pair<int, int> best{1, 0};
      double best_err = std::numeric_limits<double>::infinity();
      double best_len = 0.0;
      for (int dx = 0; dx <= 3; ++dx) {
        for (int dy = 0; dy <= 3; ++dy) {
          if (dx == 0 && dy == 0) continue;
          const double err = std::abs(std::atan2(dy, dx) - target);
          const double len = std::hypot(dx, dy);
          if (err < best_err - 1e-9 || (std::abs(err - best_err) <= 1e-9 && len < best_len)) {
            best = {dx, dy};
            best_err = err;
            best_len = len;
          }
        }
      }
      // Rotate the first quadrant by multiples of 90 degrees.
      std::pair<int, int> d = best;
      for (std::size_t q = 0; q < 4; ++q) {
        offset_[k + q * quarter] = d;
        d = {-d.second, d.first};
      }
    }
    for (std::size_t k = 0; k < h; ++k) {
      yaw_[k] = std::atan2(offset_[k].second, offset_[k].first);
      for (std::size_t j = 0; j < k; ++j) {
        if (offset_[j] == offset_[k]) {
          throw Error(ErrorCode::kInvalidArgument, "heading count too fine for the offset set");
        }
      }
    }
  }

  static constexpr std::size_t kEdgeSlots = 5;

  // Integrated costs are memoized per (node, slot); midpoint costs are cheap.
  double edge_cost(std::size_t node, std::size_t slot, const Pose& from, const Pose& mid,
                   const Primitive& prim) const {
    double cost = 0.0;
    if (cfg_.edge_cost == EdgeCostMode::kIntegrated) {
      if (cache_.empty()) {
        cache_.assign(node_count() * kEdgeSlots, std::numeric_limits<double>::quiet_NaN());
      }
      double& cached = cache_[node * kEdgeSlots + slot];
      if (std::isnan(cached)) {
        cached = energy_of_path({from, {prim}}, *terrain_, *model_, cfg_.dt).total_j;
      }
      cost = cached;
    } else {
      const SlopeFrame frame = terrain_->frame_at(mid);
      cost = model_->power(frame, primitive_twist(prim)) * primitive_duration(prim);
    }
    if (!(cost >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "negative or non-finite edge cost; the planner needs non-negative costs");
    }
    return cost;
  }

  const Terrain* terrain_;
  const WrenchModel* model_;
  LatticeConfig cfg_;
  std::vector<std::pair<int, int>> offset_;
  std::vector<double> yaw_;
  mutable std::vector<double> cache_;
};

inline Lattice build_lattice(const Terrain& terrain, const WrenchModel& model,
                             const LatticeConfig& config) {
  return Lattice(terrain, model, config);
}

struct PlanQuery {
  LatticeState start;
  std::size_t goal_col = 0;
  std::size_t goal_row = 0;
};

struct PlanOptions {
  /// Recompute exact cost-to-go and count expanded nodes where h exceeds it.
  bool audit = false;
};

struct PlanResult {
  PathSpec path;
  double energy_j = 0.0;
  std::size_t expanded_nodes = 0;
  double runtime_ms = 0.0;
  std::size_t heading_changes = 0;
  std::vector<std::size_t> nodes;
  bool audited = false;
  std::size_t heuristic_violations = 0;
};

namespace detail {

// Exact cost-to-go to any goal-cell node, by Dijkstra on reversed edges.
inline std::vector<double> cost_to_go(const Lattice& lat, std::size_t goal_col,
                                      std::size_t goal_row) {
  const std::size_t n = lat.node_count();
  std::vector<std::vector<std::pair<std::size_t, double>>> rev(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : lat.successors(i)) rev[e.to].emplace_back(i, e.cost);
  }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (std::size_t k = 0; k < lat.config().headings; ++k) {
    const std::size_t g = lat.index({goal_col, goal_row, k});
    dist[g] = 0.0;
    pq.emplace(0.0, g);
  }
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (auto [v, c] : rev[u]) {
      if (d + c < dist[v]) {
        dist[v] = d + c;
        pq.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

}  // namespace detail

/**
 * A* over the lattice with h = euclidean distance x lower-bound cost per
 * meter. Equal-energy ties prefer fewer heading changes, then lower node
 * index, so results are deterministic.
 */
inline PlanResult plan(const Lattice& lat, const PlanQuery& q, const PlanOptions& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& cfg = lat.config();
  if (q.start.col >= cfg.cols || q.start.row >= cfg.rows || q.start.heading >= cfg.headings) {
    throw Error(ErrorCode::kOutOfBounds, "start outside lattice");
  }
  if (q.goal_col >= cfg.cols || q.goal_row >= cfg.rows) {
    throw Error(ErrorCode::kOutOfBounds, "goal outside lattice");
  }
  PlanResult res;
  const std::size_t start = lat.index(q.start);
  res.path.start = lat.pose_of(q.start);
  res.nodes.push_back(start);
  if (q.start.col == q.goal_col && q.start.row == q.goal_row) {
    res.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  const double k = lat.min_cost_per_meter();
  const Pose goal_pose = lat.pose_of({q.goal_col, q.goal_row, 0});
  auto heuristic = [&](std::size_t idx) {
    const Pose p = lat.pose_of(lat.state(idx));
    return k * std::hypot(p.x - goal_pose.x, p.y - goal_pose.y);
  };

  const std::size_t n = lat.node_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g(n, kInf);
  std::vector<std::size_t> turns(n, 0);
  std::vector<std::size_t> parent(n, n);
  std::vector<Primitive> via(n);
  std::vector<bool> closed(n, false);
  std::vector<std::size_t> expanded;

  using Key = std::tuple<double, std::size_t, std::size_t>;  // f, turns, node
  std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
  g[start] = 0.0;
  open.emplace(heuristic(start), 0, start);
  std::size_t goal = n;
  while (!open.empty()) {
    const auto [f, t, u] = open.top();
    open.pop();
    if (closed[u]) continue;
    closed[u] = true;
    expanded.push_back(u);
    const LatticeState su = lat.state(u);
    if (su.col == q.goal_col && su.row == q.goal_row) {
      goal = u;
      break;
    }
    for (const auto& e : lat.successors(u)) {
      if (closed[e.to]) continue;
      const double ng = g[u] + e.cost;
      const std::size_t nt = turns[u] + (e.is_turn ? 1 : 0);
      const bool better = ng < g[e.to] || (ng == g[e.to] && nt < turns[e.to]) ||
                          (ng == g[e.to] && nt == turns[e.to] && u < parent[e.to]);
      if (!better) continue;
      g[e.to] = ng;
      turns[e.to] = nt;
      parent[e.to] = u;
      via[e.to] = e.primitive;
      open.emplace(ng + heuristic(e.to), nt, e.to);
    }
  }
  if (goal == n) throw Error(ErrorCode::kNoPath, "goal cell unreachable");

  std::vector<std::size_t> chain;
  for (std::size_t v = goal; v != start; v = parent[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());
  for (std::size_t v : chain) {
    res.nodes.push_back(v);
    res.path.primitives.push_back(via[v]);
  }
  res.energy_j = g[goal];
  res.heading_changes = turns[goal];
  res.expanded_nodes = expanded.size();

  if (opts.audit) {
    res.audited = true;
    const auto h_true = detail::cost_to_go(lat, q.goal_col, q.goal_row);
    for (std::size_t v : expanded) {
      if (heuristic(v) > h_true[v] * (1.0 + 1e-12) + 1e-12) ++res.heuristic_violations;
    }
  }
  res.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace slopewise

#endif  // SLOPEWISE_PLANNER_HPP_
