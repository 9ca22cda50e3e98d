#include "scenegen/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace scenegen::planner {

namespace {

bool point_free(const Vec2& p, const std::vector<OrientedRect>& obstacles,
                double inflate) {
  for (const auto& r : obstacles)
    if (r.contains(p, inflate)) return false;
  return true;
}

bool segment_free(const Vec2& a, const Vec2& b,
                  const std::vector<OrientedRect>& obstacles, double inflate) {
  for (const auto& r : obstacles)
    if (r.intersects_segment(a, b, inflate)) return false;
  return true;
}

struct Tree {
  std::vector<Vec2> points;
  std::vector<int> parent;

  int nearest(const Vec2& q) const {
    int best = 0;
    double best_d = (points[0] - q).squaredNorm();
    for (int i = 1; i < static_cast<int>(points.size()); ++i) {
      const double d = (points[i] - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  int add(const Vec2& p, int from) {
    points.push_back(p);
    parent.push_back(from);
    return static_cast<int>(points.size()) - 1;
  }

  std::vector<Vec2> path_to_root(int idx) const {
    std::vector<Vec2> out;
    for (int i = idx; i >= 0; i = parent[i]) out.push_back(points[i]);
    return out;
  }
};

Vec2 steer(const Vec2& from, const Vec2& to, double step) {
  const Vec2 d = to - from;
  const double len = d.norm();
  if (len <= step) return to;
  return from + (step / len) * d;
}

// Grows `tree` one step toward q. Returns the new node index or -1.
int extend(Tree* tree, const Vec2& q, const PlanProblem& prob,
           const PlannerParams& params) {
  const int near = tree->nearest(q);
  const Vec2 from = tree->points[near];
  const Vec2 next = steer(from, q, params.step);
  if ((next - from).norm() < 1e-12) return -1;
  if (!segment_free(from, next, prob.obstacles, params.agent_radius))
    return -1;
  return tree->add(next, near);
}

}  // namespace

PlanResult birrt(const PlanProblem& problem, const PlannerParams& params,
                 RandomStream& rng) {
  PlanResult result;
  if (!point_free(problem.start, problem.obstacles, params.agent_radius) ||
      !point_free(problem.goal, problem.obstacles, params.agent_radius)) {
    result.status = PlanStatus::InvalidEndpoint;
    return result;
  }
  if ((problem.start - problem.goal).norm() < 1e-12) {
    result.status = PlanStatus::Found;
    result.trajectory.waypoints = {problem.start};
    return result;
  }

  Tree start_tree;
  start_tree.add(problem.start, -1);
  Tree goal_tree;
  goal_tree.add(problem.goal, -1);
  Tree* a = &start_tree;
  Tree* b = &goal_tree;
  bool a_is_start = true;

  const double w = problem.room.size.x();
  const double l = problem.room.size.y();

  for (int iter = 0; iter < params.max_iters; ++iter) {
    Vec2 target;
    if (rng.uniform() < params.goal_bias) {
      target = b->points[0];
    } else {
      target = Vec2(rng.uniform(0.0, w), rng.uniform(0.0, l));
    }
    const int added = extend(a, target, problem, params);
    if (added >= 0) {
      // Connect: march the other tree toward the new node until blocked.
      const Vec2 q = a->points[added];
      int link = b->nearest(q);
      for (;;) {
        const Vec2 from = b->points[link];
        if ((from - q).norm() < 1e-12) break;
        const Vec2 next = steer(from, q, params.step);
        if (!segment_free(from, next, problem.obstacles, params.agent_radius))
          break;
        link = b->add(next, link);
      }
      if ((b->points[link] - q).norm() < 1e-12) {
        std::vector<Vec2> from_a = a->path_to_root(added);   // q .. a-root
        std::vector<Vec2> from_b = b->path_to_root(link);    // q .. b-root
        std::reverse(from_a.begin(), from_a.end());          // a-root .. q
        // Skip the duplicated connect point.
        from_a.insert(from_a.end(), from_b.begin() + 1, from_b.end());
        if (!a_is_start) std::reverse(from_a.begin(), from_a.end());
        result.status = PlanStatus::Found;
        result.trajectory.waypoints = std::move(from_a);
        return result;
      }
    }
    std::swap(a, b);
    a_is_start = !a_is_start;
  }
  result.status = PlanStatus::NoPath;
  return result;
}

namespace {

void smooth_grid(Grid* grid, double sigma_cells) {
  if (sigma_cells <= 1e-9) return;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_cells)));
  std::vector<double> kernel(2 * radius + 1);
  double ksum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma_cells * sigma_cells));
    ksum += kernel[k + radius];
  }
  for (auto& k : kernel) k /= ksum;
  const int nx = static_cast<int>(grid->rows());
  const int ny = static_cast<int>(grid->cols());
  Grid tmp = Grid::Zero(nx, ny);
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      const double v = (*grid)(ix, iy);
      if (v == 0.0) continue;
      for (int k = -radius; k <= radius; ++k) {
        const int jx = ix + k;
        if (jx >= 0 && jx < nx) tmp(jx, iy) += v * kernel[k + radius];
      }
    }
  grid->setZero();
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      const double v = tmp(ix, iy);
      if (v == 0.0) continue;
      for (int k = -radius; k <= radius; ++k) {
        const int jy = iy + k;
        if (jy >= 0 && jy < ny) (*grid)(ix, jy) += v * kernel[k + radius];
      }
    }
}

// Canonical furniture ranks: stable under permutations of the list.
std::vector<int> canonical_ranks(const std::vector<ObjectInstance>& furniture) {
  std::vector<int> order(furniture.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& fa = furniture[a];
    const auto& fb = furniture[b];
    if (fa.category != fb.category) return fa.category < fb.category;
    if (fa.position.x() != fb.position.x())
      return fa.position.x() < fb.position.x();
    if (fa.position.y() != fb.position.y())
      return fa.position.y() < fb.position.y();
    return fa.yaw < fb.yaw;
  });
  std::vector<int> rank(furniture.size());
  for (int r = 0; r < static_cast<int>(order.size()); ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace

TrajectoryHeatmap activity_heatmap(const SceneLayout& scene,
                                   const PlannerParams& params,
                                   RandomStream& rng) {
  TrajectoryHeatmap hm;
  hm.cell = params.cell;
  const int nx = std::max(
      1, static_cast<int>(std::ceil(scene.room.size.x() / params.cell)));
  const int ny = std::max(
      1, static_cast<int>(std::ceil(scene.room.size.y() / params.cell)));
  hm.grid = Grid::Zero(nx, ny);

  const auto& furniture = scene.furniture;
  const int n = static_cast<int>(furniture.size());
  if (n < 2) {
    hm.empty = true;
    return hm;
  }

  const std::vector<int> rank = canonical_ranks(furniture);
  bool any = false;
  std::vector<char> visited(static_cast<std::size_t>(nx) * ny, 0);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      PlanProblem prob;
      prob.room = scene.room;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;  // endpoints stay reachable
        prob.obstacles.push_back(footprint_rect(furniture[k]));
      }
      prob.start = Vec2(furniture[i].position.x(), furniture[i].position.y());
      prob.goal = Vec2(furniture[j].position.x(), furniture[j].position.y());

      std::ostringstream key;
      key << "plan/" << furniture[i].category << '#' << rank[i] << "->"
          << furniture[j].category << '#' << rank[j];
      RandomStream sub = rng.substream(key.str());
      const PlanResult res = birrt(prob, params, sub);
      if (res.status != PlanStatus::Found) continue;
      any = true;

      // Rasterize: mark every traversed cell once per trajectory.
      std::fill(visited.begin(), visited.end(), 0);
      const auto& wp = res.trajectory.waypoints;
      auto mark = [&](const Vec2& p) {
        const int cx = std::clamp(
            static_cast<int>(std::floor(p.x() / params.cell)), 0, nx - 1);
        const int cy = std::clamp(
            static_cast<int>(std::floor(p.y() / params.cell)), 0, ny - 1);
        visited[static_cast<std::size_t>(cx) * ny + cy] = 1;
      };
      const double ds = params.cell / 4.0;
      for (std::size_t s = 0; s + 1 < wp.size(); ++s) {
        const Vec2 a = wp[s];
        const Vec2 b = wp[s + 1];
        const double len = (b - a).norm();
        const int steps = std::max(1, static_cast<int>(std::ceil(len / ds)));
        for (int t = 0; t <= steps; ++t)
          mark(a + (static_cast<double>(t) / steps) * (b - a));
      }
      if (wp.size() == 1) mark(wp[0]);
      for (int cx = 0; cx < nx; ++cx)
        for (int cy = 0; cy < ny; ++cy)
          if (visited[static_cast<std::size_t>(cx) * ny + cy])
            hm.grid(cx, cy) += 1.0;
    }
  }

  if (!any) {
    hm.empty = true;
    hm.grid.setZero();
    return hm;
  }
  smooth_grid(&hm.grid, params.smoothing_sigma / params.cell);
  hm.grid /= hm.grid.sum();
  hm.empty = false;
  return hm;
}

double heatmap_entropy(const TrajectoryHeatmap& hm) {
  if (hm.empty) return 0.0;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(hm.grid.size()));
  for (Eigen::Index i = 0; i < hm.grid.size(); ++i) {
    const double p = hm.grid.data()[i];
    if (p > 0.0) terms.push_back(-p * std::log(p));
  }
  return stable_sum(terms);
}

double l_ent(const TrajectoryHeatmap& hm) { return -heatmap_entropy(hm); }

}  // namespace scenegen::planner
