#pragma once

#include <cstdint>
#include <vector>

#include "scenegen/rng.hpp"
#include "scenegen/scene.hpp"

namespace scenegen::planner {

struct PlannerParams {
  double step = 0.2;          // tree extension step, meters
  double goal_bias = 0.1;     // probability of steering at the other root
  int max_iters = 5000;       // extension attempts per plan
  double agent_radius = 0.25; // obstacle inflation, meters
  double cell = 0.2;          // heatmap cell size, meters
  double smoothing_sigma = 0.2;  // heatmap smoothing, meters
};

struct PlanProblem {
  Room room;
  std::vector<OrientedRect> obstacles;  // inflated by agent radius at query
  Vec2 start = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
};

struct Trajectory {
  std::vector<Vec2> waypoints;
};

enum class PlanStatus { Found, NoPath, InvalidEndpoint };

struct PlanResult {
  PlanStatus status = PlanStatus::NoPath;
  Trajectory trajectory;
};

// Bi-directional RRT (connect variant). Waypoint spacing never exceeds the
// step size and every returned segment clears the inflated obstacles.
PlanResult birrt(const PlanProblem& problem, const PlannerParams& params,
                 RandomStream& rng);

// Normalized occupancy of planned trajectories over the room floor. The
// all-zero flag marks scenes where no trajectory exists (under two pieces
// of furniture, or all plans failed).
struct TrajectoryHeatmap {
  Grid grid;          // (nx, ny), cell probabilities
  double cell = 0.2;  // meters per cell
  bool empty = true;
};

// Plans between the centers of every ordered pair of distinct furniture
// pieces (each pair's own footprints removed from the obstacle set) and
// accumulates the traversed cells. Per-pair substreams are derived from
// the stream's seed and a canonical instance key, so the result does not
// depend on furniture order.
TrajectoryHeatmap activity_heatmap(const SceneLayout& scene,
                                   const PlannerParams& params,
                                   RandomStream& rng);

// Shannon entropy of the cell distribution (natural log); 0 when empty.
double heatmap_entropy(const TrajectoryHeatmap& hm);

// Negative entropy: low when trajectories spread over the room.
double l_ent(const TrajectoryHeatmap& hm);

}  // namespace scenegen::planner
