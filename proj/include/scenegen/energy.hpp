#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scenegen/model.hpp"
#include "scenegen/planner.hpp"

namespace scenegen::energy {

// Contextual loss features in the fixed slot order matching Weights.
struct LossVector {
  Eigen::Matrix<double, 8, 1> v = Eigen::Matrix<double, 8, 1>::Zero();

  double& f_col() { return v[0]; }
  double& f_ent() { return v[1]; }
  double& o_hum() { return v[2]; }
  double& o_add() { return v[3]; }
  double& g_hum() { return v[4]; }
  double& g_add() { return v[5]; }
  double& r_dis() { return v[6]; }
  double& r_ori() { return v[7]; }
  double f_col() const { return v[0]; }
  double f_ent() const { return v[1]; }
  double o_hum() const { return v[2]; }
  double o_add() const { return v[3]; }
  double g_hum() const { return v[4]; }
  double g_add() const { return v[5]; }
  double r_dis() const { return v[6]; }
  double r_ori() const { return v[7]; }
};

struct EnergyOptions {
  double eps_p = 1e-6;    // floor probability for unseen discrete choices
  double eps_aff = 1e-6;  // affordance density floor
  // Default: l_hum = -log(max_i p + eps_aff). When true, use the raw
  // probability as the cost instead.
  bool hum_literal = false;
};

// Support clique (furniture, address, object) and group clique
// (core, address, associated); the address lives on the pointing instance.
struct SupportClique {
  int furniture = -1;  // index into scene.furniture
  int object = -1;     // index into scene.supported_objects
};

struct GroupClique {
  int core = -1;        // index into scene.furniture (pointed-to)
  int associated = -1;  // index into scene.furniture (owner of the address)
};

struct CliqueSet {
  std::vector<int> furniture;       // C_f: all furniture indices
  std::vector<SupportClique> support;
  std::vector<GroupClique> group;
  std::vector<int> room;            // C_r: furniture indices
};

CliqueSet build_cliques(const SceneLayout& scene);

// Owns the trajectory heatmap between recomputations. One chain, one cache.
struct HeatmapCachePolicy {
  enum class Mode { Exact, Interval, Disabled };
  Mode mode = Mode::Interval;
  double displacement_threshold = 0.25;  // accumulated furniture motion, m
  int accept_interval = 10;              // accepted moves between refreshes
};

class HeatmapCache {
 public:
  HeatmapCache() = default;
  HeatmapCache(HeatmapCachePolicy policy, planner::PlannerParams params,
               std::uint64_t seed);

  // Heatmap to use for this evaluation. Exact mode recomputes every call;
  // Interval mode computes on first use and after refresh(); Disabled mode
  // returns a flagged-empty map.
  const planner::TrajectoryHeatmap& current(const SceneLayout& scene);

  // Bookkeeping after an accepted move.
  void note_accept(double furniture_displacement);
  bool refresh_due() const;
  void refresh(const SceneLayout& scene);
  void invalidate();

  const HeatmapCachePolicy& policy() const { return policy_; }

 private:
  void recompute(const SceneLayout& scene);

  HeatmapCachePolicy policy_;
  planner::PlannerParams params_;
  std::uint64_t seed_ = 0;
  planner::TrajectoryHeatmap heatmap_;
  bool have_ = false;
  double accumulated_displacement_ = 0.0;
  int accepted_since_ = 0;
};

// Contextual loss features l(E_pt). Requires distributions for every
// category present in the scene; throws Error naming any missing one.
LossVector loss_features(const SceneLayout& scene, const LearnedModel& model,
                         HeatmapCache& cache, const EnergyOptions& opts = {});

// Parse-tree energy: Or choices, Set branch counts, and size densities for
// every terminal including the room.
double tree_energy(const SceneLayout& scene, const LearnedModel& model,
                   const EnergyOptions& opts = {});

// tree_energy + dot(lambda, loss_features). The Gibbs normalizer cancels
// everywhere this value is used, so it is never computed.
double total_energy(const SceneLayout& scene, const LearnedModel& model,
                    HeatmapCache& cache, const EnergyOptions& opts = {});

}  // namespace scenegen::energy
