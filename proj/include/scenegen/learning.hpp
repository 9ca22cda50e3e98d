#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "scenegen/energy.hpp"
#include "scenegen/model.hpp"

namespace scenegen::learning {

// Raw statistics pulled from a corpus; everything downstream (fitting) is a
// pure function of this structure. Sample vectors are kept sorted so the
// result is independent of corpus order.
struct CorpusStats {
  int scene_count = 0;
  std::map<std::string, std::int64_t> scene_type_counts;
  std::map<std::string, std::vector<Vec3>> room_sizes;  // per scene type
  // or-node id -> child -> count (root Or only; see collect_stats).
  std::map<std::string, std::map<std::string, std::int64_t>> or_counts;
  // set-key -> per-scene instance count -> occurrences.
  std::map<std::string, std::map<int, std::int64_t>> set_counts;
  // category -> target category (or nil) -> count.
  std::map<std::string, std::map<std::string, std::int64_t>> address_counts;
  std::map<std::string, std::vector<Vec3>> size_samples;       // category
  std::map<std::string, std::vector<double>> wall_distances;   // category
  std::map<std::string, std::vector<double>> wall_orientations;  // category
  affordance::HumanRecords human_records;  // category -> local positions
};

struct LearnOptions {
  // Nearest eligible target within this distance counts as grouped.
  double grouping_distance = 1.5;
  int vonmises_components = 4;
  affordance::AffordanceParams affordance;
};

// Deterministic, order-independent statistics accumulation. The grammar is
// expected to be in canonical shape: root Or over scene types, one And per
// type whose Set children carry the furniture / supported-object branches.
CorpusStats collect_stats(const std::vector<SceneLayout>& corpus,
                          const Grammar& grammar, const GroupingRules& rules,
                          const LearnOptions& opts = {});

// Fit every distribution table by maximum likelihood; weights start at
// zero. Throws Error naming the first table with empty statistics.
LearnedModel fit_model(const CorpusStats& stats, const Grammar& grammar,
                       const GroupingRules& rules,
                       const LearnOptions& opts = {});

// Derive the tree choices a canonical-shape grammar assigns to a scene
// (root Or choice plus per-branch instance counts).
TreeChoices derive_tree_choices(const SceneLayout& scene,
                                const Grammar& grammar);

// ---- contrastive divergence ----

struct CDOptions {
  int epochs = 20;
  double eta0 = 0.1;  // learning rate schedule eta0 / (1 + t / tau)
  double tau = 50.0;
  int minibatch = 32;
  int n_tilde = 1;        // chain steps from the data
  int proposals_per_step = 20;  // Metropolis proposals per chain step
  double divergence_guard = 1e4;
  std::uint64_t seed = 0;
  // Slots updated by CD; others stay fixed (restricted models).
  Eigen::Matrix<double, 8, 1> slot_mask = Eigen::Matrix<double, 8, 1>::Ones();
};

struct CDEpochRecord {
  Eigen::Matrix<double, 8, 1> data_loss;
  Eigen::Matrix<double, 8, 1> sample_loss;
  Eigen::Matrix<double, 8, 1> lambda;
};

struct CDResult {
  Weights weights;
  std::vector<CDEpochRecord> trace;
  bool diverged = false;
};

// Markov-chain handle: run `proposals` Metropolis steps at T=1 from a data
// scene under the current model and return the end state.
using ChainRunner = std::function<SceneLayout(
    const SceneLayout& start, const LearnedModel& model, int proposals,
    RandomStream& rng)>;

// Weight learning by CD: per epoch, lambda moves along the difference
// between the mean loss vector of chain samples and of the data minibatch.
CDResult cd_learn(const std::vector<SceneLayout>& corpus, LearnedModel model,
                  const ChainRunner& chain, const CDOptions& opts,
                  const energy::EnergyOptions& energy_opts = {},
                  const energy::HeatmapCachePolicy& cache_policy = {},
                  const planner::PlannerParams& planner_params = {});

}  // namespace scenegen::learning
