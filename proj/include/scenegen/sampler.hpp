#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scenegen/energy.hpp"
#include "scenegen/model.hpp"
#include "scenegen/rng.hpp"

namespace scenegen::sampler {

struct SamplerConfig {
  int iterations = 20000;
  double t0 = 5.0;  // initial temperature
  // Move mix: translation, rotation, address resample. Must sum to 1.
  double q1 = 0.45;
  double q2 = 0.45;
  double q3 = 0.10;
  double sigma_xy = 0.3;     // translation proposal scale, meters
  double sigma_theta = 0.3;  // rotation proposal scale, radians
  std::uint64_t seed = 0;
  bool annealing = true;
  int humans_per_object = 3;
  energy::HeatmapCachePolicy cache;
  energy::EnergyOptions energy;
  planner::PlannerParams planner;

  std::vector<std::string> validate() const;
};

struct ChainRecord {
  double energy = 0.0;
  double best_energy = 0.0;
  double temperature = 0.0;
  bool accepted = false;
  char move = 'i';  // '1' translate, '2' rotate, '3' address, 'i' identity
};

struct ChainTrace {
  std::vector<ChainRecord> records;
  double best_energy = 0.0;
  double final_energy = 0.0;
};

// Annealing schedule T(t) = T0 / ln(1 + t), defined for t >= 1.
double annealing_temperature(double t0, int t);

// Step 1 of synthesis: structure, sizes, initial poses, addresses and
// human positions, all drawn from the learned distributions.
SceneLayout sample_structure(const LearnedModel& model,
                             const std::string& scene_type,
                             int humans_per_object, RandomStream& rng);

struct Proposal {
  SceneLayout scene;
  char move = 'i';
  bool identity = false;
  double furniture_displacement = 0.0;  // for the heatmap cache policy
};

// One Markov-chain proposal. Supported objects and sampled humans move
// rigidly with their furniture.
Proposal propose(const SceneLayout& scene, const LearnedModel& model,
                 const SamplerConfig& config, RandomStream& rng);

// Metropolis acceptance at temperature T.
bool accept(double e_old, double e_new, double temperature, RandomStream& rng);

// Step 1 + annealed Metropolis-Hastings over external attributes and
// addresses. Returns the best scene seen and the full per-iteration trace.
std::pair<SceneLayout, ChainTrace> synthesize(const LearnedModel& model,
                                              const std::string& scene_type,
                                              const SamplerConfig& config);

// Short fixed-temperature chain from a given scene; used for contrastive
// divergence. Returns the final chain state.
SceneLayout short_chain(const SceneLayout& start, const LearnedModel& model,
                        int proposals, const SamplerConfig& config,
                        RandomStream& rng);

}  // namespace scenegen::sampler
