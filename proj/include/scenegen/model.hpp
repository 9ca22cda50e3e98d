#pragma once

#include <map>
#include <string>
#include <vector>

#include "scenegen/affordance.hpp"
#include "scenegen/prob.hpp"
#include "scenegen/scene.hpp"

namespace scenegen {

// Hand-defined association targets per category, e.g. chair -> {desk, table}.
struct GroupingRules {
  std::map<std::string, std::vector<std::string>> associations;
};

// Potential weights, stacked in the fixed slot order
// (f-col, f-ent, o-hum, o-add, g-hum, g-add, r-dis, r-ori).
struct Weights {
  Eigen::Vector2d lambda_f = Eigen::Vector2d::Zero();  // collision, entropy
  Eigen::Vector2d lambda_o = Eigen::Vector2d::Zero();  // support: human, addr
  Eigen::Vector2d lambda_g = Eigen::Vector2d::Zero();  // group: human, addr
  Eigen::Vector2d lambda_r = Eigen::Vector2d::Zero();  // room: dist, orient

  Eigen::Matrix<double, 8, 1> stacked() const;
  static Weights from_stacked(const Eigen::Matrix<double, 8, 1>& v);
};

// Derived per-category facts read off the grammar.
struct CategoryInfo {
  TerminalLayer layer = TerminalLayer::Furniture;
  bool has_address = false;
  std::vector<std::string> candidates;  // address candidates incl. "nil"
};

// The full parameter set: grammar plus every fitted distribution, the
// affordance maps and the potential weights.
struct LearnedModel {
  Grammar grammar;
  GroupingRules rules;

  std::map<std::string, prob::Categorical> or_dists;         // or-node id
  std::map<std::string, prob::Categorical> set_count_dists;  // set-key
  std::map<std::string, prob::Categorical> address_dists;    // category
  std::map<std::string, prob::KDEDist> size_kdes;            // category
  std::map<std::string, prob::KDEDist> room_size_kdes;       // scene type
  std::map<std::string, prob::LogNormalDist> wall_dist;      // category
  std::map<std::string, prob::VonMisesMixture> wall_orient;  // category
  std::map<std::string, affordance::AffordanceMap> affordances;
  affordance::AffordanceParams affordance_params;
  Weights weights;

  std::map<std::string, int> category_index;  // segmentation colors, 1-based
  std::map<std::string, CategoryInfo> category_info;  // derived, see finalize
  std::string config_fingerprint;

  // Key of a Set branch count table.
  static std::string set_key(const std::string& set_node,
                             const std::string& branch);

  // Rebuild category_info from the grammar and freeze category_index
  // (alphabetical) when empty. Call after construction or deserialization.
  void finalize();

  // Problems that would make sampling or energy evaluation fail; empty when
  // the model is usable for its grammar.
  std::vector<std::string> validate() const;

  const affordance::AffordanceMap& affordance_for(const std::string& category) const;
};

}  // namespace scenegen
