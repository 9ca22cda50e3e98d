#include "scenegen/model.hpp"

#include <algorithm>

namespace scenegen {

Eigen::Matrix<double, 8, 1> Weights::stacked() const {
  Eigen::Matrix<double, 8, 1> v;
  v << lambda_f, lambda_o, lambda_g, lambda_r;
  return v;
}

Weights Weights::from_stacked(const Eigen::Matrix<double, 8, 1>& v) {
  Weights w;
  w.lambda_f = v.segment<2>(0);
  w.lambda_o = v.segment<2>(2);
  w.lambda_g = v.segment<2>(4);
  w.lambda_r = v.segment<2>(6);
  return w;
}

std::string LearnedModel::set_key(const std::string& set_node,
                                  const std::string& branch) {
  return set_node + "/" + branch;
}

void LearnedModel::finalize() {
  category_info.clear();
  for (const auto& [id, spec] : grammar.nodes) {
    if (spec.kind != NodeKind::Set) continue;
    for (const auto& branch : spec.children) {
      const std::string category = grammar.branch_category(branch);
      CategoryInfo info;
      info.layer = spec.layer;
      if (const NodeSpec* addr = grammar.branch_address(branch)) {
        info.has_address = true;
        info.candidates = addr->candidates;
      }
      category_info[category] = info;
    }
  }
  if (category_index.empty()) {
    std::vector<std::string> cats;
    cats.reserve(category_info.size());
    for (const auto& [cat, info] : category_info) cats.push_back(cat);
    std::sort(cats.begin(), cats.end());
    int next = 1;  // 0 is the floor
    for (const auto& cat : cats) category_index[cat] = next++;
  }
}

std::vector<std::string> LearnedModel::validate() const {
  std::vector<std::string> problems = grammar.validate();
  for (const auto& [id, spec] : grammar.nodes) {
    if (spec.kind == NodeKind::Or && !or_dists.count(id))
      problems.push_back("missing or distribution for node '" + id + "'");
    if (spec.kind == NodeKind::Set)
      for (const auto& branch : spec.children)
        if (!set_count_dists.count(set_key(id, branch)))
          problems.push_back("missing set count distribution for '" +
                             set_key(id, branch) + "'");
  }
  for (const auto& [cat, info] : category_info) {
    if (!size_kdes.count(cat))
      problems.push_back("missing size distribution for category '" + cat +
                         "'");
    if (!affordances.count(cat))
      problems.push_back("missing affordance map for category '" + cat + "'");
    if (info.has_address && !address_dists.count(cat))
      problems.push_back("missing address distribution for category '" + cat +
                         "'");
    if (info.layer == TerminalLayer::Furniture) {
      if (!wall_dist.count(cat))
        problems.push_back("missing wall distance distribution for '" + cat +
                           "'");
      if (!wall_orient.count(cat))
        problems.push_back("missing wall orientation distribution for '" +
                           cat + "'");
    }
  }
  for (const auto& type : grammar.scene_types)
    if (!room_size_kdes.count(type))
      problems.push_back("missing room size distribution for scene type '" +
                         type + "'");
  if (!weights.stacked().allFinite())
    problems.push_back("non-finite potential weights");
  return problems;
}

const affordance::AffordanceMap& LearnedModel::affordance_for(
    const std::string& category) const {
  auto it = affordances.find(category);
  if (it == affordances.end())
    throw Error("model: no affordance map for category '" + category + "'");
  return it->second;
}

}  // namespace scenegen
