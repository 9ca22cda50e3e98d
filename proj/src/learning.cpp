#include "scenegen/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace scenegen::learning {

namespace {

struct BranchRef {
  std::string set_node;
  std::string branch;
  std::string category;
  TerminalLayer layer;
};

// Set branches of one scene type in a canonical-shape grammar.
std::vector<BranchRef> type_branches(const Grammar& grammar,
                                     const std::string& scene_type) {
  std::vector<BranchRef> out;
  const NodeSpec& type_node = grammar.node(scene_type);
  for (const auto& child : type_node.children) {
    const NodeSpec& c = grammar.node(child);
    if (c.kind != NodeKind::Set) continue;
    for (const auto& branch : c.children)
      out.push_back({child, branch, grammar.branch_category(branch),
                     c.layer});
  }
  return out;
}

std::map<std::string, int> category_counts(
    const std::vector<ObjectInstance>& instances) {
  std::map<std::string, int> counts;
  for (const auto& obj : instances) ++counts[obj.category];
  return counts;
}

void sort_samples(std::vector<double>* v) { std::sort(v->begin(), v->end()); }

void sort_samples(std::vector<Vec3>* v) {
  std::sort(v->begin(), v->end(), [](const Vec3& a, const Vec3& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
  });
}

}  // namespace

TreeChoices derive_tree_choices(const SceneLayout& scene,
                                const Grammar& grammar) {
  TreeChoices choices;
  const NodeSpec& root = grammar.node(grammar.root);
  if (root.kind == NodeKind::Or)
    choices.or_choices[grammar.root] = scene.room.scene_type;
  const auto furn_counts = category_counts(scene.furniture);
  const auto obj_counts = category_counts(scene.supported_objects);
  for (const auto& branch : type_branches(grammar, scene.room.scene_type)) {
    const auto& counts =
        branch.layer == TerminalLayer::Furniture ? furn_counts : obj_counts;
    const auto it = counts.find(branch.category);
    choices.set_counts[branch.set_node][branch.branch] =
        it == counts.end() ? 0 : it->second;
  }
  return choices;
}

CorpusStats collect_stats(const std::vector<SceneLayout>& corpus,
                          const Grammar& grammar, const GroupingRules& rules,
                          const LearnOptions& opts) {
  if (corpus.empty()) throw Error("collect_stats: empty corpus");
  CorpusStats stats;
  stats.scene_count = static_cast<int>(corpus.size());

  const NodeSpec& root = grammar.node(grammar.root);
  int scene_idx = -1;
  for (const auto& scene : corpus) {
    ++scene_idx;
    const std::string& type = scene.room.scene_type;
    if (std::find(grammar.scene_types.begin(), grammar.scene_types.end(),
                  type) == grammar.scene_types.end())
      throw Error("collect_stats: scene " + std::to_string(scene_idx) +
                  ": unknown scene type '" + type + "'");
    ++stats.scene_type_counts[type];
    if (root.kind == NodeKind::Or) ++stats.or_counts[grammar.root][type];
    stats.room_sizes[type].push_back(scene.room.size);

    // Per-branch instance counts, validating categories along the way.
    const auto branches = type_branches(grammar, type);
    std::set<std::string> furn_cats;
    std::set<std::string> obj_cats;
    for (const auto& b : branches)
      (b.layer == TerminalLayer::Furniture ? furn_cats : obj_cats)
          .insert(b.category);
    for (const auto& f : scene.furniture)
      if (!furn_cats.count(f.category))
        throw Error("collect_stats: scene " + std::to_string(scene_idx) +
                    ": category '" + f.category +
                    "' not a furniture branch of '" + type + "'");
    for (const auto& o : scene.supported_objects)
      if (!obj_cats.count(o.category))
        throw Error("collect_stats: scene " + std::to_string(scene_idx) +
                    ": category '" + o.category +
                    "' not a supported branch of '" + type + "'");
    const auto furn_counts = category_counts(scene.furniture);
    const auto obj_counts = category_counts(scene.supported_objects);
    for (const auto& b : branches) {
      const auto& counts =
          b.layer == TerminalLayer::Furniture ? furn_counts : obj_counts;
      const auto it = counts.find(b.category);
      const int n = it == counts.end() ? 0 : it->second;
      ++stats.set_counts[LearnedModel::set_key(b.set_node, b.branch)][n];
    }

    // Sizes and wall statistics for every instance.
    auto accumulate_instance = [&](const ObjectInstance& obj) {
      stats.size_samples[obj.category].push_back(obj.size);
      const WallInfo wall = nearest_wall(obj, scene.room);
      stats.wall_distances[obj.category].push_back(
          std::max(wall.distance, 1e-6));
      stats.wall_orientations[obj.category].push_back(
          wrap_angle(wall.rel_orientation));
    };
    for (const auto& f : scene.furniture) accumulate_instance(f);
    for (const auto& o : scene.supported_objects) accumulate_instance(o);

    // Support relations come from explicit addresses.
    for (const auto& o : scene.supported_objects) {
      const auto addr_node = [&]() -> const NodeSpec* {
        for (const auto& b : branches)
          if (b.category == o.category && b.layer == TerminalLayer::Supported)
            return grammar.branch_address(b.branch);
        return nullptr;
      }();
      if (addr_node == nullptr) continue;
      const std::string target =
          o.address ? scene.furniture.at(static_cast<std::size_t>(*o.address))
                          .category
                    : std::string(kNilLabel);
      ++stats.address_counts[o.category][target];
    }

    // Grouping occurrences: nearest eligible target within the threshold.
    for (const auto& f : scene.furniture) {
      const auto rule = rules.associations.find(f.category);
      if (rule == rules.associations.end()) continue;
      double best_dist = opts.grouping_distance;
      std::string best_target = kNilLabel;
      const Vec2 fp(f.position.x(), f.position.y());
      for (const auto& g : scene.furniture) {
        if (&g == &f) continue;
        if (std::find(rule->second.begin(), rule->second.end(), g.category) ==
            rule->second.end())
          continue;
        const double d = (Vec2(g.position.x(), g.position.y()) - fp).norm();
        if (d <= best_dist) {
          best_dist = d;
          best_target = g.category;
        }
      }
      ++stats.address_counts[f.category][best_target];
    }
  }

  stats.human_records = affordance::collect_human_records(corpus, opts.affordance);

  for (auto& [cat, v] : stats.room_sizes) sort_samples(&v);
  for (auto& [cat, v] : stats.size_samples) sort_samples(&v);
  for (auto& [cat, v] : stats.wall_distances) sort_samples(&v);
  for (auto& [cat, v] : stats.wall_orientations) sort_samples(&v);
  return stats;
}

namespace {

Eigen::MatrixXd to_matrix(const std::vector<Vec3>& samples) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), 3);
  for (std::size_t i = 0; i < samples.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = samples[i].transpose();
  return m;
}

}  // namespace

LearnedModel fit_model(const CorpusStats& stats, const Grammar& grammar,
                       const GroupingRules& rules, const LearnOptions& opts) {
  LearnedModel model;
  model.grammar = grammar;
  model.rules = rules;
  model.affordance_params = opts.affordance;
  model.finalize();

  for (const auto& [node, counts] : stats.or_counts)
    model.or_dists[node] = prob::categorical_fit(counts);

  for (const auto& [key, histogram] : stats.set_counts) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& [value, c] : histogram)
      counts[std::to_string(value)] = c;
    model.set_count_dists[key] = prob::categorical_fit(counts);
  }

  for (const auto& [category, counts] : stats.address_counts)
    model.address_dists[category] = prob::categorical_fit(counts);

  for (const auto& [category, info] : model.category_info) {
    const auto sizes = stats.size_samples.find(category);
    if (sizes == stats.size_samples.end() || sizes->second.empty())
      throw Error("fit_model: no size samples for category '" + category +
                  "'");
    model.size_kdes[category] = prob::kde_fit(to_matrix(sizes->second));

    const auto dists = stats.wall_distances.find(category);
    if (dists == stats.wall_distances.end() || dists->second.empty())
      throw Error("fit_model: no wall distances for category '" + category +
                  "'");
    if (dists->second.size() == 1) {
      // Degenerate but usable: pin the location, floor the spread.
      model.wall_dist[category] =
          prob::LogNormalDist{std::log(dists->second.front()),
                              prob::kSigmaMin};
    } else {
      model.wall_dist[category] = prob::lognormal_fit(dists->second);
    }

    const auto orients = stats.wall_orientations.find(category);
    if (orients == stats.wall_orientations.end() || orients->second.empty())
      throw Error("fit_model: no wall orientations for category '" + category +
                  "'");
    const int k = std::max(
        1, std::min(opts.vonmises_components,
                    static_cast<int>(orients->second.size()) / 5));
    model.wall_orient[category] = prob::vonmises_fit(orients->second, k);

    if (info.has_address && !model.address_dists.count(category)) {
      // Address terminal never observed: everything points to nil.
      model.address_dists[category] =
          prob::categorical_fit({{kNilLabel, 1}});
    }
  }

  for (const auto& type : grammar.scene_types) {
    const auto rooms = stats.room_sizes.find(type);
    if (rooms == stats.room_sizes.end() || rooms->second.empty())
      throw Error("fit_model: no room sizes for scene type '" + type + "'");
    model.room_size_kdes[type] = prob::kde_fit(to_matrix(rooms->second));
  }

  std::vector<std::string> categories;
  for (const auto& [category, info] : model.category_info)
    categories.push_back(category);
  model.affordances = affordance::estimate_maps_from_records(
      stats.human_records, categories, opts.affordance, nullptr);

  model.weights = Weights{};
  return model;
}

CDResult cd_learn(const std::vector<SceneLayout>& corpus, LearnedModel model,
                  const ChainRunner& chain, const CDOptions& opts,
                  const energy::EnergyOptions& energy_opts,
                  const energy::HeatmapCachePolicy& cache_policy,
                  const planner::PlannerParams& planner_params) {
  if (corpus.empty()) throw Error("cd_learn: empty corpus");
  CDResult result;
  RandomStream rng(opts.seed);

  // Data scenes are fixed, so their loss vectors are computed once. Scenes
  // whose instances carry no humans get them sampled here so the usability
  // costs are well defined on both sides of the update.
  std::vector<SceneLayout> data = corpus;
  for (auto& scene : data) {
    auto ensure_humans = [&](ObjectInstance& obj) {
      if (obj.humans.empty())
        obj.humans = affordance::sample_humans(
            model.affordance_for(obj.category), obj, 3, rng);
    };
    for (auto& f : scene.furniture) ensure_humans(f);
    for (auto& o : scene.supported_objects) ensure_humans(o);
  }

  // One loss-evaluation stream per scene index, shared between the data
  // and the chain-sample sides: identical scenes then yield bitwise equal
  // loss vectors and the CD update at the data fixed point is exactly zero.
  auto loss_of = [&](const SceneLayout& scene, int idx) {
    energy::HeatmapCache cache(
        cache_policy, planner_params,
        RandomStream::derive_seed(opts.seed,
                                  "cd-loss-" + std::to_string(idx)));
    return energy::loss_features(scene, model, cache, energy_opts).v;
  };

  std::vector<Eigen::Matrix<double, 8, 1>> data_loss(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    data_loss[i] = loss_of(data[i], static_cast<int>(i));

  std::vector<int> indices(data.size());
  std::iota(indices.begin(), indices.end(), 0);

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    // Minibatch without replacement (partial Fisher-Yates).
    const int batch =
        std::min<int>(opts.minibatch, static_cast<int>(indices.size()));
    for (int i = 0; i < batch; ++i) {
      const int j =
          i + rng.uniform_int(static_cast<int>(indices.size()) - i);
      std::swap(indices[i], indices[j]);
    }

    Eigen::Matrix<double, 8, 1> mean_data =
        Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 1> mean_sample =
        Eigen::Matrix<double, 8, 1>::Zero();
    for (int i = 0; i < batch; ++i) {
      const int idx = indices[i];
      mean_data += data_loss[static_cast<std::size_t>(idx)];
      RandomStream chain_rng = rng.substream(
          "cd-chain-" + std::to_string(epoch) + "-" + std::to_string(idx));
      const SceneLayout sampled =
          chain(data[static_cast<std::size_t>(idx)], model,
                opts.n_tilde * opts.proposals_per_step, chain_rng);
      mean_sample += loss_of(sampled, idx);
    }
    mean_data /= static_cast<double>(batch);
    mean_sample /= static_cast<double>(batch);

    const double eta =
        opts.eta0 / (1.0 + static_cast<double>(epoch) / opts.tau);
    Eigen::Matrix<double, 8, 1> lambda = model.weights.stacked();
    lambda += eta * (opts.slot_mask.array() *
                     (mean_sample - mean_data).array()).matrix();
    model.weights = Weights::from_stacked(lambda);

    result.trace.push_back({mean_data, mean_sample, lambda});
    if (!lambda.allFinite() ||
        lambda.cwiseAbs().maxCoeff() > opts.divergence_guard) {
      result.diverged = true;
      break;
    }
  }
  result.weights = model.weights;
  return result;
}

}  // namespace scenegen::learning
