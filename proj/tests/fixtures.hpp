#pragma once

// Hand-built grammars and models shared by the test suites. Everything here
// is deterministic: distributions are constructed directly rather than
// fitted, so expected values can be derived by hand.

#include <map>
#include <string>
#include <vector>

#include "scenegen/learning.hpp"
#include "scenegen/model.hpp"
#include "scenegen/sampler.hpp"

namespace fixtures {

using namespace scenegen;

struct CategorySpec {
  std::string name;
  TerminalLayer layer = TerminalLayer::Furniture;
  Vec3 mean_size = Vec3(1.0, 1.0, 1.0);
  // Per-scene instance count distribution, e.g. {{"1", 1.0}}.
  std::map<std::string, double> count_probs = {{"1", 1.0}};
  // Address distribution over target categories / "nil"; empty = no
  // address terminal in the grammar.
  std::map<std::string, double> address_probs;
};

struct SceneTypeSpec {
  std::string name;
  Vec3 room_size = Vec3(5.0, 5.0, 2.8);
  std::vector<CategorySpec> categories;
};

inline prob::Categorical make_categorical(
    const std::map<std::string, double>& probs) {
  prob::Categorical c;
  for (const auto& [label, p] : probs) {
    c.outcomes.push_back(label);
    c.probs.push_back(p);
  }
  return c;
}

inline Grammar build_grammar(const std::vector<SceneTypeSpec>& types) {
  Grammar g;
  g.root = "scene";
  NodeSpec root;
  root.kind = NodeKind::Or;
  for (const auto& t : types) {
    g.scene_types.push_back(t.name);
    root.children.push_back(t.name);

    NodeSpec type_node;
    type_node.kind = NodeKind::And;
    NodeSpec furn_set;
    furn_set.kind = NodeKind::Set;
    furn_set.layer = TerminalLayer::Furniture;
    NodeSpec obj_set;
    obj_set.kind = NodeKind::Set;
    obj_set.layer = TerminalLayer::Supported;

    for (const auto& c : t.categories) {
      const std::string branch = t.name + "." + c.name;
      NodeSpec group;
      group.kind = NodeKind::And;
      NodeSpec term;
      term.kind = NodeKind::RegularTerminal;
      term.category = c.name;
      g.nodes[branch + ".t"] = term;
      group.children.push_back(branch + ".t");
      if (!c.address_probs.empty()) {
        NodeSpec addr;
        addr.kind = NodeKind::AddressTerminal;
        for (const auto& [target, p] : c.address_probs)
          addr.candidates.push_back(target);
        g.nodes[branch + ".a"] = addr;
        group.children.push_back(branch + ".a");
      }
      g.nodes[branch] = group;
      (c.layer == TerminalLayer::Furniture ? furn_set : obj_set)
          .children.push_back(branch);
    }
    if (!furn_set.children.empty()) {
      g.nodes[t.name + ".furn"] = furn_set;
      type_node.children.push_back(t.name + ".furn");
    }
    if (!obj_set.children.empty()) {
      g.nodes[t.name + ".obj"] = obj_set;
      type_node.children.push_back(t.name + ".obj");
    }
    g.nodes[t.name] = type_node;
  }
  g.nodes["scene"] = root;
  return g;
}

struct ModelParams {
  double size_bandwidth = 0.05;
  double room_bandwidth = 0.25;
  double wall_mu = std::log(0.6);
  double wall_sigma = 0.5;
  double orient_kappa = 2.0;
  // Human peak straight in front of the object in its own frame.
  Vec2 human_peak = Vec2(0.0, 0.9);
  affordance::AffordanceParams affordance;
};

inline LearnedModel build_model(const std::vector<SceneTypeSpec>& types,
                                const Weights& weights,
                                const ModelParams& params = {},
                                const std::map<std::string, double>&
                                    type_probs = {}) {
  LearnedModel model;
  model.grammar = build_grammar(types);
  model.affordance_params = params.affordance;

  std::map<std::string, double> or_probs = type_probs;
  if (or_probs.empty())
    for (const auto& t : types)
      or_probs[t.name] = 1.0 / static_cast<double>(types.size());
  model.or_dists["scene"] = make_categorical(or_probs);

  affordance::HumanRecords records;
  for (const auto& t : types) {
    Eigen::MatrixXd room(1, 3);
    room << t.room_size.x(), t.room_size.y(), t.room_size.z();
    model.room_size_kdes[t.name] = prob::kde_fit_fixed(
        room, Eigen::Vector3d::Constant(params.room_bandwidth));

    for (const auto& c : t.categories) {
      const std::string set_node =
          c.layer == TerminalLayer::Furniture ? t.name + ".furn"
                                              : t.name + ".obj";
      const std::string branch = t.name + "." + c.name;
      model.set_count_dists[LearnedModel::set_key(set_node, branch)] =
          make_categorical(c.count_probs);
      if (!c.address_probs.empty())
        model.address_dists[c.name] = make_categorical(c.address_probs);

      if (!model.size_kdes.count(c.name)) {
        Eigen::MatrixXd size(1, 3);
        size << c.mean_size.x(), c.mean_size.y(), c.mean_size.z();
        model.size_kdes[c.name] = prob::kde_fit_fixed(
            size, Eigen::Vector3d::Constant(params.size_bandwidth));
        model.wall_dist[c.name] =
            prob::LogNormalDist{params.wall_mu, params.wall_sigma};
        model.wall_orient[c.name] = prob::VonMisesMixture{
            {{1.0, 0.0, params.orient_kappa}}};
        records[c.name] = {params.human_peak};
      }
    }
  }

  model.weights = weights;
  model.finalize();
  std::vector<std::string> categories;
  for (const auto& [cat, info] : model.category_info)
    categories.push_back(cat);
  model.affordances = affordance::estimate_maps_from_records(
      records, categories, params.affordance, nullptr);
  model.config_fingerprint = "fixture";
  return model;
}

// Single-category model: one box in a room. Used by the discretized-toy
// checks and anywhere a minimal model suffices.
inline LearnedModel box_model(const Weights& weights,
                              const Vec3& room = Vec3(5.0, 5.0, 2.8),
                              const Vec3& box = Vec3(1.0, 1.0, 1.0)) {
  SceneTypeSpec type;
  type.name = "boxroom";
  type.room_size = room;
  type.categories = {{"box", TerminalLayer::Furniture, box}};
  return build_model({type}, weights);
}

// Five-furniture bedroom with one supported object category.
inline std::vector<SceneTypeSpec> bedroom_spec() {
  SceneTypeSpec bedroom;
  bedroom.name = "bedroom";
  bedroom.room_size = Vec3(5.0, 5.0, 2.8);
  bedroom.categories = {
      {"bed", TerminalLayer::Furniture, Vec3(1.6, 2.0, 0.5)},
      {"wardrobe", TerminalLayer::Furniture, Vec3(1.2, 0.6, 2.0)},
      {"desk", TerminalLayer::Furniture, Vec3(1.2, 0.6, 0.75)},
      {"chair",
       TerminalLayer::Furniture,
       Vec3(0.45, 0.45, 0.9),
       {{"1", 1.0}},
       {{"desk", 0.7}, {kNilLabel, 0.3}}},
      {"nightstand",
       TerminalLayer::Furniture,
       Vec3(0.45, 0.4, 0.55),
       {{"1", 1.0}},
       {{"bed", 0.8}, {kNilLabel, 0.2}}},
      {"lamp",
       TerminalLayer::Supported,
       Vec3(0.15, 0.15, 0.4),
       {{"1", 1.0}},
       {{"nightstand", 0.8}, {kNilLabel, 0.2}}},
  };
  return {bedroom};
}

inline LearnedModel bedroom_model(const Weights& weights) {
  return build_model(bedroom_spec(), weights);
}

inline Weights default_weights() {
  Weights w;
  w.lambda_f = Eigen::Vector2d(10.0, 0.5);
  w.lambda_o = Eigen::Vector2d(0.5, 1.0);
  w.lambda_g = Eigen::Vector2d(0.5, 1.0);
  w.lambda_r = Eigen::Vector2d(1.0, 1.0);
  return w;
}

inline ObjectInstance make_box(const std::string& category, const Vec3& size,
                               const Vec3& position, double yaw = 0.0) {
  ObjectInstance obj;
  obj.category = category;
  obj.size = size;
  obj.position = position;
  obj.yaw = yaw;
  return obj;
}

inline SceneLayout empty_scene(const std::string& type = "boxroom",
                               const Vec3& room = Vec3(5.0, 5.0, 2.8)) {
  SceneLayout scene;
  scene.room.scene_type = type;
  scene.room.size = room;
  return scene;
}

}  // namespace fixtures
