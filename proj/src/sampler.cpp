#include "scenegen/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace scenegen::sampler {

std::vector<std::string> SamplerConfig::validate() const {
  std::vector<std::string> problems;
  if (iterations < 1) problems.push_back("iterations must be >= 1");
  if (t0 <= 0.0) problems.push_back("t0 must be > 0");
  if (q1 < 0.0 || q2 < 0.0 || q3 < 0.0 ||
      std::abs(q1 + q2 + q3 - 1.0) > 1e-9)
    problems.push_back("move probabilities must be >= 0 and sum to 1");
  if (sigma_xy <= 0.0) problems.push_back("sigma_xy must be > 0");
  if (sigma_theta <= 0.0) problems.push_back("sigma_theta must be > 0");
  if (humans_per_object < 0)
    problems.push_back("humans_per_object must be >= 0");
  return problems;
}

double annealing_temperature(double t0, int t) {
  return t0 / std::log(1.0 + static_cast<double>(t));
}

namespace {

// Uniform pick among furniture instances of a category; -1 when none.
int pick_instance_of_category(const std::vector<ObjectInstance>& furniture,
                              const std::string& category, int exclude,
                              RandomStream& rng) {
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(furniture.size()); ++i)
    if (i != exclude && furniture[i].category == category) pool.push_back(i);
  if (pool.empty()) return -1;
  return pool[rng.uniform_int(static_cast<int>(pool.size()))];
}

void instantiate_branch(const LearnedModel& model, const std::string& set_node,
                        const std::string& branch, const Room& room,
                        SceneLayout* scene, RandomStream& rng) {
  const Grammar& grammar = model.grammar;
  const std::string category = grammar.branch_category(branch);
  const auto count_it =
      model.set_count_dists.find(LearnedModel::set_key(set_node, branch));
  if (count_it == model.set_count_dists.end())
    throw Error("sampler: missing count distribution for '" +
                LearnedModel::set_key(set_node, branch) + "'");
  const int count = std::stoi(count_it->second.sample(rng));
  scene->tree_choices.set_counts[set_node][branch] = count;

  const auto size_it = model.size_kdes.find(category);
  if (size_it == model.size_kdes.end())
    throw Error("sampler: missing size distribution for category '" +
                category + "'");
  const NodeSpec& set_spec = grammar.node(set_node);
  for (int k = 0; k < count; ++k) {
    ObjectInstance obj;
    obj.category = category;
    const Eigen::VectorXd size = prob::kde_sample(size_it->second, rng);
    obj.size = Vec3(std::max(size[0], 0.01), std::max(size[1], 0.01),
                    std::max(size[2], 0.01));
    obj.position = Vec3(rng.uniform(0.0, room.size.x()),
                        rng.uniform(0.0, room.size.y()), 0.0);
    obj.yaw = rng.uniform(0.0, kTwoPi);
    if (set_spec.layer == TerminalLayer::Furniture)
      scene->furniture.push_back(obj);
    else
      scene->supported_objects.push_back(obj);
  }
}

void expand_node(const LearnedModel& model, const std::string& id,
                 const Room& room, SceneLayout* scene, RandomStream& rng) {
  const NodeSpec& spec = model.grammar.node(id);
  switch (spec.kind) {
    case NodeKind::And:
      for (const auto& child : spec.children)
        expand_node(model, child, room, scene, rng);
      break;
    case NodeKind::Or: {
      const auto it = model.or_dists.find(id);
      if (it == model.or_dists.end())
        throw Error("sampler: missing or distribution for node '" + id + "'");
      const std::string choice = it->second.sample(rng);
      scene->tree_choices.or_choices[id] = choice;
      expand_node(model, choice, room, scene, rng);
      break;
    }
    case NodeKind::Set:
      for (const auto& branch : spec.children)
        instantiate_branch(model, id, branch, room, scene, rng);
      break;
    case NodeKind::RegularTerminal:
    case NodeKind::AddressTerminal:
      // Terminals outside Set branches carry no attributes to sample here.
      break;
  }
}

// Sample an address (target category or nil) and bind it to an instance.
void assign_address(const LearnedModel& model, ObjectInstance* obj,
                    const std::vector<ObjectInstance>& furniture, int self,
                    bool is_supported, RandomStream& rng) {
  const auto info_it = model.category_info.find(obj->category);
  if (info_it == model.category_info.end() || !info_it->second.has_address)
    return;
  const auto dist_it = model.address_dists.find(obj->category);
  if (dist_it == model.address_dists.end())
    throw Error("sampler: missing address distribution for category '" +
                obj->category + "'");
  const std::string target = dist_it->second.sample(rng);
  obj->address.reset();
  if (target != kNilLabel) {
    const int idx = pick_instance_of_category(furniture, target, self, rng);
    if (idx >= 0) obj->address = idx;
  }
  if (is_supported) {
    obj->position.z() =
        obj->address
            ? furniture[*obj->address].position.z() +
                  furniture[*obj->address].size.z()
            : 0.0;
  }
}

}  // namespace

SceneLayout sample_structure(const LearnedModel& model,
                             const std::string& scene_type,
                             int humans_per_object, RandomStream& rng) {
  if (std::find(model.grammar.scene_types.begin(),
                model.grammar.scene_types.end(),
                scene_type) == model.grammar.scene_types.end())
    throw Error("sampler: unknown scene type '" + scene_type + "'");

  SceneLayout scene;
  scene.room.scene_type = scene_type;
  const auto room_it = model.room_size_kdes.find(scene_type);
  if (room_it == model.room_size_kdes.end())
    throw Error("sampler: missing room size distribution for '" + scene_type +
                "'");
  const Eigen::VectorXd rs = prob::kde_sample(room_it->second, rng);
  scene.room.size = Vec3(std::max(rs[0], 0.5), std::max(rs[1], 0.5),
                         std::max(rs[2], 0.5));

  // The root Or picks the scene type; here the type is requested, so the
  // choice is recorded rather than drawn.
  const NodeSpec& root = model.grammar.node(model.grammar.root);
  std::string type_node = model.grammar.root;
  if (root.kind == NodeKind::Or) {
    scene.tree_choices.or_choices[model.grammar.root] = scene_type;
    type_node = scene_type;
  }
  expand_node(model, type_node, scene.room, &scene, rng);

  for (int i = 0; i < static_cast<int>(scene.furniture.size()); ++i)
    assign_address(model, &scene.furniture[i], scene.furniture, i, false, rng);
  for (auto& obj : scene.supported_objects)
    assign_address(model, &obj, scene.furniture, -1, true, rng);

  if (humans_per_object > 0) {
    auto sample_for = [&](ObjectInstance& obj) {
      obj.humans = affordance::sample_humans(model.affordance_for(obj.category),
                                             obj, humans_per_object, rng);
    };
    for (auto& f : scene.furniture) sample_for(f);
    for (auto& o : scene.supported_objects) sample_for(o);
  }
  return scene;
}

namespace {

void translate_rigid(ObjectInstance* obj, const Vec2& delta) {
  obj->position.x() += delta.x();
  obj->position.y() += delta.y();
  for (auto& h : obj->humans) h += delta;
}

void rotate_about(ObjectInstance* obj, const Vec2& pivot, double dtheta) {
  const Eigen::Matrix2d r = yaw_rotation(dtheta);
  const Vec2 p(obj->position.x(), obj->position.y());
  const Vec2 np = pivot + r * (p - pivot);
  obj->position.x() = np.x();
  obj->position.y() = np.y();
  obj->yaw = wrap_angle(obj->yaw + dtheta);
  for (auto& h : obj->humans) h = pivot + r * (h - pivot);
}

// Clamp a supported object's center onto its supporter's top surface.
void clamp_to_support(ObjectInstance* obj, const ObjectInstance& support) {
  Vec2 local = world_to_object(support, Vec2(obj->position.x(),
                                             obj->position.y()));
  local.x() = std::clamp(local.x(), -0.5 * support.size.x(),
                         0.5 * support.size.x());
  local.y() = std::clamp(local.y(), -0.5 * support.size.y(),
                         0.5 * support.size.y());
  const Vec2 world = object_to_world(support, local);
  obj->position.x() = world.x();
  obj->position.y() = world.y();
  obj->position.z() = support.position.z() + support.size.z();
}

}  // namespace

Proposal propose(const SceneLayout& scene, const LearnedModel& model,
                 const SamplerConfig& config, RandomStream& rng) {
  Proposal prop;
  prop.scene = scene;
  const int nf = static_cast<int>(scene.furniture.size());
  const int no = static_cast<int>(scene.supported_objects.size());
  const int total = nf + no;
  if (total == 0) {
    prop.identity = true;
    return prop;
  }

  const double u = rng.uniform();
  const char move = u < config.q1 ? '1' : (u < config.q1 + config.q2 ? '2' : '3');
  prop.move = move;

  if (move == '1' || move == '2') {
    const int pick = rng.uniform_int(total);
    const bool is_furniture = pick < nf;
    if (move == '1') {
      const double scale = is_furniture ? config.sigma_xy : config.sigma_xy / 3.0;
      const Vec2 delta(rng.normal(0.0, scale), rng.normal(0.0, scale));
      if (is_furniture) {
        auto& f = prop.scene.furniture[pick];
        translate_rigid(&f, delta);
        for (auto& o : prop.scene.supported_objects)
          if (o.address && *o.address == pick) translate_rigid(&o, delta);
        prop.furniture_displacement = delta.norm();
      } else {
        auto& o = prop.scene.supported_objects[pick - nf];
        translate_rigid(&o, delta);
        if (o.address) clamp_to_support(&o, prop.scene.furniture[*o.address]);
      }
    } else {
      const double dtheta = rng.normal(0.0, config.sigma_theta);
      if (is_furniture) {
        auto& f = prop.scene.furniture[pick];
        const Vec2 pivot(f.position.x(), f.position.y());
        rotate_about(&f, pivot, dtheta);
        for (auto& o : prop.scene.supported_objects)
          if (o.address && *o.address == pick) rotate_about(&o, pivot, dtheta);
      } else {
        auto& o = prop.scene.supported_objects[pick - nf];
        rotate_about(&o, Vec2(o.position.x(), o.position.y()), dtheta);
      }
    }
    return prop;
  }

  // Address resample (q3): pick among instances that carry address nodes.
  std::vector<std::pair<bool, int>> addressable;  // (is_furniture, index)
  for (int i = 0; i < nf; ++i) {
    const auto it = model.category_info.find(scene.furniture[i].category);
    if (it != model.category_info.end() && it->second.has_address)
      addressable.push_back({true, i});
  }
  for (int i = 0; i < no; ++i) {
    const auto it =
        model.category_info.find(scene.supported_objects[i].category);
    if (it != model.category_info.end() && it->second.has_address)
      addressable.push_back({false, i});
  }
  if (addressable.empty()) {
    prop.identity = true;
    prop.move = 'i';
    return prop;
  }
  const auto [is_furniture, idx] =
      addressable[rng.uniform_int(static_cast<int>(addressable.size()))];
  if (is_furniture) {
    auto& f = prop.scene.furniture[idx];
    const auto dist_it = model.address_dists.find(f.category);
    if (dist_it == model.address_dists.end())
      throw Error("sampler: missing address distribution for category '" +
                  f.category + "'");
    const std::string target = dist_it->second.sample(rng);
    f.address.reset();
    if (target != kNilLabel) {
      const int t =
          pick_instance_of_category(prop.scene.furniture, target, idx, rng);
      if (t >= 0) f.address = t;
    }
  } else {
    auto& o = prop.scene.supported_objects[idx];
    const auto dist_it = model.address_dists.find(o.category);
    if (dist_it == model.address_dists.end())
      throw Error("sampler: missing address distribution for category '" +
                  o.category + "'");
    const std::string target = dist_it->second.sample(rng);
    o.address.reset();
    o.position.z() = 0.0;
    if (target != kNilLabel) {
      const int t =
          pick_instance_of_category(prop.scene.furniture, target, -1, rng);
      if (t >= 0) {
        o.address = t;
        o.position.z() = prop.scene.furniture[t].position.z() +
                         prop.scene.furniture[t].size.z();
      }
    }
  }
  return prop;
}

bool accept(double e_old, double e_new, double temperature,
            RandomStream& rng) {
  if (temperature <= 0.0) throw Error("accept: temperature must be > 0");
  const double u = rng.uniform();
  if (e_new <= e_old) return true;
  return u < std::exp((e_old - e_new) / temperature);
}

std::pair<SceneLayout, ChainTrace> synthesize(const LearnedModel& model,
                                              const std::string& scene_type,
                                              const SamplerConfig& config) {
  const auto problems = config.validate();
  if (!problems.empty())
    throw Error("sampler: invalid config: " + problems.front());

  RandomStream rng(config.seed);
  energy::HeatmapCache cache(config.cache, config.planner,
                             RandomStream::derive_seed(config.seed, "heatmap"));

  SceneLayout scene =
      sample_structure(model, scene_type, config.humans_per_object, rng);
  double e = energy::total_energy(scene, model, cache, config.energy);

  ChainTrace trace;
  trace.records.reserve(static_cast<std::size_t>(config.iterations));
  SceneLayout best = scene;
  double e_best = e;

  for (int t = 1; t <= config.iterations; ++t) {
    const double temperature =
        config.annealing ? annealing_temperature(config.t0, t) : config.t0;
    Proposal prop = propose(scene, model, config, rng);
    bool accepted = false;
    if (!prop.identity) {
      const double e_new =
          energy::total_energy(prop.scene, model, cache, config.energy);
      accepted = accept(e, e_new, temperature, rng);
      if (accepted) {
        scene = std::move(prop.scene);
        e = e_new;
        cache.note_accept(prop.furniture_displacement);
        if (cache.refresh_due()) {
          cache.refresh(scene);
          e = energy::total_energy(scene, model, cache, config.energy);
        }
      }
    }
    if (e < e_best) {
      e_best = e;
      best = scene;
    }
    trace.records.push_back(
        {e, e_best, temperature, accepted, prop.move});
  }
  trace.best_energy = e_best;
  trace.final_energy = e;
  return {best, trace};
}

SceneLayout short_chain(const SceneLayout& start, const LearnedModel& model,
                        int proposals, const SamplerConfig& config,
                        RandomStream& rng) {
  energy::HeatmapCache cache(
      config.cache, config.planner,
      RandomStream::derive_seed(rng.seed(), "cd-heatmap"));
  SceneLayout scene = start;
  double e = energy::total_energy(scene, model, cache, config.energy);
  for (int t = 0; t < proposals; ++t) {
    Proposal prop = propose(scene, model, config, rng);
    if (prop.identity) continue;
    const double e_new =
        energy::total_energy(prop.scene, model, cache, config.energy);
    if (accept(e, e_new, 1.0, rng)) {
      scene = std::move(prop.scene);
      e = e_new;
      cache.note_accept(prop.furniture_displacement);
      if (cache.refresh_due()) {
        cache.refresh(scene);
        e = energy::total_energy(scene, model, cache, config.energy);
      }
    }
  }
  return scene;
}

}  // namespace scenegen::sampler
