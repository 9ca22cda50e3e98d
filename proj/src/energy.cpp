#include "scenegen/energy.hpp"

#include <algorithm>
#include <cmath>

namespace scenegen::energy {

CliqueSet build_cliques(const SceneLayout& scene) {
  CliqueSet cliques;
  const int nf = static_cast<int>(scene.furniture.size());
  for (int i = 0; i < nf; ++i) {
    cliques.furniture.push_back(i);
    cliques.room.push_back(i);
    if (scene.furniture[i].address)
      cliques.group.push_back({*scene.furniture[i].address, i});
  }
  for (int i = 0; i < static_cast<int>(scene.supported_objects.size()); ++i)
    if (scene.supported_objects[i].address)
      cliques.support.push_back({*scene.supported_objects[i].address, i});
  return cliques;
}

HeatmapCache::HeatmapCache(HeatmapCachePolicy policy,
                           planner::PlannerParams params, std::uint64_t seed)
    : policy_(policy), params_(params), seed_(seed) {}

void HeatmapCache::recompute(const SceneLayout& scene) {
  RandomStream rng(seed_);
  heatmap_ = planner::activity_heatmap(scene, params_, rng);
  have_ = true;
  accumulated_displacement_ = 0.0;
  accepted_since_ = 0;
}

const planner::TrajectoryHeatmap& HeatmapCache::current(
    const SceneLayout& scene) {
  switch (policy_.mode) {
    case HeatmapCachePolicy::Mode::Disabled:
      if (!have_) {
        heatmap_ = planner::TrajectoryHeatmap{};
        have_ = true;
      }
      return heatmap_;
    case HeatmapCachePolicy::Mode::Exact:
      recompute(scene);
      return heatmap_;
    case HeatmapCachePolicy::Mode::Interval:
    default:
      if (!have_) recompute(scene);
      return heatmap_;
  }
}

void HeatmapCache::note_accept(double furniture_displacement) {
  accumulated_displacement_ += furniture_displacement;
  ++accepted_since_;
}

bool HeatmapCache::refresh_due() const {
  if (policy_.mode != HeatmapCachePolicy::Mode::Interval) return false;
  if (!have_) return false;
  return accumulated_displacement_ > policy_.displacement_threshold ||
         accepted_since_ >= policy_.accept_interval;
}

void HeatmapCache::refresh(const SceneLayout& scene) {
  if (policy_.mode == HeatmapCachePolicy::Mode::Interval) recompute(scene);
}

void HeatmapCache::invalidate() {
  have_ = false;
  accumulated_displacement_ = 0.0;
  accepted_since_ = 0;
}

namespace {

// Wall distance for loss evaluation. Centers may drift outside the room
// during sampling; clamp to a small positive distance so the log-normal
// cost stays finite while the containment penalty does its work.
constexpr double kWallDistanceFloor = 1e-4;

double loss_wall_distance(const ObjectInstance& obj, const Room& room,
                          double* rel_orientation) {
  const double x = obj.position.x();
  const double y = obj.position.y();
  const std::array<double, 4> dist = {x, room.size.x() - x, y,
                                      room.size.y() - y};
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (dist[i] < dist[best]) best = i;
  *rel_orientation =
      signed_angle(facing_direction(obj.yaw), wall_inward_normal(best));
  return std::max(dist[best], kWallDistanceFloor);
}

double human_usability_cost(const affordance::AffordanceMap& map,
                            const ObjectInstance& frame_owner,
                            const std::vector<Vec2>& humans,
                            const EnergyOptions& opts) {
  double best = 0.0;
  for (const auto& h : humans)
    best = std::max(best,
                    affordance::human_prob(map, h, frame_owner, opts.eps_aff));
  if (opts.hum_literal) return best;
  return -std::log(best + opts.eps_aff);
}

double address_cost(const prob::Categorical& dist, const std::string& label,
                    const EnergyOptions& opts) {
  return -std::log(std::max(dist.prob(label), opts.eps_p));
}

const prob::Categorical& require_address_dist(const LearnedModel& model,
                                              const std::string& category) {
  auto it = model.address_dists.find(category);
  if (it == model.address_dists.end())
    throw Error("energy: missing address distribution for category '" +
                category + "'");
  return it->second;
}

}  // namespace

LossVector loss_features(const SceneLayout& scene, const LearnedModel& model,
                         HeatmapCache& cache, const EnergyOptions& opts) {
  LossVector loss;
  const CliqueSet cliques = build_cliques(scene);
  const auto& furniture = scene.furniture;

  // Furniture clique: pairwise collision over ordered pairs, plus the
  // out-of-room penetration volume of every instance.
  double col = 0.0;
  for (int i : cliques.furniture)
    for (int j : cliques.furniture)
      if (i != j) col += overlap_volume(furniture[i], furniture[j]);
  for (const auto& f : furniture) col += out_of_room_volume(f, scene.room);
  for (const auto& o : scene.supported_objects)
    col += out_of_room_volume(o, scene.room);
  loss.f_col() = col;

  loss.f_ent() = planner::l_ent(cache.current(scene));

  for (const auto& c : cliques.support) {
    const auto& f = furniture[c.furniture];
    const auto& o = scene.supported_objects[c.object];
    loss.o_hum() +=
        human_usability_cost(model.affordance_for(f.category), f, o.humans,
                             opts);
    loss.o_add() +=
        address_cost(require_address_dist(model, o.category), f.category, opts);
  }

  for (const auto& c : cliques.group) {
    const auto& core = furniture[c.core];
    const auto& assoc = furniture[c.associated];
    loss.g_hum() += human_usability_cost(model.affordance_for(core.category),
                                         core, assoc.humans, opts);
    loss.g_add() += address_cost(require_address_dist(model, assoc.category),
                                 core.category, opts);
  }

  for (int i : cliques.room) {
    const auto& f = furniture[i];
    const auto wd = model.wall_dist.find(f.category);
    if (wd == model.wall_dist.end())
      throw Error("energy: missing wall distance distribution for category '" +
                  f.category + "'");
    const auto wo = model.wall_orient.find(f.category);
    if (wo == model.wall_orient.end())
      throw Error(
          "energy: missing wall orientation distribution for category '" +
          f.category + "'");
    double rel = 0.0;
    const double d = loss_wall_distance(f, scene.room, &rel);
    loss.r_dis() += -prob::lognormal_logpdf(wd->second, d);
    loss.r_ori() += -prob::vonmises_logpdf(wo->second, rel);
  }
  return loss;
}

double tree_energy(const SceneLayout& scene, const LearnedModel& model,
                   const EnergyOptions& opts) {
  double e = 0.0;
  for (const auto& [node, choice] : scene.tree_choices.or_choices) {
    const auto it = model.or_dists.find(node);
    const double p = it == model.or_dists.end() ? 0.0 : it->second.prob(choice);
    e += -std::log(std::max(p, opts.eps_p));
  }
  for (const auto& [node, branches] : scene.tree_choices.set_counts) {
    for (const auto& [branch, count] : branches) {
      const auto it =
          model.set_count_dists.find(LearnedModel::set_key(node, branch));
      const double p = it == model.set_count_dists.end()
                           ? 0.0
                           : it->second.prob(std::to_string(count));
      e += -std::log(std::max(p, opts.eps_p));
    }
  }
  auto size_term = [&](const ObjectInstance& obj) {
    const auto it = model.size_kdes.find(obj.category);
    if (it == model.size_kdes.end())
      throw Error("energy: missing size distribution for category '" +
                  obj.category + "'");
    return -prob::kde_logpdf(it->second, obj.size);
  };
  for (const auto& f : scene.furniture) e += size_term(f);
  for (const auto& o : scene.supported_objects) e += size_term(o);

  const auto room_it = model.room_size_kdes.find(scene.room.scene_type);
  if (room_it == model.room_size_kdes.end())
    throw Error("energy: missing room size distribution for scene type '" +
                scene.room.scene_type + "'");
  e += -prob::kde_logpdf(room_it->second, scene.room.size);
  return e;
}

double total_energy(const SceneLayout& scene, const LearnedModel& model,
                    HeatmapCache& cache, const EnergyOptions& opts) {
  const LossVector loss = loss_features(scene, model, cache, opts);
  return tree_energy(scene, model, opts) +
         model.weights.stacked().dot(loss.v);
}

}  // namespace scenegen::energy
