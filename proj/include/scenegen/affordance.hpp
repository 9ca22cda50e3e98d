#pragma once

#include <map>
#include <string>
#include <vector>

#include "scenegen/rng.hpp"
#include "scenegen/scene.hpp"

namespace scenegen::affordance {

// Furniture whose centers are treated as visited human positions when a
// corpus carries no annotations.
inline const std::vector<std::string> kHumanSeatCategories = {"bed", "chair",
                                                              "sofa"};

struct AffordanceParams {
  double extent = 3.0;          // half-width R, meters
  double resolution = 0.1;      // cell size, meters
  double smoothing_sigma = 0.15;  // meters
  double eps_aff = 1e-6;        // floor density outside support, per m^2
};

// Human-position distribution in the object frame: object at the origin
// facing +y, grid spanning [-R, R]^2, cells summing to one.
struct AffordanceMap {
  std::string category;
  double extent = 3.0;
  double resolution = 0.1;
  double smoothing = 0.15;
  Grid grid;  // (nx, ny), grid(ix, iy); x and y binned from -R upward

  int cells_per_side() const { return static_cast<int>(grid.rows()); }
  bool cell_of(const Vec2& local, int* ix, int* iy) const;
  Vec2 cell_center(int ix, int iy) const;
};

// Per-category accumulated human positions in the object frame. Kept as a
// plain structure so corpus statistics can be stored and merged.
using HumanRecords = std::map<std::string, std::vector<Vec2>>;

// All human positions of one scene in world coordinates: annotated humans
// plus the footprint centers of seat categories.
std::vector<Vec2> scene_human_positions(const SceneLayout& scene);

// Transform every scene human into every instance's frame and keep those
// within the grid extent.
HumanRecords collect_human_records(const std::vector<SceneLayout>& corpus,
                                   const AffordanceParams& params = {});

// Build one normalized, smoothed map per requested category. Categories
// with no accumulated humans get a uniform map and a warning entry.
std::map<std::string, AffordanceMap> estimate_maps_from_records(
    const HumanRecords& records, const std::vector<std::string>& categories,
    const AffordanceParams& params = {},
    std::vector<std::string>* warnings = nullptr);

// Convenience: records from the corpus, one map per category present.
std::map<std::string, AffordanceMap> estimate_maps(
    const std::vector<SceneLayout>& corpus, const AffordanceParams& params = {},
    std::vector<std::string>* warnings = nullptr);

// Density (per m^2) of a world-frame human position under the map owned by
// `obj`; eps_aff outside the grid extent.
double human_prob(const AffordanceMap& map, const Vec2& human_world,
                  const ObjectInstance& obj, double eps_aff = 1e-6);

// Draw n world-frame human positions: categorical cell draw plus uniform
// jitter inside the cell, pushed through the object pose.
std::vector<Vec2> sample_humans(const AffordanceMap& map,
                                const ObjectInstance& obj, int n,
                                RandomStream& rng);

}  // namespace scenegen::affordance
