#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scenegen/learning.hpp"
#include "scenegen/model.hpp"
#include "scenegen/sampler.hpp"

namespace scenegen::io {

// File schema tags; loaders reject anything else.
inline constexpr const char* kSceneSchema = "scenegen-scene-v1";
inline constexpr const char* kModelSchema = "scenegen-model-v1";
inline constexpr const char* kGrammarSchema = "scenegen-grammar-v1";
inline constexpr const char* kRulesSchema = "scenegen-rules-v1";

// ---- scenes and corpora ----

// Canonical scene JSON (sorted keys, lossless doubles). Instances are a
// flat list, furniture first; supported objects reference their supporter
// through `supported_by`, grouped furniture through `grouped_with`.
std::string scene_to_json(const SceneLayout& scene);
SceneLayout scene_from_json(const std::string& text,
                            const std::string& locus = "<memory>");

void export_scene(const std::filesystem::path& path, const SceneLayout& scene);
SceneLayout load_scene(const std::filesystem::path& path);

// A corpus path is either one JSON file (single scene or array of scenes)
// or a directory of *.json files read in filename order. Empty corpora are
// rejected.
std::vector<SceneLayout> load_corpus(const std::filesystem::path& path);

// ---- model, grammar, rules ----

std::string model_to_json(const LearnedModel& model);
LearnedModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const LearnedModel& model);
LearnedModel load_model(const std::filesystem::path& path);

Grammar load_grammar(const std::filesystem::path& path);
GroupingRules load_rules(const std::filesystem::path& path);
std::string grammar_to_json(const Grammar& grammar);
std::string rules_to_json(const GroupingRules& rules);

// ---- rasters ----

struct RasterImage {
  int width = 0;   // cells along x
  int height = 0;  // cells along y
  double meters_per_cell = 0.1;
  std::vector<std::uint8_t> cells;  // row-major, row 0 at max y (top view)

  std::uint8_t at(int col, int row) const {
    return cells[static_cast<std::size_t>(row) * width + col];
  }
};

// Top-view category-index map: floor is 0, occupied cells carry the frozen
// category index; overlaps resolve to the larger z, then category order.
RasterImage rasterize_segmentation(const SceneLayout& scene,
                                   const LearnedModel& model,
                                   double resolution);

// Sum of every instance's affordance map splatted through its pose onto
// the floor, normalized to 0..255.
RasterImage rasterize_affordance(const SceneLayout& scene,
                                 const LearnedModel& model, double resolution);

// Trajectory heatmap to 0..255 gray.
RasterImage heatmap_to_raster(const planner::TrajectoryHeatmap& hm);

void write_pgm(const std::filesystem::path& path, const RasterImage& image);

// Affordance map exported as 0..255 gray for inspection.
void write_map_pgm(const std::filesystem::path& path,
                   const affordance::AffordanceMap& map);

// ---- affordance map distances ----

// Total variation distance, 0.5 * sum |p - q|, in [0, 1].
double tv_distance(const affordance::AffordanceMap& a,
                   const affordance::AffordanceMap& b);

// Hellinger distance, sqrt(sum (sqrt p - sqrt q)^2) / sqrt 2, in [0, 1].
double hellinger(const affordance::AffordanceMap& a,
                 const affordance::AffordanceMap& b);

// ---- traces ----

void write_trace_csv(const std::filesystem::path& path,
                     const sampler::ChainTrace& trace);
void write_learning_trace(const std::filesystem::path& path,
                          const learning::CDResult& result);

}  // namespace scenegen::io
