#include "scenegen/affordance.hpp"

#include <algorithm>
#include <cmath>

namespace scenegen::affordance {

namespace {

// Signed bin symmetric about zero: equivalent to floor(x / res) except that
// points exactly on a cell boundary move away from zero on both sides, so
// mirrored positions always land in mirrored cells.
int signed_bin(double x, double res) {
  return static_cast<int>(std::round(x / res - 0.5));
}

}  // namespace

bool AffordanceMap::cell_of(const Vec2& local, int* ix, int* iy) const {
  const int n = cells_per_side();
  const int half = n / 2;
  const int cx = signed_bin(local.x(), resolution) + half;
  const int cy = signed_bin(local.y(), resolution) + half;
  if (cx < 0 || cx >= n || cy < 0 || cy >= n) return false;
  *ix = cx;
  *iy = cy;
  return true;
}

Vec2 AffordanceMap::cell_center(int ix, int iy) const {
  const int half = cells_per_side() / 2;
  return Vec2((ix - half + 0.5) * resolution, (iy - half + 0.5) * resolution);
}

std::vector<Vec2> scene_human_positions(const SceneLayout& scene) {
  std::vector<Vec2> humans;
  auto add_instance = [&humans](const ObjectInstance& obj) {
    for (const auto& h : obj.humans) humans.push_back(h);
    if (std::find(kHumanSeatCategories.begin(), kHumanSeatCategories.end(),
                  obj.category) != kHumanSeatCategories.end())
      humans.push_back(Vec2(obj.position.x(), obj.position.y()));
  };
  for (const auto& f : scene.furniture) add_instance(f);
  for (const auto& o : scene.supported_objects) add_instance(o);
  return humans;
}

HumanRecords collect_human_records(const std::vector<SceneLayout>& corpus,
                                   const AffordanceParams& params) {
  HumanRecords records;
  for (const auto& scene : corpus) {
    const auto humans = scene_human_positions(scene);
    auto accumulate = [&](const ObjectInstance& obj) {
      auto& bucket = records[obj.category];
      for (const auto& h : humans) {
        const Vec2 local = world_to_object(obj, h);
        if (std::abs(local.x()) <= params.extent &&
            std::abs(local.y()) <= params.extent)
          bucket.push_back(local);
      }
    };
    for (const auto& f : scene.furniture) accumulate(f);
    for (const auto& o : scene.supported_objects) accumulate(o);
  }
  // Canonical order: estimation becomes independent of corpus order.
  for (auto& [cat, pts] : records)
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
      return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
  return records;
}

namespace {

// Separable Gaussian blur with a truncated normalized kernel, followed by
// renormalization of the whole grid.
void smooth_and_normalize(Grid* grid, double sigma_cells) {
  const int n = static_cast<int>(grid->rows());
  if (sigma_cells > 1e-9) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_cells)));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma_cells * sigma_cells));
      ksum += kernel[k + radius];
    }
    for (auto& k : kernel) k /= ksum;

    Grid tmp = Grid::Zero(n, n);
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double v = (*grid)(ix, iy);
        if (v == 0.0) continue;
        for (int k = -radius; k <= radius; ++k) {
          const int jx = ix + k;
          if (jx >= 0 && jx < n) tmp(jx, iy) += v * kernel[k + radius];
        }
      }
    grid->setZero();
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        const double v = tmp(ix, iy);
        if (v == 0.0) continue;
        for (int k = -radius; k <= radius; ++k) {
          const int jy = iy + k;
          if (jy >= 0 && jy < n) (*grid)(ix, jy) += v * kernel[k + radius];
        }
      }
  }
  const double total = grid->sum();
  if (total > 0.0) *grid /= total;
}

}  // namespace

std::map<std::string, AffordanceMap> estimate_maps_from_records(
    const HumanRecords& records, const std::vector<std::string>& categories,
    const AffordanceParams& params, std::vector<std::string>* warnings) {
  const int n =
      static_cast<int>(std::round(2.0 * params.extent / params.resolution));
  std::map<std::string, AffordanceMap> maps;
  for (const auto& category : categories) {
    AffordanceMap map;
    map.category = category;
    map.extent = params.extent;
    map.resolution = params.resolution;
    map.smoothing = params.smoothing_sigma;
    map.grid = Grid::Zero(n, n);

    const auto it = records.find(category);
    const bool empty = it == records.end() || it->second.empty();
    if (empty) {
      map.grid.setConstant(1.0 / (n * n));
      if (warnings)
        warnings->push_back("affordance: no human positions for category '" +
                            category + "', using uniform map");
    } else {
      for (const auto& local : it->second) {
        int ix = 0, iy = 0;
        if (map.cell_of(local, &ix, &iy)) map.grid(ix, iy) += 1.0;
      }
      smooth_and_normalize(&map.grid,
                           params.smoothing_sigma / params.resolution);
    }
    maps.emplace(category, std::move(map));
  }
  return maps;
}

std::map<std::string, AffordanceMap> estimate_maps(
    const std::vector<SceneLayout>& corpus, const AffordanceParams& params,
    std::vector<std::string>* warnings) {
  if (corpus.empty()) throw Error("estimate_maps: empty corpus");
  const HumanRecords records = collect_human_records(corpus, params);
  std::vector<std::string> categories;
  for (const auto& scene : corpus) {
    for (const auto& f : scene.furniture) categories.push_back(f.category);
    for (const auto& o : scene.supported_objects)
      categories.push_back(o.category);
  }
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()),
                   categories.end());
  return estimate_maps_from_records(records, categories, params, warnings);
}

double human_prob(const AffordanceMap& map, const Vec2& human_world,
                  const ObjectInstance& obj, double eps_aff) {
  const Vec2 local = world_to_object(obj, human_world);
  int ix = 0, iy = 0;
  if (!map.cell_of(local, &ix, &iy)) return eps_aff;
  const double cell_area = map.resolution * map.resolution;
  return map.grid(ix, iy) / cell_area;
}

std::vector<Vec2> sample_humans(const AffordanceMap& map,
                                const ObjectInstance& obj, int n,
                                RandomStream& rng) {
  if (n < 1) throw Error("sample_humans: n must be >= 1");
  const int side = map.cells_per_side();
  const double total = map.grid.sum();
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform() * total;
    double acc = 0.0;
    int ix = side - 1, iy = side - 1;
    bool found = false;
    for (int i = 0; i < side && !found; ++i)
      for (int j = 0; j < side; ++j) {
        acc += map.grid(i, j);
        if (u < acc) {
          ix = i;
          iy = j;
          found = true;
          break;
        }
      }
    const double jx = rng.uniform();
    const double jy = rng.uniform();
    const int half = side / 2;
    const Vec2 local((ix - half + jx) * map.resolution,
                     (iy - half + jy) * map.resolution);
    out.push_back(object_to_world(obj, local));
  }
  return out;
}

}  // namespace scenegen::affordance
