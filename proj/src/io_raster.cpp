#include <algorithm>
#include <cmath>
#include <fstream>

#include "scenegen/io.hpp"

namespace scenegen::io {

namespace {

int cells_for(double extent_m, double resolution) {
  return std::max(1, static_cast<int>(std::ceil(extent_m / resolution)));
}

}  // namespace

RasterImage rasterize_segmentation(const SceneLayout& scene,
                                   const LearnedModel& model,
                                   double resolution) {
  RasterImage img;
  img.width = cells_for(scene.room.size.x(), resolution);
  img.height = cells_for(scene.room.size.y(), resolution);
  img.meters_per_cell = resolution;
  img.cells.assign(static_cast<std::size_t>(img.width) * img.height, 0);

  struct Entry {
    const ObjectInstance* obj;
    OrientedRect rect;
    int index;
    double top;
  };
  std::vector<Entry> entries;
  auto add = [&](const ObjectInstance& obj) {
    const auto it = model.category_index.find(obj.category);
    const int index =
        it != model.category_index.end()
            ? std::min(it->second, 255)
            : 255;  // categories outside the model render as 255
    entries.push_back({&obj, footprint_rect(obj), index,
                       obj.position.z() + obj.size.z()});
  };
  for (const auto& f : scene.furniture) add(f);
  for (const auto& o : scene.supported_objects) add(o);

  for (int row = 0; row < img.height; ++row) {
    // Row 0 is the far (max y) side: top view with +y up.
    const double y = (img.height - row - 0.5) * resolution;
    for (int col = 0; col < img.width; ++col) {
      const double x = (col + 0.5) * resolution;
      const Vec2 p(x, y);
      int best_index = 0;
      double best_top = -1.0;
      for (const auto& e : entries) {
        if (!e.rect.contains(p)) continue;
        // Taller object wins; equal heights resolve by category order.
        if (e.top > best_top ||
            (e.top == best_top && e.index < best_index)) {
          best_top = e.top;
          best_index = e.index;
        }
      }
      img.cells[static_cast<std::size_t>(row) * img.width + col] =
          static_cast<std::uint8_t>(best_index);
    }
  }
  return img;
}

RasterImage rasterize_affordance(const SceneLayout& scene,
                                 const LearnedModel& model,
                                 double resolution) {
  RasterImage img;
  img.width = cells_for(scene.room.size.x(), resolution);
  img.height = cells_for(scene.room.size.y(), resolution);
  img.meters_per_cell = resolution;
  img.cells.assign(static_cast<std::size_t>(img.width) * img.height, 0);

  Grid acc = Grid::Zero(img.width, img.height);
  auto splat = [&](const ObjectInstance& obj) {
    const auto& map = model.affordance_for(obj.category);
    for (int col = 0; col < img.width; ++col)
      for (int row_y = 0; row_y < img.height; ++row_y) {
        const Vec2 world((col + 0.5) * resolution, (row_y + 0.5) * resolution);
        const Vec2 local = world_to_object(obj, world);
        int ix = 0, iy = 0;
        if (map.cell_of(local, &ix, &iy)) acc(col, row_y) += map.grid(ix, iy);
      }
  };
  for (const auto& f : scene.furniture) splat(f);
  for (const auto& o : scene.supported_objects) splat(o);

  const double peak = acc.maxCoeff();
  if (peak > 0.0) {
    for (int row = 0; row < img.height; ++row)
      for (int col = 0; col < img.width; ++col) {
        const double v = acc(col, img.height - row - 1) / peak;
        img.cells[static_cast<std::size_t>(row) * img.width + col] =
            static_cast<std::uint8_t>(std::lround(255.0 * v));
      }
  }
  return img;
}

RasterImage heatmap_to_raster(const planner::TrajectoryHeatmap& hm) {
  RasterImage img;
  img.width = static_cast<int>(hm.grid.rows());
  img.height = static_cast<int>(hm.grid.cols());
  img.meters_per_cell = hm.cell;
  img.cells.assign(static_cast<std::size_t>(img.width) * img.height, 0);
  const double peak = hm.empty ? 0.0 : hm.grid.maxCoeff();
  if (peak > 0.0)
    for (int row = 0; row < img.height; ++row)
      for (int col = 0; col < img.width; ++col)
        img.cells[static_cast<std::size_t>(row) * img.width + col] =
            static_cast<std::uint8_t>(std::lround(
                255.0 * hm.grid(col, img.height - row - 1) / peak));
  return img;
}

void write_pgm(const std::filesystem::path& path, const RasterImage& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.cells.data()),
            static_cast<std::streamsize>(image.cells.size()));
}

void write_map_pgm(const std::filesystem::path& path,
                   const affordance::AffordanceMap& map) {
  RasterImage img;
  const int n = map.cells_per_side();
  img.width = n;
  img.height = n;
  img.meters_per_cell = map.resolution;
  img.cells.assign(static_cast<std::size_t>(n) * n, 0);
  const double peak = map.grid.maxCoeff();
  if (peak > 0.0)
    for (int row = 0; row < n; ++row)
      for (int col = 0; col < n; ++col)
        img.cells[static_cast<std::size_t>(row) * n + col] =
            static_cast<std::uint8_t>(
                std::lround(255.0 * map.grid(col, n - row - 1) / peak));
  write_pgm(path, img);
}

namespace {

void require_same_geometry(const affordance::AffordanceMap& a,
                           const affordance::AffordanceMap& b) {
  if (a.grid.rows() != b.grid.rows() || a.grid.cols() != b.grid.cols() ||
      a.extent != b.extent || a.resolution != b.resolution)
    throw Error("affordance map geometry mismatch");
}

}  // namespace

double tv_distance(const affordance::AffordanceMap& a,
                   const affordance::AffordanceMap& b) {
  require_same_geometry(a, b);
  return 0.5 * (a.grid - b.grid).abs().sum();
}

double hellinger(const affordance::AffordanceMap& a,
                 const affordance::AffordanceMap& b) {
  require_same_geometry(a, b);
  const double sq = (a.grid.sqrt() - b.grid.sqrt()).square().sum();
  return std::sqrt(0.5 * sq);
}

}  // namespace scenegen::io
