#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "scenegen/planner.hpp"

using namespace scenegen;
using namespace scenegen::planner;

namespace {

Room square_room(double side) {
  Room room;
  room.size = Vec3(side, side, 3.0);
  room.scene_type = "room";
  return room;
}

// Dense 1 cm resampling of the polyline must clear every obstacle.
bool densely_collision_free(const Trajectory& traj,
                            const std::vector<OrientedRect>& obstacles,
                            double inflate) {
  for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
    const Vec2 a = traj.waypoints[i];
    const Vec2 b = traj.waypoints[i + 1];
    const double len = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.01)));
    for (int s = 0; s <= steps; ++s) {
      const Vec2 p = a + (static_cast<double>(s) / steps) * (b - a);
      for (const auto& r : obstacles)
        if (r.contains(p, inflate)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("birrt: empty room plan is found and collision free") {
  PlanProblem prob;
  prob.room = square_room(10.0);
  prob.start = Vec2(1, 1);
  prob.goal = Vec2(9, 9);
  PlannerParams params;
  RandomStream rng(31);
  const auto res = birrt(prob, params, rng);
  REQUIRE(res.status == PlanStatus::Found);
  const auto& wp = res.trajectory.waypoints;
  REQUIRE(wp.size() >= 2);
  CHECK((wp.front() - prob.start).norm() < 1e-9);
  CHECK((wp.back() - prob.goal).norm() < 1e-9);
  for (std::size_t i = 0; i + 1 < wp.size(); ++i)
    CHECK((wp[i + 1] - wp[i]).norm() <= params.step + 1e-9);
  CHECK(densely_collision_free(res.trajectory, prob.obstacles,
                               params.agent_radius));
}

TEST_CASE("birrt: coincident endpoints give a single waypoint") {
  PlanProblem prob;
  prob.room = square_room(10.0);
  prob.start = Vec2(4, 4);
  prob.goal = Vec2(4, 4);
  RandomStream rng(32);
  const auto res = birrt(prob, {}, rng);
  REQUIRE(res.status == PlanStatus::Found);
  CHECK(res.trajectory.waypoints.size() == 1);
}

TEST_CASE("birrt: bisected room has no path") {
  PlanProblem prob;
  prob.room = square_room(10.0);
  prob.start = Vec2(5, 1);
  prob.goal = Vec2(5, 9);
  OrientedRect wall;
  wall.center = Vec2(5, 5);
  wall.half = Vec2(6.0, 0.1);  // spans the full width
  prob.obstacles.push_back(wall);
  PlannerParams params;
  params.max_iters = 1500;
  RandomStream rng(33);
  CHECK(birrt(prob, params, rng).status == PlanStatus::NoPath);
}

TEST_CASE("birrt: endpoint inside an obstacle is an error, not a miss") {
  PlanProblem prob;
  prob.room = square_room(10.0);
  prob.start = Vec2(5, 5);
  prob.goal = Vec2(9, 9);
  OrientedRect block;
  block.center = Vec2(5, 5);
  block.half = Vec2(0.5, 0.5);
  prob.obstacles.push_back(block);
  RandomStream rng(34);
  CHECK(birrt(prob, {}, rng).status == PlanStatus::InvalidEndpoint);
}

TEST_CASE("birrt: plans around obstacles stay collision free") {
  PlannerParams params;
  RandomStream rng(35);
  int found = 0;
  for (int trial = 0; trial < 20; ++trial) {
    PlanProblem prob;
    prob.room = square_room(10.0);
    for (int k = 0; k < 4; ++k) {
      OrientedRect obstacle;
      obstacle.center =
          Vec2(rng.uniform(2.0, 8.0), rng.uniform(2.0, 8.0));
      obstacle.half = Vec2(rng.uniform(0.3, 0.8), rng.uniform(0.3, 0.8));
      obstacle.yaw = rng.uniform(0.0, kTwoPi);
      prob.obstacles.push_back(obstacle);
    }
    prob.start = Vec2(0.5, 0.5);
    prob.goal = Vec2(9.5, 9.5);
    bool endpoint_free = true;
    for (const auto& r : prob.obstacles)
      if (r.contains(prob.start, params.agent_radius) ||
          r.contains(prob.goal, params.agent_radius))
        endpoint_free = false;
    if (!endpoint_free) continue;
    const auto res = birrt(prob, params, rng);
    if (res.status != PlanStatus::Found) continue;
    ++found;
    CHECK(densely_collision_free(res.trajectory, prob.obstacles,
                                 params.agent_radius));
  }
  CHECK(found >= 15);
}

TEST_CASE("activity heatmap: under two furniture pieces means empty") {
  auto scene = fixtures::empty_scene("room", Vec3(8, 8, 3));
  RandomStream rng(36);
  auto hm = activity_heatmap(scene, {}, rng);
  CHECK(hm.empty);
  CHECK(heatmap_entropy(hm) == 0.0);

  scene.furniture.push_back(
      fixtures::make_box("bed", Vec3(1.6, 2, 0.5), Vec3(4, 4, 0)));
  hm = activity_heatmap(scene, {}, rng);
  CHECK(hm.empty);
}

TEST_CASE("activity heatmap: corridor between two pieces carries the mass") {
  auto scene = fixtures::empty_scene("room", Vec3(10, 10, 3));
  scene.furniture.push_back(
      fixtures::make_box("a", Vec3(0.8, 0.8, 1), Vec3(2, 5, 0)));
  scene.furniture.push_back(
      fixtures::make_box("b", Vec3(0.8, 0.8, 1), Vec3(8, 5, 0)));
  RandomStream rng(37);
  const auto hm = activity_heatmap(scene, {}, rng);
  REQUIRE(!hm.empty);
  CHECK(hm.grid.sum() == doctest::Approx(1.0).epsilon(1e-9));

  // Mass within 1 m of the straight segment between the two centers.
  const Vec2 a(2, 5);
  const Vec2 b(8, 5);
  double near_mass = 0.0;
  for (Eigen::Index ix = 0; ix < hm.grid.rows(); ++ix)
    for (Eigen::Index iy = 0; iy < hm.grid.cols(); ++iy) {
      const Vec2 p((ix + 0.5) * hm.cell, (iy + 0.5) * hm.cell);
      const Vec2 d = b - a;
      const double t = std::clamp(d.dot(p - a) / d.squaredNorm(), 0.0, 1.0);
      if ((p - (a + t * d)).norm() <= 1.0) near_mass += hm.grid(ix, iy);
    }
  CHECK(near_mass >= 0.9);
}

TEST_CASE("activity heatmap: furniture order does not matter") {
  auto scene = fixtures::empty_scene("room", Vec3(9, 7, 3));
  scene.furniture.push_back(
      fixtures::make_box("bed", Vec3(1.6, 2, 0.5), Vec3(2, 2, 0), 0.4));
  scene.furniture.push_back(
      fixtures::make_box("desk", Vec3(1.2, 0.6, 0.75), Vec3(7, 5, 0), 1.2));
  scene.furniture.push_back(
      fixtures::make_box("chair", Vec3(0.45, 0.45, 0.9), Vec3(5, 3, 0), 2.0));

  auto permuted = scene;
  std::swap(permuted.furniture[0], permuted.furniture[2]);

  RandomStream rng1(38);
  RandomStream rng2(38);
  const auto h1 = activity_heatmap(scene, {}, rng1);
  const auto h2 = activity_heatmap(permuted, {}, rng2);
  REQUIRE(!h1.empty);
  CHECK((h1.grid == h2.grid).all());
}

TEST_CASE("activity heatmap: seeded reproducibility") {
  auto scene = fixtures::empty_scene("room", Vec3(9, 9, 3));
  scene.furniture.push_back(
      fixtures::make_box("a", Vec3(1, 1, 1), Vec3(2, 2, 0)));
  scene.furniture.push_back(
      fixtures::make_box("b", Vec3(1, 1, 1), Vec3(7, 7, 0)));
  RandomStream rng1(39);
  RandomStream rng2(39);
  const auto h1 = activity_heatmap(scene, {}, rng1);
  const auto h2 = activity_heatmap(scene, {}, rng2);
  CHECK((h1.grid == h2.grid).all());
}

TEST_CASE("heatmap entropy: closed forms") {
  TrajectoryHeatmap hm;
  hm.empty = false;

  hm.grid = Grid::Constant(40, 25, 1.0 / 1000.0);
  CHECK(std::abs(heatmap_entropy(hm) - std::log(1000.0)) <= 1e-12);

  hm.grid = Grid::Zero(10, 10);
  hm.grid(3, 4) = 1.0;
  CHECK(heatmap_entropy(hm) == 0.0);

  hm.grid = Grid::Zero(10, 10);
  hm.grid(0, 0) = 0.5;
  hm.grid(9, 9) = 0.5;
  CHECK(std::abs(heatmap_entropy(hm) - std::log(2.0)) <= 1e-12);
  CHECK(l_ent(hm) == -heatmap_entropy(hm));
}

TEST_CASE("heatmap entropy bounds") {
  RandomStream rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    TrajectoryHeatmap hm;
    hm.empty = false;
    hm.grid = Grid::Zero(12, 12);
    for (Eigen::Index i = 0; i < hm.grid.size(); ++i)
      hm.grid.data()[i] = rng.uniform();
    hm.grid /= hm.grid.sum();
    const double h = heatmap_entropy(hm);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(144.0) + 1e-12);
  }
}
