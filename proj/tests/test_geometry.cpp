#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "scenegen/scene.hpp"

using namespace scenegen;

namespace {

// Monte-Carlo oracle: overlap volume by point membership, independent of
// the polygon-clipping path.
double overlap_volume_oracle(const ObjectInstance& a, const ObjectInstance& b,
                             int samples, std::uint64_t seed) {
  const OrientedRect ra = footprint_rect(a);
  const OrientedRect rb = footprint_rect(b);
  // Bounding box around a's footprint; a point must lie in both rects.
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const auto& c : ra.corners()) {
    lo_x = std::min(lo_x, c.x());
    hi_x = std::max(hi_x, c.x());
    lo_y = std::min(lo_y, c.y());
    hi_y = std::max(hi_y, c.y());
  }
  RandomStream rng(seed);
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec2 p(rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y));
    if (ra.contains(p) && rb.contains(p)) ++hits;
  }
  const double area = (hi_x - lo_x) * (hi_y - lo_y) *
                      static_cast<double>(hits) / samples;
  const double z_lo = std::max(a.position.z(), b.position.z());
  const double z_hi =
      std::min(a.position.z() + a.size.z(), b.position.z() + b.size.z());
  return area * std::max(0.0, z_hi - z_lo);
}

ObjectInstance random_box(RandomStream& rng) {
  ObjectInstance obj;
  obj.category = "box";
  obj.size = Vec3(rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0),
                  rng.uniform(0.2, 2.0));
  obj.position = Vec3(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                      rng.uniform(-1.0, 1.0));
  obj.yaw = rng.uniform(0.0, kTwoPi);
  return obj;
}

}  // namespace

TEST_CASE("footprint axis aligned") {
  const auto obj = fixtures::make_box("b", Vec3(2, 1, 1), Vec3(0, 0, 0), 0.0);
  const auto corners = footprint(obj);
  CHECK(corners[0].isApprox(Vec2(1, 0.5), 1e-12));
  CHECK(corners[1].isApprox(Vec2(-1, 0.5), 1e-12));
  CHECK(corners[2].isApprox(Vec2(-1, -0.5), 1e-12));
  CHECK(corners[3].isApprox(Vec2(1, -0.5), 1e-12));
}

TEST_CASE("footprint quarter turn swaps extents") {
  const auto obj =
      fixtures::make_box("b", Vec3(2, 1, 1), Vec3(0, 0, 0), kPi / 2);
  for (const auto& c : footprint(obj)) {
    CHECK(std::abs(std::abs(c.x()) - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(c.y()) - 1.0) < 1e-12);
  }
}

TEST_CASE("footprint at 45 degrees puts corners on the axes") {
  const auto obj =
      fixtures::make_box("b", Vec3(1, 1, 1), Vec3(0, 0, 0), kPi / 4);
  const double r = std::sqrt(2.0) / 2.0;
  for (const auto& c : footprint(obj)) {
    CHECK(c.norm() == doctest::Approx(r).epsilon(1e-12));
    CHECK(std::min(std::abs(c.x()), std::abs(c.y())) < 1e-12);
  }
}

TEST_CASE("footprint corners are counter-clockwise") {
  RandomStream rng(41);
  for (int i = 0; i < 200; ++i) {
    const auto obj = random_box(rng);
    const auto corners = footprint(obj);
    CHECK(polygon_area(corners) > 0.0);
  }
}

TEST_CASE("overlap of identical unit cubes is their volume") {
  const auto a = fixtures::make_box("b", Vec3(1, 1, 1), Vec3(0, 0, 0));
  CHECK(overlap_volume(a, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("overlap of half-offset unit cubes") {
  const auto a = fixtures::make_box("b", Vec3(1, 1, 1), Vec3(0, 0, 0));
  const auto b = fixtures::make_box("b", Vec3(1, 1, 1), Vec3(0.5, 0, 0));
  CHECK(overlap_volume(a, b) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("overlap of square vs its 45-degree rotation") {
  const auto a = fixtures::make_box("b", Vec3(1, 1, 1), Vec3(0, 0, 0), 0.0);
  const auto b =
      fixtures::make_box("b", Vec3(1, 1, 1), Vec3(0, 0, 0), kPi / 4);
  const double got = overlap_volume(a, b);
  const double oracle = overlap_volume_oracle(a, b, 10'000'000, 7);
  CHECK(std::abs(got - oracle) < 1e-3);
  CHECK(got == doctest::Approx(0.8284).epsilon(1e-3));
}

TEST_CASE("overlap agrees with the point-membership oracle on random boxes") {
  RandomStream rng(101);
  for (int i = 0; i < 10; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const double got = overlap_volume(a, b);
    const double oracle = overlap_volume_oracle(a, b, 400'000, 1000 + i);
    CHECK(std::abs(got - oracle) < 0.02 * std::max(1.0, oracle));
  }
}

TEST_CASE("overlap is symmetric") {
  RandomStream rng(42);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const double ab = overlap_volume(a, b);
    const double ba = overlap_volume(b, a);
    CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, std::abs(ab)));
  }
}

TEST_CASE("self overlap equals volume") {
  RandomStream rng(43);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_box(rng);
    const double v = a.size.prod();
    CHECK(overlap_volume(a, a) == doctest::Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("overlap is invariant under a common rigid transform") {
  RandomStream rng(44);
  for (int i = 0; i < 50; ++i) {
    auto a = random_box(rng);
    auto b = random_box(rng);
    const double base = overlap_volume(a, b);
    const double phi = rng.uniform(0.0, kTwoPi);
    const Vec2 t(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
    const Eigen::Matrix2d r = yaw_rotation(phi);
    for (ObjectInstance* obj : {&a, &b}) {
      const Vec2 p = r * Vec2(obj->position.x(), obj->position.y()) + t;
      obj->position.x() = p.x();
      obj->position.y() = p.y();
      obj->yaw = wrap_angle(obj->yaw + phi);
    }
    CHECK(overlap_volume(a, b) == doctest::Approx(base).epsilon(1e-6));
  }
}

TEST_CASE("nearest wall: side wall with facing across it") {
  Room room;
  room.size = Vec3(10, 10, 3);
  const auto obj = fixtures::make_box("b", Vec3(1, 1, 1), Vec3(1, 5, 0), 0.0);
  const auto info = nearest_wall(obj, room);
  CHECK(info.wall == 0);
  CHECK(info.distance == doctest::Approx(1.0));
  CHECK(info.rel_orientation == doctest::Approx(-kPi / 2).epsilon(1e-12));
}

TEST_CASE("nearest wall: room center ties break in fixed order") {
  Room room;
  room.size = Vec3(10, 10, 3);
  const auto obj = fixtures::make_box("b", Vec3(1, 1, 1), Vec3(5, 5, 0));
  const auto info = nearest_wall(obj, room);
  CHECK(info.wall == 0);  // -x first
  CHECK(info.distance == doctest::Approx(5.0));
}

TEST_CASE("nearest wall: aligned facing gives zero relative orientation") {
  Room room;
  room.size = Vec3(10, 10, 3);
  // Nearest wall is -x with inward normal +x; yaw pi/2 faces (1, 0).
  const auto obj =
      fixtures::make_box("b", Vec3(1, 1, 1), Vec3(1, 5, 0), kPi / 2);
  CHECK(nearest_wall(obj, room).rel_orientation ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nearest wall rejects centers outside the room") {
  Room room;
  room.size = Vec3(10, 10, 3);
  const auto obj = fixtures::make_box("b", Vec3(1, 1, 1), Vec3(-1, 5, 0));
  CHECK_THROWS_AS(nearest_wall(obj, room), Error);
}

TEST_CASE("nearest wall distance is bounded by half the room extent") {
  Room room;
  room.size = Vec3(8, 6, 3);
  RandomStream rng(45);
  for (int i = 0; i < 200; ++i) {
    const auto obj = fixtures::make_box(
        "b", Vec3(1, 1, 1),
        Vec3(rng.uniform(0.0, 8.0), rng.uniform(0.0, 6.0), 0));
    CHECK(nearest_wall(obj, room).distance <= 3.0 + 1e-12);
  }
}

TEST_CASE("validate: empty room has no violations") {
  CHECK(validate(fixtures::empty_scene()).empty());
}

TEST_CASE("validate: center outside the room") {
  auto scene = fixtures::empty_scene();
  scene.furniture.push_back(
      fixtures::make_box("bed", Vec3(1, 1, 1), Vec3(7, 2, 0)));
  const auto violations = validate(scene);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("out of room bounds") != std::string::npos);
}

TEST_CASE("validate: dangling support address") {
  auto scene = fixtures::empty_scene();
  auto lamp = fixtures::make_box("lamp", Vec3(0.2, 0.2, 0.4), Vec3(2, 2, 0));
  lamp.address = 3;  // no furniture at all
  scene.supported_objects.push_back(lamp);
  const auto violations = validate(scene);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("dangling") != std::string::npos);
}

TEST_CASE("out-of-room volume") {
  Room room;
  room.size = Vec3(10, 10, 3);
  const auto inside = fixtures::make_box("b", Vec3(1, 1, 1), Vec3(5, 5, 0));
  CHECK(out_of_room_volume(inside, room) == doctest::Approx(0.0));
  // Centered on the corner: three quarters of the footprint outside.
  const auto corner = fixtures::make_box("b", Vec3(1, 1, 2), Vec3(0, 0, 0));
  CHECK(out_of_room_volume(corner, room) ==
        doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_angle(kTwoPi - 0.01 + 0.02) ==
        doctest::Approx(0.01).epsilon(1e-9));
  CHECK(wrap_angle(-0.1) == doctest::Approx(kTwoPi - 0.1));
  CHECK(wrap_signed(kPi) == doctest::Approx(kPi));
  CHECK(wrap_signed(kPi + 0.1) == doctest::Approx(-kPi + 0.1));
}
