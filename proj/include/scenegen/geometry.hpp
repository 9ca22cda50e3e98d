#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scenegen {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Grid = Eigen::ArrayXXd;

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Angle wrapped into [0, 2*pi).
double wrap_angle(double theta);

// Angle wrapped into (-pi, pi].
double wrap_signed(double theta);

// Facing convention: yaw 0 faces +y, so the facing vector is (sin, cos).
Vec2 facing_direction(double yaw);

// Local-to-world rotation consistent with the facing convention:
// yaw_rotation(yaw) * (0, 1) == facing_direction(yaw).
Eigen::Matrix2d yaw_rotation(double yaw);

// Signed angle from vector `from` to vector `to`, in (-pi, pi].
double signed_angle(const Vec2& from, const Vec2& to);

// Compensated (Neumaier) summation.
double stable_sum(std::span<const double> values);

// Rectangle with center, half-extents (hx, hy) in its own frame and yaw.
struct OrientedRect {
  Vec2 center = Vec2::Zero();
  Vec2 half = Vec2::Zero();
  double yaw = 0.0;

  // Counter-clockwise corners in world coordinates.
  std::array<Vec2, 4> corners() const;

  // Point membership with optional isotropic inflation of the extents.
  bool contains(const Vec2& p, double inflate = 0.0) const;

  // Segment [p, q] against the rectangle inflated by `inflate`.
  bool intersects_segment(const Vec2& p, const Vec2& q,
                          double inflate = 0.0) const;
};

// Signed polygon area (positive for counter-clockwise order).
double polygon_area(std::span<const Vec2> poly);

// Sutherland-Hodgman clip of a convex polygon by a convex CCW clipper.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject,
                              std::span<const Vec2> clipper);

}  // namespace scenegen
