#include "scenegen/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace scenegen {

double wrap_angle(double theta) {
  double w = theta - kTwoPi * std::floor(theta / kTwoPi);
  if (w >= kTwoPi) w -= kTwoPi;
  if (w < 0.0) w += kTwoPi;
  return w;
}

double wrap_signed(double theta) {
  double w = wrap_angle(theta);
  if (w > kPi) w -= kTwoPi;
  return w;
}

Vec2 facing_direction(double yaw) { return Vec2(std::sin(yaw), std::cos(yaw)); }

Eigen::Matrix2d yaw_rotation(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return r;
}

double signed_angle(const Vec2& from, const Vec2& to) {
  const double cross = from.x() * to.y() - from.y() * to.x();
  const double dot = from.dot(to);
  double a = std::atan2(cross, dot);
  if (a <= -kPi) a = kPi;
  return a;
}

double stable_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

std::array<Vec2, 4> OrientedRect::corners() const {
  const Eigen::Matrix2d r = yaw_rotation(yaw);
  const Vec2 ex = r * Vec2(half.x(), 0.0);
  const Vec2 ey = r * Vec2(0.0, half.y());
  return {center + ex + ey, center - ex + ey, center - ex - ey,
          center + ex - ey};
}

bool OrientedRect::contains(const Vec2& p, double inflate) const {
  const Vec2 local = yaw_rotation(yaw).transpose() * (p - center);
  return std::abs(local.x()) <= half.x() + inflate &&
         std::abs(local.y()) <= half.y() + inflate;
}

bool OrientedRect::intersects_segment(const Vec2& p, const Vec2& q,
                                      double inflate) const {
  const Eigen::Matrix2d rt = yaw_rotation(yaw).transpose();
  const Vec2 a = rt * (p - center);
  const Vec2 b = rt * (q - center);
  const Vec2 ext = half + Vec2(inflate, inflate);
  const Vec2 d = b - a;
  double t0 = 0.0;
  double t1 = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    if (std::abs(d[axis]) < 1e-15) {
      if (a[axis] < -ext[axis] || a[axis] > ext[axis]) return false;
    } else {
      const double inv = 1.0 / d[axis];
      double ta = (-ext[axis] - a[axis]) * inv;
      double tb = (ext[axis] - a[axis]) * inv;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
  }
  return true;
}

double polygon_area(std::span<const Vec2> poly) {
  if (poly.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    acc += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * acc;
}

namespace {

Vec2 line_intersection(const Vec2& p1, const Vec2& p2, const Vec2& a,
                       const Vec2& b) {
  const Vec2 d = p2 - p1;
  const Vec2 e = b - a;
  const double denom = e.x() * d.y() - e.y() * d.x();
  if (std::abs(denom) < 1e-30) return p1;
  const double t = (e.x() * (a.y() - p1.y()) - e.y() * (a.x() - p1.x())) / denom;
  return p1 + t * d;
}

}  // namespace

std::vector<Vec2> clip_convex(std::span<const Vec2> subject,
                              std::span<const Vec2> clipper) {
  std::vector<Vec2> poly(subject.begin(), subject.end());
  std::vector<Vec2> next;
  for (std::size_t i = 0; i < clipper.size() && !poly.empty(); ++i) {
    const Vec2& a = clipper[i];
    const Vec2& b = clipper[(i + 1) % clipper.size()];
    const Vec2 edge = b - a;
    next.clear();
    for (std::size_t j = 0; j < poly.size(); ++j) {
      const Vec2& prev = poly[(j + poly.size() - 1) % poly.size()];
      const Vec2& cur = poly[j];
      const double side_prev =
          edge.x() * (prev.y() - a.y()) - edge.y() * (prev.x() - a.x());
      const double side_cur =
          edge.x() * (cur.y() - a.y()) - edge.y() * (cur.x() - a.x());
      const bool in_prev = side_prev >= 0.0;
      const bool in_cur = side_cur >= 0.0;
      if (in_cur) {
        if (!in_prev) next.push_back(line_intersection(prev, cur, a, b));
        next.push_back(cur);
      } else if (in_prev) {
        next.push_back(line_intersection(prev, cur, a, b));
      }
    }
    poly = next;
  }
  return poly;
}

}  // namespace scenegen
