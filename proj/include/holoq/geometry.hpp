#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

namespace holoq {

using Vec2 = Eigen::Vector2d;
using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

struct Disc {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
};

inline Eigen::Matrix2d rot2(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix2d m;
  m << c, -s, s, c;
  return m;
}

// Wrap an angle into (-pi, pi].
inline double normalize_phase(double a) {
  double r = std::remainder(a, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Signed angle from one direction to another, in [-pi, pi].
inline double signed_angle(const Vec2& from, const Vec2& to) {
  return std::atan2(cross2(from, to), from.dot(to));
}

inline double segment_point_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

inline bool segment_hits_disc(const Vec2& a, const Vec2& b, const Disc& d) {
  return segment_point_distance(a, b, d.center) <= d.radius;
}

}  // namespace holoq
