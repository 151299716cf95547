#pragma once

#include <algorithm>
#include <cmath>

namespace cais::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

struct Segment {
  Vec2 a;
  Vec2 b;
};

inline double point_segment_distance(Vec2 p, const Segment& s) {
  const Vec2 ab = s.b - s.a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return dist(p, s.a);
  const double t = std::clamp(dot(p - s.a, ab) / len2, 0.0, 1.0);
  return dist(p, s.a + t * ab);
}

inline bool segments_intersect(const Segment& s, const Segment& t) {
  const Vec2 r = s.b - s.a;
  const Vec2 q = t.b - t.a;
  const double denom = cross(r, q);
  const Vec2 w = t.a - s.a;
  if (denom == 0.0) {
    // Parallel: only collinear overlap counts.
    if (cross(w, r) != 0.0) return false;
    const double rr = dot(r, r);
    if (rr == 0.0) return point_segment_distance(s.a, t) == 0.0;
    const double t0 = dot(w, r) / rr;
    const double t1 = dot(t.b - s.a, r) / rr;
    return std::max(t0, t1) >= 0.0 && std::min(t0, t1) <= 1.0;
  }
  const double u = cross(w, q) / denom;
  const double v = cross(w, r) / denom;
  return u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0;
}

inline double segment_segment_distance(const Segment& s, const Segment& t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                   point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 6.283185307179586476925;
  a = std::fmod(a, kTwoPi);
  if (a <= -kTwoPi / 2) a += kTwoPi;
  if (a > kTwoPi / 2) a -= kTwoPi;
  return a;
}

}  // namespace cais::geom
