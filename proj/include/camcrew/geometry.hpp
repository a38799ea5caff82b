#pragma once

#include <cmath>
#include <vector>

namespace camcrew {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

struct Segment {
  Vec2 a;
  Vec2 b;
};

// Normalizes an angle to (-pi, pi].
double wrap_angle(double a);

// Intersection of the open segment (p0,p1) with the closed segment (q0,q1).
// Parallel or collinear segments never intersect here.
bool open_segment_hits(Vec2 p0, Vec2 p1, const Segment& s, Vec2* where);

// True if p lies on s within tol (distance to the segment).
bool point_on_segment(Vec2 p, const Segment& s, double tol);

// Boundary counts as inside.
bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& poly);

bool polygon_is_convex(const std::vector<Vec2>& poly);

// Even-odd rule; arbitrary simple or non-simple polygons.
bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly);

}  // namespace camcrew
