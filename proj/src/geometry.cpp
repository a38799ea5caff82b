#include "camcrew/geometry.hpp"

#include <algorithm>

namespace camcrew {

double wrap_angle(double a) {
  constexpr double kPi = 3.14159265358979323846;
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

bool open_segment_hits(Vec2 p0, Vec2 p1, const Segment& s, Vec2* where) {
  const Vec2 r = p1 - p0;
  const Vec2 d = s.b - s.a;
  const double denom = cross(r, d);
  if (std::fabs(denom) < 1e-12) return false;
  const Vec2 qp = s.a - p0;
  const double t = cross(qp, d) / denom;  // along p0->p1
  const double u = cross(qp, r) / denom;  // along s.a->s.b
  const double eps = 1e-9;
  if (t <= eps || t >= 1.0 - eps) return false;
  if (u < -eps || u > 1.0 + eps) return false;
  if (where) *where = p0 + t * r;
  return true;
}

bool point_on_segment(Vec2 p, const Segment& s, double tol) {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 < 1e-24) return norm(p - s.a) <= tol;
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return norm(p - (s.a + t * d)) <= tol;
}

bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const double c = cross(b - a, p - a);
    if (std::fabs(c) < 1e-12) continue;  // on the edge line
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

bool polygon_is_convex(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const Vec2 c = poly[(i + 2) % n];
    if (norm(b - a) < 1e-12) return false;  // degenerate edge
    const double z = cross(b - a, c - b);
    if (std::fabs(z) < 1e-12) continue;
    const int s = z > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return sign != 0;
}

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  bool in = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      in = !in;
    }
  }
  return in;
}

}  // namespace camcrew
