#include "camcrew/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace camcrew {

double CameraConfig::focal() const {
  return (width / 2.0) / std::tan(hfov / 2.0);
}

ImageBox ImageBox::inflated(double frac) const {
  ImageBox b = *this;
  b.x -= frac * w;
  b.y -= frac * h;
  b.w = w * (1.0 + 2.0 * frac);
  b.h = h * (1.0 + 2.0 * frac);
  return b;
}

std::optional<ImageBox> ImageBox::clipped(double frame_w, double frame_h) const {
  const double x0 = std::max(x, 0.0);
  const double y0 = std::max(y, 0.0);
  const double x1 = std::min(right(), frame_w);
  const double y1 = std::min(bottom(), frame_h);
  if (x1 - x0 <= 0.0 || y1 - y0 <= 0.0) return std::nullopt;
  ImageBox b = *this;
  b.x = x0;
  b.y = y0;
  b.w = x1 - x0;
  b.h = y1 - y0;
  return b;
}

double intersection_area(const ImageBox& a, const ImageBox& b) {
  const double w = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const ImageBox& a, const ImageBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

// Index of the trajectory segment containing t; waypoints.size() >= 2 and
// t inside the covered range.
std::size_t segment_index(const std::vector<Waypoint>& wp, double t) {
  std::size_t lo = 0;
  std::size_t hi = wp.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (wp[mid].t <= t) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace

Vec2 actor_position(const Actor& actor, double t) {
  const auto& wp = actor.waypoints;
  if (wp.empty()) throw std::out_of_range("actor '" + actor.id + "' has no waypoints");
  if (t < wp.front().t || t > wp.back().t) {
    throw std::out_of_range("actor '" + actor.id + "': t outside trajectory range");
  }
  if (wp.size() == 1) return wp.front().pos;
  const std::size_t i = segment_index(wp, t);
  const Waypoint& a = wp[i];
  const Waypoint& b = wp[i + 1];
  const double alpha = (t - a.t) / (b.t - a.t);
  return a.pos + alpha * (b.pos - a.pos);
}

Vec2 actor_velocity(const Actor& actor, double t) {
  const auto& wp = actor.waypoints;
  if (wp.size() < 2) return {0.0, 0.0};
  if (t < wp.front().t || t > wp.back().t) {
    throw std::out_of_range("actor '" + actor.id + "': t outside trajectory range");
  }
  const std::size_t i = segment_index(wp, t);
  const Waypoint& a = wp[i];
  const Waypoint& b = wp[i + 1];
  return (1.0 / (b.t - a.t)) * (b.pos - a.pos);
}

bool visible(const Floorplan& plan, const CameraConfig& cam, Vec2 point) {
  const Vec2 r = point - cam.position;
  const double d = norm(r);
  if (d < 1e-12) return true;

  const double offset = wrap_angle(std::atan2(r.y, r.x) - cam.yaw);
  if (std::fabs(offset) > cam.hfov / 2.0) return false;

  for (const Segment& wall : plan.walls) {
    Vec2 hit;
    if (!open_segment_hits(cam.position, point, wall, &hit)) continue;
    bool through_door = false;
    for (const Segment& door : plan.doors) {
      if (point_on_segment(hit, door, 1e-6)) {
        through_door = true;
        break;
      }
    }
    if (!through_door) return false;
  }
  return true;
}

std::optional<ImageBox> project(const Floorplan& plan, const CameraConfig& cam,
                                const Actor& actor, double t) {
  const Vec2 pos = actor_position(actor, t);
  if (!visible(plan, cam, pos)) return std::nullopt;

  const Vec2 r = pos - cam.position;
  const double d = norm(r);
  if (d < kMinProjectDistance) return std::nullopt;

  const double f = cam.focal();
  const double offset = wrap_angle(std::atan2(r.y, r.x) - cam.yaw);
  const double u = cam.width / 2.0 + f * std::tan(offset);
  const double box_w = f * actor.body_width / d;
  const double v_feet = cam.height / 2.0 + f * cam.mount_height / d;
  const double v_head = cam.height / 2.0 - f * (actor.body_height - cam.mount_height) / d;

  ImageBox box;
  box.camera = cam.id;
  box.x = u - box_w / 2.0;
  box.y = v_head;
  box.w = box_w;
  box.h = v_feet - v_head;
  return box;
}

ImageBox upper_body(const ImageBox& full) {
  ImageBox b = full;
  b.h = 0.4 * full.h;
  return b;
}

}  // namespace camcrew
