#pragma once

#include <optional>
#include <string>
#include <vector>

#include "camcrew/geometry.hpp"

namespace camcrew {

// Projections closer than this collapse numerically; treat as not projectable.
constexpr double kMinProjectDistance = 0.2;

enum class CameraKind { kStatic, kOverview, kPtz };

struct CameraConfig {
  std::string id;
  CameraKind kind = CameraKind::kStatic;
  Vec2 position;                 // ground position, meters
  double mount_height = 1.6;     // meters above the floor
  double yaw = 0.0;              // radians, optical axis bearing
  double hfov = 1.2217;          // radians, horizontal field of view, in (0, pi)
  int width = 320;
  int height = 180;
  std::string paired_overview;   // kind == kPtz only
  // PTZ mechanical envelope (degrees / magnification), relative to yaw.
  double pan_range_deg = 90.0;
  double tilt_range_deg = 45.0;
  double zoom_max = 8.0;

  double focal() const;          // pixels, from width and hfov
};

struct Room {
  std::string name;
  std::vector<Vec2> polygon;     // convex, counter- or clockwise
};

struct Floorplan {
  std::vector<Room> rooms;
  std::vector<Segment> walls;
  std::vector<Segment> doors;    // gaps in walls; each lies on a wall
};

struct Waypoint {
  double t = 0.0;                // seconds
  Vec2 pos;
};

struct Actor {
  std::string id;
  double body_height = 1.75;     // meters
  double body_width = 0.5;
  double eye_height_fraction = 0.94;
  std::vector<Waypoint> waypoints;  // strictly increasing times
};

// Axis-aligned rectangle in a camera's pixel coordinates, (x,y) top-left.
// Continuous-valued; may extend past the frame until clipped.
struct ImageBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  std::string camera;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  Vec2 center() const { return {x + w / 2.0, y + h / 2.0}; }
  double area() const { return w * h; }
  ImageBox inflated(double frac) const;
  std::optional<ImageBox> clipped(double frame_w, double frame_h) const;
};

double intersection_area(const ImageBox& a, const ImageBox& b);
double iou(const ImageBox& a, const ImageBox& b);

struct World {
  Floorplan floorplan;
  std::vector<CameraConfig> cameras;  // sorted by id
  std::vector<Actor> actors;          // sorted by id
};

// Piecewise-linear trajectory playback. Throws std::out_of_range outside
// [first, last] waypoint time.
Vec2 actor_position(const Actor& actor, double t);

// Velocity of the trajectory segment active at t (right-continuous at
// waypoints); {0,0} when stationary.
Vec2 actor_velocity(const Actor& actor, double t);

// Line of sight on the ground plane: point must lie inside the horizontal
// FOV wedge and the open camera->point segment must cross no wall, where
// crossings through a door gap do not block.
bool visible(const Floorplan& plan, const CameraConfig& cam, Vec2 point);

// Pinhole projection of the actor's full-body rectangle. Absent when the
// actor is not visible or closer than kMinProjectDistance.
std::optional<ImageBox> project(const Floorplan& plan, const CameraConfig& cam,
                                const Actor& actor, double t);

// Upper 40% of a full-body box.
ImageBox upper_body(const ImageBox& full);

}  // namespace camcrew
