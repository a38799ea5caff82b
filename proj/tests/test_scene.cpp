#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "camcrew/rng.hpp"
#include "camcrew/scene.hpp"

using namespace camcrew;

namespace {

Actor make_actor(std::vector<Waypoint> wps) {
  Actor a;
  a.id = "walker";
  a.waypoints = std::move(wps);
  return a;
}

// Two rooms side by side, shared wall at x=4 with a 1 m door gap.
Floorplan two_room_plan() {
  Floorplan plan;
  plan.rooms.push_back({"a", {{0, 0}, {4, 0}, {4, 4}, {0, 4}}});
  plan.rooms.push_back({"b", {{4, 0}, {8, 0}, {8, 4}, {4, 4}}});
  plan.walls.push_back({{4, 0}, {4, 4}});
  plan.doors.push_back({{4, 1.5}, {4, 2.5}});
  return plan;
}

CameraConfig make_camera(Vec2 pos, double yaw_deg, double hfov_deg = 90.0) {
  CameraConfig cam;
  cam.id = "cam";
  cam.position = pos;
  cam.yaw = yaw_deg * M_PI / 180.0;
  cam.hfov = hfov_deg * M_PI / 180.0;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

}  // namespace

TEST_CASE("actor_position at waypoints and between them") {
  const Actor a = make_actor({{0, {0, 0}}, {10, {10, 0}}});
  CHECK(actor_position(a, 0).x == doctest::Approx(0));
  CHECK(actor_position(a, 0).y == doctest::Approx(0));
  CHECK(actor_position(a, 5).x == doctest::Approx(5));
  CHECK(actor_position(a, 5).y == doctest::Approx(0));
  CHECK(actor_position(a, 10).x == doctest::Approx(10));
}

TEST_CASE("actor_position interpolates the active segment") {
  // Second segment runs (2,2)->(2,6) over t in [4,8]; t=6 lands at (2,4).
  const Actor a = make_actor({{0, {0, 0}}, {4, {2, 2}}, {8, {2, 6}}});
  const Vec2 p = actor_position(a, 6);
  CHECK(p.x == doctest::Approx(2));
  CHECK(p.y == doctest::Approx(4));
}

TEST_CASE("actor_position rejects out-of-range times") {
  const Actor a = make_actor({{0, {0, 0}}, {10, {10, 0}}});
  CHECK_THROWS_AS(actor_position(a, -0.1), std::out_of_range);
  CHECK_THROWS_AS(actor_position(a, 10.1), std::out_of_range);
}

TEST_CASE("actor_position is Lipschitz in the max segment speed") {
  Rng rng(7);
  Actor a;
  a.id = "r";
  double t = 0.0;
  for (int i = 0; i < 12; ++i) {
    a.waypoints.push_back({t, {rng.next_range(0, 10), rng.next_range(0, 10)}});
    t += rng.next_range(0.5, 3.0);
  }
  double v_max = 0.0;
  for (std::size_t i = 1; i < a.waypoints.size(); ++i) {
    const double dt = a.waypoints[i].t - a.waypoints[i - 1].t;
    v_max = std::max(v_max, norm(a.waypoints[i].pos - a.waypoints[i - 1].pos) / dt);
  }
  const double t_end = a.waypoints.back().t;
  for (int i = 0; i < 500; ++i) {
    const double t0 = rng.next_range(0, t_end - 0.05);
    const double delta = rng.next_range(0, std::min(0.05, t_end - t0));
    const double moved = norm(actor_position(a, t0 + delta) - actor_position(a, t0));
    CHECK(moved <= v_max * delta + 1e-9);
  }
}

TEST_CASE("visible respects the FOV wedge") {
  Floorplan empty;
  const CameraConfig cam = make_camera({0, 0}, 0);
  CHECK(visible(empty, cam, {5, 0}));
  CHECK(visible(empty, cam, {5, 4.9}));        // ~44 degrees off-axis
  CHECK_FALSE(visible(empty, cam, {-5, 0}));   // behind
  CHECK_FALSE(visible(empty, cam, {0.1, 5}));  // ~89 degrees off-axis
}

TEST_CASE("visible passes through door gaps and not through walls") {
  const Floorplan plan = two_room_plan();
  const CameraConfig cam = make_camera({1, 2}, 0);
  // Straight through the gap: crossing point (4,2) is inside the door.
  CHECK(visible(plan, cam, {6, 2}));
  // Crossing point (4,2.9) is wall, not door.
  CHECK_FALSE(visible(plan, cam, {6, 3.5}));
  // Same room, no wall crossed.
  CHECK(visible(plan, cam, {3, 3}));
}

TEST_CASE("project centers an on-axis actor and scales with 1/distance") {
  Floorplan empty;
  const CameraConfig cam = make_camera({0, 0}, 0);
  Actor near_a = make_actor({{0, {4, 0}}, {1, {4, 0.001}}});
  Actor far_a = make_actor({{0, {8, 0}}, {1, {8, 0.001}}});
  near_a.body_width = 0.5;
  far_a.body_width = 0.5;

  const auto b_near = project(empty, cam, near_a, 0);
  const auto b_far = project(empty, cam, far_a, 0);
  REQUIRE(b_near.has_value());
  REQUIRE(b_far.has_value());
  CHECK(b_near->center().x == doctest::Approx(320));
  CHECK(b_far->center().x == doctest::Approx(320));
  CHECK(b_near->w == doctest::Approx(2 * b_far->w));
}

TEST_CASE("project horizontal mapping follows the tangent") {
  Floorplan empty;
  const CameraConfig cam = make_camera({0, 0}, 0, 90.0);  // f = 320
  // Bearing atan(0.5) = 26.565 degrees puts the center at 320 + 320*0.5.
  const Actor a = make_actor({{0, {4, 2}}, {1, {4, 2.001}}});
  const auto box = project(empty, cam, a, 0);
  REQUIRE(box.has_value());
  CHECK(box->center().x == doctest::Approx(480).epsilon(1e-6));
}

TEST_CASE("project vertical extent spans feet to head") {
  Floorplan empty;
  CameraConfig cam = make_camera({0, 0}, 0);
  cam.mount_height = 1.6;
  Actor a = make_actor({{0, {4, 0}}, {1, {4, 0.001}}});
  a.body_height = 1.75;
  const auto box = project(empty, cam, a, 0);
  REQUIRE(box.has_value());
  const double f = cam.focal();
  CHECK(box->bottom() == doctest::Approx(240 + f * 1.6 / 4.0));
  CHECK(box->y == doctest::Approx(240 - f * (1.75 - 1.6) / 4.0));
}

TEST_CASE("project is absent exactly when invisible or too close") {
  const Floorplan plan = two_room_plan();
  const CameraConfig cam = make_camera({1, 2}, 0);
  const Actor hidden = make_actor({{0, {6, 3.5}}, {1, {6, 3.5001}}});
  CHECK_FALSE(project(plan, cam, hidden, 0).has_value());
  const Actor touching = make_actor({{0, {1.1, 2}}, {1, {1.1001, 2}}});
  CHECK_FALSE(project(plan, cam, touching, 0).has_value());  // d = 0.1 < minimum
  const Actor fine = make_actor({{0, {1.3, 2}}, {1, {1.3001, 2}}});
  CHECK(project(plan, cam, fine, 0).has_value());
}

TEST_CASE("projected width strictly decreases with distance") {
  Floorplan empty;
  const CameraConfig cam = make_camera({0, 0}, 0);
  double prev = 1e18;
  for (double d = 1.0; d < 12.0; d += 0.7) {
    const Actor a = make_actor({{0, {d, 0}}, {1, {d, 0.001}}});
    const auto box = project(empty, cam, a, 0);
    REQUIRE(box.has_value());
    CHECK(box->w < prev);
    prev = box->w;
  }
}

TEST_CASE("upper_body keeps the top 40 percent") {
  ImageBox full{10, 20, 30, 100, "c"};
  const ImageBox up = upper_body(full);
  CHECK(up.x == doctest::Approx(10));
  CHECK(up.y == doctest::Approx(20));
  CHECK(up.w == doctest::Approx(30));
  CHECK(up.h == doctest::Approx(40));
}

TEST_CASE("image box helpers: iou, inflate, clip") {
  ImageBox a{0, 0, 10, 10, ""};
  ImageBox b{5, 0, 10, 10, ""};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou(a, b) == doctest::Approx(50.0 / 150.0));
  const ImageBox big = a.inflated(0.5);
  CHECK(big.x == doctest::Approx(-5));
  CHECK(big.w == doctest::Approx(20));
  const auto clipped = big.clipped(12, 12);
  REQUIRE(clipped.has_value());
  CHECK(clipped->x == doctest::Approx(0));
  CHECK(clipped->right() == doctest::Approx(12));
  CHECK_FALSE(ImageBox{-10, -10, 5, 5, ""}.clipped(12, 12).has_value());
}
