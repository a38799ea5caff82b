#include "doctest.h"

#include <fstream>

#include "camcrew/scenario.hpp"

using namespace camcrew;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kMinimal = R"(# smallest useful setup
[room]
name = studio
polygon = 0 0  8 0  8 6  0 6

[camera]
id = cam1
kind = static
position = 0.5 3
yaw_deg = 0
hfov_deg = 70
resolution = 320x180

[actor]
id = ann
waypoint = 0 4 3
waypoint = 60 5 3

[bucket]
id = studio_bucket
theta_on = 1.0
cameras = cam1

[zone]
id = floor
camera = cam1
polygon = 40 40  280 40  280 170  40 170
weight = 2.0
buckets = studio_bucket

[params]
duration = 60
tick = 0.1
seed = 9
)";

}  // namespace

TEST_CASE("minimal scenario parses with defaults applied") {
  const auto path = write_temp("camcrew_min.scn", kMinimal);
  const Scenario sc = load_scenario(path);
  CHECK(sc.world.cameras.size() == 1);
  CHECK(sc.world.actors.size() == 1);
  CHECK(sc.zones.size() == 1);
  REQUIRE(sc.buckets.size() == 1);
  // Derived defaults.
  CHECK(sc.buckets[0].theta_off == doctest::Approx(0.5));
  CHECK(sc.buckets[0].level_max == doctest::Approx(3.0));
  CHECK(sc.buckets[0].leak == doctest::Approx(0.1));
  CHECK(sc.bgs.alpha == doctest::Approx(0.02));
  CHECK(sc.bgs.tau == doctest::Approx(20.0));
  CHECK(sc.detect.min_area == 64);
  CHECK(sc.compose.width_margin == doctest::Approx(0.15));
  CHECK(sc.min_shot_s == doctest::Approx(6.0));
  CHECK(sc.hold_s == doctest::Approx(2.0));
  CHECK(sc.seed == 9);
  CHECK(sc.duration == doctest::Approx(60.0));
  std::filesystem::remove(path);
}

TEST_CASE("zone referencing an unknown bucket is a dangling reference") {
  std::string body = kMinimal;
  body += "\n[zone]\nid = bad\ncamera = cam1\npolygon = 0 0  10 0  10 10\nbuckets = ghost\n";
  const auto path = write_temp("camcrew_dangling.scn", body);
  CHECK_THROWS_WITH_AS(load_scenario(path),
                       doctest::Contains("unknown bucket 'ghost'"), ScenarioError);
  std::filesystem::remove(path);
}

TEST_CASE("duplicate camera ids are rejected") {
  std::string body = kMinimal;
  body += "\n[camera]\nid = cam1\nkind = static\nposition = 1 1\nresolution = 320x180\n";
  const auto path = write_temp("camcrew_dup.scn", body);
  CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("duplicate camera id"),
                       ScenarioError);
  std::filesystem::remove(path);
}

TEST_CASE("parse errors carry the line number") {
  const auto path = write_temp("camcrew_badline.scn", "[room]\nname = x\npolygon = 1 2 3\n");
  try {
    load_scenario(path);
    FAIL("expected a parse error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("unknown keys and sections are parse errors") {
  const auto path1 = write_temp("camcrew_badkey.scn", "[params]\nbogus = 1\n");
  CHECK_THROWS_AS(load_scenario(path1), ScenarioError);
  const auto path2 = write_temp("camcrew_badsec.scn", "[warp]\nx = 1\n");
  CHECK_THROWS_AS(load_scenario(path2), ScenarioError);
  std::filesystem::remove(path1);
  std::filesystem::remove(path2);
}

TEST_CASE("ptz cameras must pair with an existing overview") {
  std::string body = kMinimal;
  body += "\n[camera]\nid = mover\nkind = ptz\nposition = 1 1\nresolution = 320x180\noverview = cam1\n";
  const auto path = write_temp("camcrew_badptz.scn", body);
  // cam1 is static, not overview.
  CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("overview"), ScenarioError);
  std::filesystem::remove(path);
}

TEST_CASE("trajectories must cover the scenario duration") {
  std::string body = kMinimal;
  body += "\n[actor]\nid = shorty\nwaypoint = 0 1 1\nwaypoint = 30 2 2\n";
  const auto path = write_temp("camcrew_short.scn", body);
  CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("cover"), ScenarioError);
  std::filesystem::remove(path);
}

TEST_CASE("expect sections attach annotation intervals to buckets") {
  std::string body = kMinimal;
  body += "\n[expect]\nbucket = studio_bucket\ninterval = 0 12.5\ninterval = 20 30\n";
  const auto path = write_temp("camcrew_expect.scn", body);
  const Scenario sc = load_scenario(path);
  REQUIRE(sc.expected.count("studio_bucket"));
  REQUIRE(sc.expected.at("studio_bucket").size() == 2);
  CHECK(sc.expected.at("studio_bucket")[0].end == doctest::Approx(12.5));
  std::filesystem::remove(path);
}

TEST_CASE("overlapping expect intervals are rejected") {
  std::string body = kMinimal;
  body += "\n[expect]\nbucket = studio_bucket\ninterval = 0 20\ninterval = 10 30\n";
  const auto path = write_temp("camcrew_overlap.scn", body);
  CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("disjoint"), ScenarioError);
  std::filesystem::remove(path);
}

TEST_CASE("doors must lie on a wall") {
  std::string body = kMinimal;
  body += "\n[wall]\nsegment = 0 0  8 0\n[door]\nsegment = 2 3  3 3\n";
  const auto path = write_temp("camcrew_door.scn", body);
  CHECK_THROWS_WITH_AS(load_scenario(path), doctest::Contains("door"), ScenarioError);
  std::filesystem::remove(path);
}

TEST_CASE("params overrides reach every module") {
  std::string body = kMinimal;
  body += "\n[params]\nalpha = 0.05\ntau = 25\nmin_shot = 8\nhold = 3\niou_min = 0.6\n"
          "jitter = 1\ncal_grid = 4\n";
  const auto path = write_temp("camcrew_params.scn", body);
  const Scenario sc = load_scenario(path);
  CHECK(sc.bgs.alpha == doctest::Approx(0.05));
  CHECK(sc.bgs.tau == doctest::Approx(25.0));
  CHECK(sc.min_shot_s == doctest::Approx(8.0));
  CHECK(sc.hold_s == doctest::Approx(3.0));
  CHECK(sc.diff.iou_min == doctest::Approx(0.6));
  CHECK(sc.detect.jitter_px == doctest::Approx(1.0));
  CHECK(sc.calib.grid == 4);
  std::filesystem::remove(path);
}
