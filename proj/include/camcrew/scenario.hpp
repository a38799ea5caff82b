#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "camcrew/cinema.hpp"
#include "camcrew/detect.hpp"
#include "camcrew/scene.hpp"
#include "camcrew/selection.hpp"

namespace camcrew {

struct BgsParams {
  double alpha = 0.02;
  double tau = 20.0;
  int warmup = 50;
};

struct DetectParams {
  int min_area = 64;
  double margin_frac = 0.25;
  double jitter_px = 2.0;
  double p_miss = 0.02;
  double frontal_cone_deg = 30.0;
  double dedup_iou = 0.6;
};

struct SteadyParams {
  double window_s = 1.5;
  double eps_move = 0.01;
  double eps_size = 0.05;
};

struct CalibParams {
  int grid = 5;
  int zooms = 3;
  double zoom_min = 1.0;
  double zoom_max = 4.0;
};

struct ExpectedInterval {
  double start = 0.0;
  double end = 0.0;
};

// A full simulated setup: the world, the zone/bucket wiring, every tunable,
// and the ground-truth recording annotation used for scoring.
struct Scenario {
  World world;
  std::vector<Zone> zones;      // sorted by id
  std::vector<Bucket> buckets;  // sorted by id

  BgsParams bgs;
  DetectParams detect;
  ComposeParams compose;
  DiffParams diff;
  SteadyParams steady;
  CalibParams calib;
  double min_shot_s = 6.0;
  double hold_s = 2.0;

  double duration = 600.0;
  double tick = 0.1;
  std::uint64_t seed = 1;
  int channels = 8;
  std::int64_t bitrate = 102'000'000;

  std::map<std::string, std::vector<ExpectedInterval>> expected;  // by bucket id

  const CameraConfig* find_camera(const std::string& id) const;
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the line-oriented scenario format: [room] [wall] [door] [camera]
// [actor] [zone] [bucket] [params] [expect] sections of key=value pairs,
// '#' comments. Throws ScenarioError with file:line context on parse
// failures and dangling references.
Scenario load_scenario(const std::filesystem::path& path);

// Normalizes (sorts entities by id) and validates an in-memory scenario;
// load_scenario runs this, programmatic fixtures call it directly.
void validate_scenario(Scenario& scenario);

}  // namespace camcrew
