#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "camcrew/geometry.hpp"

namespace camcrew {

// A polygon in one camera's image plane whose foreground fraction feeds one
// or more buckets, scaled by weight (level/second at full activity).
struct Zone {
  std::string id;
  std::string camera;
  std::vector<Vec2> polygon;  // pixel space
  double weight = 1.0;
  std::vector<std::string> buckets;
};

// Per-room accumulator. Fills from weighted zone activity, drains through a
// constant leak, and drives recording with an on/off hysteresis pair.
struct Bucket {
  std::string id;
  double level = 0.0;
  double theta_on = 1.0;
  double theta_off = 0.5;
  double leak = 0.1;        // level/second
  double level_max = 3.0;
  std::vector<std::string> cameras;  // recorded while triggered
  bool recording = false;
};

struct SelectionState {
  std::vector<Bucket> buckets;  // sorted by id
  std::vector<Zone> zones;
  std::map<std::string, bool> camera_recording;  // OR of connected buckets
};

// One integration step: level' = clamp(level + (inflow - leak)*dt, 0, max);
// recording latches on at theta_on and releases below theta_off.
void bucket_step(Bucket& bucket, double inflow, double dt);

// Sum of weight * activity over every zone wired to the bucket.
double inflow_for_bucket(const std::map<std::string, double>& zone_activities,
                         const std::vector<Zone>& zones, const std::string& bucket_id);

// Steps every bucket, then refreshes the per-camera record flags.
void selection_tick(SelectionState& state,
                    const std::map<std::string, double>& zone_activities, double dt);

// Time for an empty bucket to reach theta under constant net inflow;
// nullopt when it never does.
std::optional<double> time_to_threshold(double inflow, double leak, double theta);

}  // namespace camcrew
