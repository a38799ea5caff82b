#include "camcrew/selection.hpp"

#include <algorithm>
#include <stdexcept>

namespace camcrew {

void bucket_step(Bucket& bucket, double inflow, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("bucket_step: dt must be positive");
  if (inflow < 0.0) throw std::invalid_argument("bucket_step: negative inflow");
  bucket.level = std::clamp(bucket.level + (inflow - bucket.leak) * dt, 0.0, bucket.level_max);
  if (bucket.level >= bucket.theta_on) {
    bucket.recording = true;
  } else if (bucket.level < bucket.theta_off) {
    bucket.recording = false;
  }
}

double inflow_for_bucket(const std::map<std::string, double>& zone_activities,
                         const std::vector<Zone>& zones, const std::string& bucket_id) {
  double inflow = 0.0;
  for (const Zone& zone : zones) {
    if (std::find(zone.buckets.begin(), zone.buckets.end(), bucket_id) == zone.buckets.end()) {
      continue;
    }
    const auto it = zone_activities.find(zone.id);
    if (it != zone_activities.end()) inflow += zone.weight * it->second;
  }
  return inflow;
}

void selection_tick(SelectionState& state,
                    const std::map<std::string, double>& zone_activities, double dt) {
  for (Bucket& bucket : state.buckets) {
    bucket_step(bucket, inflow_for_bucket(zone_activities, state.zones, bucket.id), dt);
  }
  for (auto& [camera, flag] : state.camera_recording) {
    flag = false;
    for (const Bucket& bucket : state.buckets) {
      if (!bucket.recording) continue;
      if (std::find(bucket.cameras.begin(), bucket.cameras.end(), camera) !=
          bucket.cameras.end()) {
        flag = true;
        break;
      }
    }
  }
}

std::optional<double> time_to_threshold(double inflow, double leak, double theta) {
  if (inflow > leak) return theta / (inflow - leak);
  return std::nullopt;
}

}  // namespace camcrew
