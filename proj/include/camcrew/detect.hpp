#pragma once

#include <functional>
#include <string>
#include <vector>

#include "camcrew/rng.hpp"
#include "camcrew/scene.hpp"
#include "camcrew/video.hpp"

namespace camcrew {

enum class Gaze { kUnknown, kLeft, kRight, kFrontal };

const char* gaze_name(Gaze g);

struct Detection {
  ImageBox box;          // upper-body
  Vec2 eye_point;        // pixels, inside box
  Gaze gaze = Gaze::kUnknown;
  double confidence = 0.0;
  std::string actor_hint;  // simulated detector only
};

// Regions the detector is evaluated on; anything outside is never searched.
struct DetectionPool {
  std::vector<ImageBox> regions;  // clipped to frame
};

struct GazeScores {
  double frontal = 0.0;
  double left_profile = 0.0;
  double right_profile = 0.0;
  double tau_g = 0.5;
};

// Bounding boxes of 4-connected foreground components with at least
// min_area pixels, in row-major discovery order.
std::vector<ImageBox> activity_regions(const ForegroundMask& mask, int min_area);

// New pool = activity boxes plus previous detection boxes inflated by
// margin_frac per side, everything clipped to the frame.
DetectionPool update_pool(const std::vector<Detection>& prev, double margin_frac,
                          const std::vector<ImageBox>& activity, int frame_w, int frame_h);

// Highest score wins if it reaches tau_g; ties resolve frontal, left, right.
Gaze fuse_gaze(const GazeScores& scores);

struct DetectorInput {
  const World* world = nullptr;
  const CameraConfig* camera = nullptr;
  double t = 0.0;
  const Frame* frame = nullptr;  // for pixel-based detectors
};

using DetectorFn = std::function<std::vector<Detection>(
    const DetectorInput&, const std::vector<ImageBox>& regions)>;

// Runs the detector on the pool regions only, drops anything that does not
// overlap the pool, and deduplicates overlapping results (IoU > dedup_iou,
// higher confidence wins).
std::vector<Detection> detect(const DetectorFn& detector, const DetectorInput& input,
                              const DetectionPool& pool, double dedup_iou = 0.6);

struct SimulatedDetectorParams {
  double jitter_px = 2.0;
  double p_miss = 0.02;
  double frontal_cone = 0.5235987755982988;  // 30 degrees
  double confidence = 0.9;
};

// Ground-truth detector: reports the projected upper-body box of every
// visible actor whose (jittered) box overlaps a pool region. Gaze comes
// from the actor's heading relative to the camera. One RNG stream per
// detector, advanced in time order.
class SimulatedDetector {
 public:
  SimulatedDetector(const SimulatedDetectorParams& params, std::uint64_t seed)
      : params_(params), rng_(seed) {}

  std::vector<Detection> operator()(const DetectorInput& input,
                                    const std::vector<ImageBox>& regions);

 private:
  SimulatedDetectorParams params_;
  Rng rng_;
};

// Heading-based gaze: frontal when moving toward the camera within the cone,
// otherwise the image-space direction of travel; unknown when stationary or
// moving straight away.
Gaze gaze_from_heading(const CameraConfig& cam, const Actor& actor, double t,
                       double frontal_cone);

}  // namespace camcrew
