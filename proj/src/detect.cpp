#include "camcrew/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace camcrew {

const char* gaze_name(Gaze g) {
  switch (g) {
    case Gaze::kLeft: return "left";
    case Gaze::kRight: return "right";
    case Gaze::kFrontal: return "frontal";
    default: return "unknown";
  }
}

std::vector<ImageBox> activity_regions(const ForegroundMask& mask, int min_area) {
  std::vector<ImageBox> out;
  const int w = mask.width;
  const int h = mask.height;
  std::vector<std::uint8_t> seen(mask.bits.size(), 0);
  std::vector<std::int32_t> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t start = std::int32_t(y) * w + x;
      if (!mask.bits[start] || seen[start]) continue;
      int min_x = x, max_x = x, min_y = y, max_y = y;
      int area = 0;
      stack.clear();
      stack.push_back(start);
      seen[start] = 1;
      while (!stack.empty()) {
        const std::int32_t p = stack.back();
        stack.pop_back();
        const int px = p % w;
        const int py = p / w;
        ++area;
        min_x = std::min(min_x, px);
        max_x = std::max(max_x, px);
        min_y = std::min(min_y, py);
        max_y = std::max(max_y, py);
        const std::int32_t nbors[4] = {p - 1, p + 1, p - w, p + w};
        const bool ok[4] = {px > 0, px + 1 < w, py > 0, py + 1 < h};
        for (int k = 0; k < 4; ++k) {
          if (ok[k] && mask.bits[nbors[k]] && !seen[nbors[k]]) {
            seen[nbors[k]] = 1;
            stack.push_back(nbors[k]);
          }
        }
      }
      if (area >= min_area) {
        ImageBox box;
        box.x = min_x;
        box.y = min_y;
        box.w = max_x - min_x + 1;
        box.h = max_y - min_y + 1;
        out.push_back(box);
      }
    }
  }
  return out;
}

DetectionPool update_pool(const std::vector<Detection>& prev, double margin_frac,
                          const std::vector<ImageBox>& activity, int frame_w, int frame_h) {
  if (margin_frac < 0.0) throw std::invalid_argument("update_pool: negative margin");
  DetectionPool pool;
  for (const ImageBox& box : activity) {
    if (auto c = box.clipped(frame_w, frame_h)) pool.regions.push_back(*c);
  }
  for (const Detection& det : prev) {
    if (auto c = det.box.inflated(margin_frac).clipped(frame_w, frame_h)) {
      pool.regions.push_back(*c);
    }
  }
  return pool;
}

Gaze fuse_gaze(const GazeScores& s) {
  const double best = std::max({s.frontal, s.left_profile, s.right_profile});
  if (best < s.tau_g) return Gaze::kUnknown;
  if (s.frontal == best) return Gaze::kFrontal;
  if (s.left_profile == best) return Gaze::kLeft;
  return Gaze::kRight;
}

std::vector<Detection> detect(const DetectorFn& detector, const DetectorInput& input,
                              const DetectionPool& pool, double dedup_iou) {
  if (pool.regions.empty()) return {};
  std::vector<Detection> raw = detector(input, pool.regions);

  std::vector<Detection> gated;
  for (Detection& det : raw) {
    for (const ImageBox& region : pool.regions) {
      if (intersection_area(det.box, region) > 0.0) {
        gated.push_back(std::move(det));
        break;
      }
    }
  }

  std::stable_sort(gated.begin(), gated.end(), [](const Detection& a, const Detection& b) {
    return a.confidence > b.confidence;
  });
  std::vector<Detection> kept;
  for (Detection& det : gated) {
    bool dup = false;
    for (const Detection& k : kept) {
      if (iou(det.box, k.box) > dedup_iou) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(std::move(det));
  }
  return kept;
}

Gaze gaze_from_heading(const CameraConfig& cam, const Actor& actor, double t,
                       double frontal_cone) {
  const Vec2 v = actor_velocity(actor, t);
  const double speed = norm(v);
  if (speed < 1e-9) return Gaze::kUnknown;
  const Vec2 pos = actor_position(actor, t);
  const Vec2 to_cam = cam.position - pos;
  const double dist = norm(to_cam);
  if (dist < 1e-9) return Gaze::kUnknown;
  const double cos_ang = std::clamp(dot(v, to_cam) / (speed * dist), -1.0, 1.0);
  if (std::acos(cos_ang) <= frontal_cone) return Gaze::kFrontal;
  // Sign of the actor's bearing rate seen from the camera = image-x motion.
  const double s = cross(pos - cam.position, v);
  if (std::fabs(s) < 1e-9) return Gaze::kUnknown;
  return s > 0.0 ? Gaze::kRight : Gaze::kLeft;
}

std::vector<Detection> SimulatedDetector::operator()(const DetectorInput& input,
                                                     const std::vector<ImageBox>& regions) {
  const World& world = *input.world;
  const CameraConfig& cam = *input.camera;
  std::vector<Detection> out;
  for (const Actor& actor : world.actors) {
    // Fixed three draws per actor per frame keeps the stream independent of
    // visibility and pool contents.
    const double miss = rng_.next_unit();
    const double dx = rng_.next_range(-params_.jitter_px, params_.jitter_px);
    const double dy = rng_.next_range(-params_.jitter_px, params_.jitter_px);
    if (miss < params_.p_miss) continue;
    const auto full = project(world.floorplan, cam, actor, input.t);
    if (!full) continue;
    ImageBox box = upper_body(*full);
    box.x += dx;
    box.y += dy;
    bool overlaps = false;
    for (const ImageBox& region : regions) {
      if (intersection_area(box, region) > 0.0) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) continue;
    Detection det;
    det.box = box;
    det.eye_point = {box.x + box.w / 2.0, box.y + 0.2 * box.h};
    det.gaze = gaze_from_heading(cam, actor, input.t, params_.frontal_cone);
    det.confidence = params_.confidence;
    det.actor_hint = actor.id;
    out.push_back(std::move(det));
  }
  return out;
}

}  // namespace camcrew
