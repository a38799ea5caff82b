#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "camcrew/detect.hpp"
#include "camcrew/scene.hpp"

namespace camcrew {

// Proposed 16:9 framing rectangle in overview-camera pixels.
struct Canvas {
  ImageBox rect;
};

struct ComposeParams {
  double width_margin = 0.15;        // extra width around the outer detections
  double margin_floor = 0.05;        // never squeezed below this to fit
  double eye_line = 1.0 / 3.0;       // eye height from canvas top
  double single_height_factor = 2.0; // canvas height per detection height
};

struct DiffParams {
  double iou_min = 0.7;
  double center_shift_max = 0.10;    // fraction of frame width
  double size_ratio_min = 0.8;
  double size_ratio_max = 1.25;
};

struct PtzPose {
  double pan = 0.0;   // degrees, relative to the mount yaw
  double tilt = 0.0;  // degrees, up positive
  double zoom = 1.0;  // magnification >= 1
};

// Shot-switching state for one PTZ. A switch happens only when the pending
// proposal has differed steadily for hold_s while the current shot is at
// least min_shot_s old; a first shot is adopted as soon as it is steady.
struct ShotState {
  std::optional<Canvas> current;
  double age = 0.0;
  std::optional<Canvas> pending;
  double pending_age = 0.0;
  double min_shot_s = 6.0;
  double hold_s = 2.0;
  DiffParams diff;
  int frame_w = 0;
};

// Pick the framing for the given detections. Multi-person shots span the
// outer detections plus the width margin; single-person shots scale the
// detection and use gaze for lead room. The result is 16:9 and inside the
// frame. Throws std::invalid_argument on an empty list.
Canvas propose_canvas(const std::vector<Detection>& detections, int frame_w, int frame_h,
                      const ComposeParams& params);

// True when every detection tracked across the window stayed within
// eps_move * frame_w of its first position and within eps_size relative
// size change (strict bounds). Entering/leaving people break steadiness.
bool is_steady(const std::deque<std::vector<Detection>>& history, double eps_move,
               double eps_size, int frame_w);

// "Considerably different": low overlap, a large center shift, or a width
// ratio outside the configured band.
bool differs(const Canvas& current, const Canvas& proposed, const DiffParams& params,
             int frame_w);

// Advances the state machine by dt; returns the newly adopted canvas when a
// switch fires.
std::optional<Canvas> shot_fsm_tick(ShotState& state, const std::optional<Canvas>& proposal,
                                    bool steady, double dt);

// Colocated overview/PTZ geometry: both cameras share the mount, pan/tilt
// swing the PTZ axis through the overview's tangent image plane and zoom
// narrows its field of view.
struct PtzGeometry {
  int frame_w = 1920;
  int frame_h = 1080;
  double overview_hfov = 1.2217;  // radians
  double ptz_hfov = 1.2217;       // radians at zoom 1
  double pan_range_deg = 90.0;    // mechanical, +/- about the mount yaw
  double tilt_range_deg = 45.0;
  double zoom_range = 8.0;        // mechanical maximum
  double cal_zoom_min = 1.0;      // calibrated zoom span
  double cal_zoom_max = 4.0;

  double focal() const;
  // Overview-frame rect covered by the PTZ at this pose.
  ImageBox footprint(const PtzPose& pose) const;
};

struct CalibrationSample {
  int gx = 0, gy = 0, zi = 0;
  ImageBox rect;
  PtzPose pose;
  double dpan = 0.0, dtilt = 0.0;  // fine-alignment residuals
};

struct CalibrationTable {
  int grid = 0;   // G positions per axis
  int zooms = 0;  // Z zoom levels
  std::vector<double> zoom_levels;
  std::vector<CalibrationSample> samples;  // zi-major, then gy, then gx
  // Footprint-center lattices per zoom level, for cell lookup.
  std::vector<std::vector<double>> center_x;  // [zi][gx]
  std::vector<std::vector<double>> center_y;  // [zi][gy]

  const CalibrationSample& at(int gx, int gy, int zi) const;
  CalibrationSample& at(int gx, int gy, int zi);
  // Recomputes the lookup lattices; throws if they are not strictly ordered.
  void rebuild_lookup();

  void save(const std::filesystem::path& path) const;
  static CalibrationTable load(const std::filesystem::path& path);
};

using ResidualFn = std::function<std::pair<double, double>(const CalibrationSample&)>;

// Builds the G x G x Z table from the geometry model (the rough stage); a
// matcher, when given, supplies per-sample (dpan, dtilt) corrections (the
// fine stage). Throws std::domain_error when a grid pose leaves the
// mechanical envelope.
CalibrationTable calibrate(const PtzGeometry& geometry, int grid, int zooms,
                           const ResidualFn& matcher = nullptr);

struct MappedPose {
  PtzPose pose;
  bool outside_grid = false;  // fell back to the nearest cell edge
};

// Canvas -> pose: bilinear pan/tilt (plus residuals) over the four samples
// around the canvas center, zoom by inverse interpolation of the canvas
// width across zoom levels.
MappedPose canvas_to_ptz(const CalibrationTable& table, const Canvas& canvas);

}  // namespace camcrew
