#include "camcrew/cinema.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace camcrew {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAspect = 16.0 / 9.0;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace

Canvas propose_canvas(const std::vector<Detection>& detections, int frame_w, int frame_h,
                      const ComposeParams& p) {
  if (detections.empty()) {
    throw std::invalid_argument("propose_canvas: no detections");
  }
  const double max_w = std::min(double(frame_w), frame_h * kAspect);

  double w = 0.0;
  double center_x = 0.0;
  double eye_y = 0.0;

  if (detections.size() == 1) {
    const Detection& det = detections.front();
    double h = p.single_height_factor * det.box.h;
    h = std::min(h, max_w / kAspect);
    w = h * kAspect;
    eye_y = det.eye_point.y;
    const double subject_x = det.box.x + det.box.w / 2.0;
    // Lead room: the subject sits on the third line away from the gaze side.
    switch (det.gaze) {
      case Gaze::kRight: center_x = subject_x + w / 6.0; break;
      case Gaze::kLeft: center_x = subject_x - w / 6.0; break;
      default: center_x = subject_x; break;
    }
  } else {
    double lo = detections.front().box.x;
    double hi = detections.front().box.right();
    double top = detections.front().box.y;
    double bottom = detections.front().box.bottom();
    eye_y = detections.front().eye_point.y;
    for (const Detection& det : detections) {
      lo = std::min(lo, det.box.x);
      hi = std::max(hi, det.box.right());
      top = std::min(top, det.box.y);
      bottom = std::max(bottom, det.box.bottom());
      eye_y = std::min(eye_y, det.eye_point.y);  // highest person rules the eye line
    }
    const double span = hi - lo;
    center_x = (lo + hi) / 2.0;
    w = (1.0 + p.width_margin) * span;

    // Containment outranks the width rule: with the eye line pinned at
    // eye_line from the top, the canvas must still reach past every box.
    const double h_contain = std::max((eye_y - top + 1.0) / p.eye_line,
                                      (bottom - eye_y + 1.0) / (1.0 - p.eye_line));
    const double w_contain = h_contain * kAspect;
    w = std::min(std::max(w, w_contain), max_w);

    // If the eye-line placement cannot fit vertically, give up margin down
    // to the floor before letting the translation below break the rule.
    if (eye_y > 0.0 && eye_y < frame_h) {
      const double h_eye_max =
          std::min(eye_y / p.eye_line, (frame_h - eye_y) / (1.0 - p.eye_line));
      const double w_eye_max = h_eye_max * kAspect;
      if (w > w_eye_max) {
        const double w_floor =
            std::max((1.0 + p.margin_floor) * span, std::min(w_contain, max_w));
        w = std::min(std::max(w_eye_max, w_floor), max_w);
      }
    }
  }

  const double h = w / kAspect;
  double x = center_x - w / 2.0;
  double y = eye_y - p.eye_line * h;
  x = std::clamp(x, 0.0, frame_w - w);
  y = std::clamp(y, 0.0, frame_h - h);

  Canvas canvas;
  canvas.rect = {x, y, w, h, detections.front().box.camera};
  return canvas;
}

bool is_steady(const std::deque<std::vector<Detection>>& history, double eps_move,
               double eps_size, int frame_w) {
  if (history.size() < 2) return false;
  const auto& base = history.front();
  if (base.empty()) return false;
  const double move_limit = eps_move * frame_w;

  for (std::size_t k = 1; k < history.size(); ++k) {
    const auto& cur = history[k];
    if (cur.size() != base.size()) return false;
    std::vector<bool> used(cur.size(), false);
    for (const Detection& b : base) {
      // nearest unclaimed match
      std::size_t best = cur.size();
      double best_d = 0.0;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (used[i]) continue;
        const Vec2 d = cur[i].box.center() - b.box.center();
        const double dist2 = dot(d, d);
        if (best == cur.size() || dist2 < best_d) {
          best = i;
          best_d = dist2;
        }
      }
      if (best == cur.size()) return false;
      used[best] = true;
      const Detection& c = cur[best];
      if (std::sqrt(best_d) >= move_limit) return false;
      const double dw = std::fabs(c.box.w / b.box.w - 1.0);
      const double dh = std::fabs(c.box.h / b.box.h - 1.0);
      if (std::max(dw, dh) >= eps_size) return false;
    }
  }
  return true;
}

bool differs(const Canvas& current, const Canvas& proposed, const DiffParams& p, int frame_w) {
  if (iou(current.rect, proposed.rect) < p.iou_min) return true;
  const Vec2 shift = proposed.rect.center() - current.rect.center();
  if (norm(shift) > p.center_shift_max * frame_w) return true;
  const double ratio = proposed.rect.w / current.rect.w;
  return ratio < p.size_ratio_min || ratio > p.size_ratio_max;
}

std::optional<Canvas> shot_fsm_tick(ShotState& st, const std::optional<Canvas>& proposal,
                                    bool steady, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("shot_fsm_tick: dt must be positive");
  if (st.current) st.age += dt;

  if (!st.current) {
    if (proposal && steady) {
      st.current = proposal;
      st.age = 0.0;
      st.pending.reset();
      st.pending_age = 0.0;
      return st.current;
    }
    return std::nullopt;
  }

  const bool candidate = proposal && steady && differs(*st.current, *proposal, st.diff, st.frame_w);
  if (!candidate) {
    st.pending.reset();
    st.pending_age = 0.0;
    return std::nullopt;
  }

  if (!st.pending) {
    st.pending = proposal;
    st.pending_age = 0.0;
  } else if (differs(*st.pending, *proposal, st.diff, st.frame_w)) {
    // A moving target restarts the hold; chasing it would quiver.
    st.pending = proposal;
    st.pending_age = 0.0;
  } else {
    st.pending_age += dt;
  }

  // The epsilon absorbs accumulated dt rounding right at the thresholds.
  constexpr double kEps = 1e-9;
  if (st.age >= st.min_shot_s - kEps && st.pending_age >= st.hold_s - kEps) {
    st.current = st.pending;
    st.age = 0.0;
    st.pending.reset();
    st.pending_age = 0.0;
    return st.current;
  }
  return std::nullopt;
}

double PtzGeometry::focal() const {
  return (frame_w / 2.0) / std::tan(overview_hfov / 2.0);
}

ImageBox PtzGeometry::footprint(const PtzPose& pose) const {
  const double f = focal();
  const double pan = deg2rad(pose.pan);
  const double tilt = deg2rad(pose.tilt);
  const double half_h = std::atan(std::tan(ptz_hfov / 2.0) / pose.zoom);
  const double half_v = std::atan(std::tan(ptz_hfov / 2.0) * (9.0 / 16.0) / pose.zoom);
  if (std::fabs(pan) + half_h >= kPi / 2.0 || std::fabs(tilt) + half_v >= kPi / 2.0) {
    throw std::domain_error("footprint: pose looks past the image plane");
  }
  const double u_lo = frame_w / 2.0 + f * std::tan(pan - half_h);
  const double u_hi = frame_w / 2.0 + f * std::tan(pan + half_h);
  const double v_lo = frame_h / 2.0 - f * std::tan(tilt + half_v);
  const double v_hi = frame_h / 2.0 - f * std::tan(tilt - half_v);
  return {u_lo, v_lo, u_hi - u_lo, v_hi - v_lo, ""};
}

const CalibrationSample& CalibrationTable::at(int gx, int gy, int zi) const {
  return samples[std::size_t((zi * grid + gy) * grid + gx)];
}

CalibrationSample& CalibrationTable::at(int gx, int gy, int zi) {
  return samples[std::size_t((zi * grid + gy) * grid + gx)];
}

void CalibrationTable::rebuild_lookup() {
  if (grid < 2 || zooms < 2 || samples.size() != std::size_t(grid) * grid * zooms) {
    throw std::invalid_argument("calibration table: bad shape");
  }
  center_x.assign(std::size_t(zooms), std::vector<double>(std::size_t(grid), 0.0));
  center_y.assign(std::size_t(zooms), std::vector<double>(std::size_t(grid), 0.0));
  for (int zi = 0; zi < zooms; ++zi) {
    for (int gx = 0; gx < grid; ++gx) {
      double sum = 0.0;
      for (int gy = 0; gy < grid; ++gy) sum += at(gx, gy, zi).rect.center().x;
      center_x[zi][gx] = sum / grid;
    }
    for (int gy = 0; gy < grid; ++gy) {
      double sum = 0.0;
      for (int gx = 0; gx < grid; ++gx) sum += at(gx, gy, zi).rect.center().y;
      center_y[zi][gy] = sum / grid;
    }
    for (int i = 1; i < grid; ++i) {
      if (center_x[zi][i] <= center_x[zi][i - 1] || center_y[zi][i] <= center_y[zi][i - 1]) {
        throw std::invalid_argument("calibration table: samples not strictly ordered");
      }
    }
  }
}

CalibrationTable calibrate(const PtzGeometry& g, int grid, int zooms, const ResidualFn& matcher) {
  if (grid < 2 || zooms < 2) {
    throw std::invalid_argument("calibrate: need at least a 2x2x2 table");
  }
  CalibrationTable table;
  table.grid = grid;
  table.zooms = zooms;
  const double f = g.focal();

  for (int zi = 0; zi < zooms; ++zi) {
    const double frac = double(zi) / (zooms - 1);
    table.zoom_levels.push_back(g.cal_zoom_min *
                                std::pow(g.cal_zoom_max / g.cal_zoom_min, frac));
  }

  table.samples.resize(std::size_t(grid) * grid * zooms);
  for (int zi = 0; zi < zooms; ++zi) {
    const double zoom = table.zoom_levels[std::size_t(zi)];
    if (zoom < 1.0 || zoom > g.zoom_range) {
      throw std::domain_error("calibrate: zoom level outside mechanical range");
    }
    for (int gy = 0; gy < grid; ++gy) {
      for (int gx = 0; gx < grid; ++gx) {
        // Grid poses aim the PTZ axis at a regular lattice over the frame.
        const double u = double(gx) * g.frame_w / (grid - 1);
        const double v = double(gy) * g.frame_h / (grid - 1);
        CalibrationSample s;
        s.gx = gx;
        s.gy = gy;
        s.zi = zi;
        s.pose.pan = rad2deg(std::atan((u - g.frame_w / 2.0) / f));
        s.pose.tilt = rad2deg(std::atan((g.frame_h / 2.0 - v) / f));
        s.pose.zoom = zoom;
        if (std::fabs(s.pose.pan) > g.pan_range_deg || std::fabs(s.pose.tilt) > g.tilt_range_deg) {
          throw std::domain_error("calibrate: grid pose outside mechanical range");
        }
        s.rect = g.footprint(s.pose);
        if (matcher) {
          const auto [dpan, dtilt] = matcher(s);
          s.dpan = dpan;
          s.dtilt = dtilt;
        }
        table.at(gx, gy, zi) = s;
      }
    }
  }
  table.rebuild_lookup();
  return table;
}

namespace {

// Cell index and fractional coordinate along one lattice axis; clamps to the
// hull and reports when the probe fell outside.
void locate(const std::vector<double>& nodes, double value, int* idx, double* frac,
            bool* outside) {
  const int n = int(nodes.size());
  int i = 0;
  while (i + 2 < n && value >= nodes[std::size_t(i) + 1]) ++i;
  double a = (value - nodes[std::size_t(i)]) / (nodes[std::size_t(i) + 1] - nodes[std::size_t(i)]);
  if (a < 0.0 || a > 1.0) {
    *outside = true;
    a = std::clamp(a, 0.0, 1.0);
  }
  *idx = i;
  *frac = a;
}

struct LevelEval {
  double pan = 0.0;
  double tilt = 0.0;
  double width = 0.0;
};

LevelEval eval_level(const CalibrationTable& t, int zi, Vec2 center, bool* outside) {
  int ix = 0, iy = 0;
  double sx = 0.0, sy = 0.0;
  locate(t.center_x[std::size_t(zi)], center.x, &ix, &sx, outside);
  locate(t.center_y[std::size_t(zi)], center.y, &iy, &sy, outside);
  const double w00 = (1 - sx) * (1 - sy), w10 = sx * (1 - sy);
  const double w01 = (1 - sx) * sy, w11 = sx * sy;
  const CalibrationSample& s00 = t.at(ix, iy, zi);
  const CalibrationSample& s10 = t.at(ix + 1, iy, zi);
  const CalibrationSample& s01 = t.at(ix, iy + 1, zi);
  const CalibrationSample& s11 = t.at(ix + 1, iy + 1, zi);
  LevelEval e;
  e.pan = w00 * (s00.pose.pan + s00.dpan) + w10 * (s10.pose.pan + s10.dpan) +
          w01 * (s01.pose.pan + s01.dpan) + w11 * (s11.pose.pan + s11.dpan);
  e.tilt = w00 * (s00.pose.tilt + s00.dtilt) + w10 * (s10.pose.tilt + s10.dtilt) +
           w01 * (s01.pose.tilt + s01.dtilt) + w11 * (s11.pose.tilt + s11.dtilt);
  e.width = w00 * s00.rect.w + w10 * s10.rect.w + w01 * s01.rect.w + w11 * s11.rect.w;
  return e;
}

}  // namespace

MappedPose canvas_to_ptz(const CalibrationTable& table, const Canvas& canvas) {
  if (table.zooms < 2) throw std::invalid_argument("canvas_to_ptz: table too small");
  const Vec2 center = canvas.rect.center();
  const double want_w = canvas.rect.w;

  MappedPose mapped;
  std::vector<LevelEval> levels(std::size_t(table.zooms));
  for (int zi = 0; zi < table.zooms; ++zi) {
    levels[std::size_t(zi)] = eval_level(table, zi, center, &mapped.outside_grid);
  }

  // Footprint widths shrink with zoom; bracket the canvas width.
  int k = 0;
  while (k + 2 < table.zooms && want_w <= levels[std::size_t(k) + 1].width) ++k;
  const double w_lo = levels[std::size_t(k)].width;      // wider (lower zoom)
  const double w_hi = levels[std::size_t(k) + 1].width;  // narrower (higher zoom)
  const double z_lo = table.zoom_levels[std::size_t(k)];
  const double z_hi = table.zoom_levels[std::size_t(k) + 1];
  // Inverse width is close to linear in zoom. Canvases outside the
  // calibrated widths pin to the end levels rather than extrapolating past
  // what calibrate() verified against the mechanical envelope.
  const double a = (1.0 / want_w - 1.0 / w_lo) / (1.0 / w_hi - 1.0 / w_lo);
  double zoom = z_lo + a * (z_hi - z_lo);
  zoom = std::clamp(zoom, table.zoom_levels.front(), table.zoom_levels.back());

  const double blend = std::clamp(a, 0.0, 1.0);
  mapped.pose.pan = (1 - blend) * levels[std::size_t(k)].pan + blend * levels[std::size_t(k) + 1].pan;
  mapped.pose.tilt =
      (1 - blend) * levels[std::size_t(k)].tilt + blend * levels[std::size_t(k) + 1].tilt;
  mapped.pose.zoom = zoom;
  return mapped;
}

void CalibrationTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# ptz calibration table: gx gy zi x y w h pan tilt zoom dpan dtilt\n";
  out << "grid " << grid << " zooms " << zooms << "\n";
  char line[512];
  for (const CalibrationSample& s : samples) {
    std::snprintf(line, sizeof(line),
                  "%d %d %d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", s.gx, s.gy,
                  s.zi, s.rect.x, s.rect.y, s.rect.w, s.rect.h, s.pose.pan, s.pose.tilt,
                  s.pose.zoom, s.dpan, s.dtilt);
    out << line;
  }
}

CalibrationTable CalibrationTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CalibrationTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    if (!have_header) {
      std::string kw1, kw2;
      if (!(ss >> kw1 >> table.grid >> kw2 >> table.zooms) || kw1 != "grid" || kw2 != "zooms") {
        throw std::runtime_error(path.string() + ": bad calibration header");
      }
      table.samples.resize(std::size_t(table.grid) * table.grid * table.zooms);
      table.zoom_levels.assign(std::size_t(table.zooms), 0.0);
      have_header = true;
      continue;
    }
    CalibrationSample s;
    if (!(ss >> s.gx >> s.gy >> s.zi >> s.rect.x >> s.rect.y >> s.rect.w >> s.rect.h >>
          s.pose.pan >> s.pose.tilt >> s.pose.zoom >> s.dpan >> s.dtilt)) {
      throw std::runtime_error(path.string() + ": bad calibration sample line");
    }
    if (s.gx < 0 || s.gx >= table.grid || s.gy < 0 || s.gy >= table.grid || s.zi < 0 ||
        s.zi >= table.zooms) {
      throw std::runtime_error(path.string() + ": sample index out of range");
    }
    table.at(s.gx, s.gy, s.zi) = s;
    table.zoom_levels[std::size_t(s.zi)] = s.pose.zoom;
  }
  if (!have_header) throw std::runtime_error(path.string() + ": empty calibration file");
  table.rebuild_lookup();
  return table;
}

}  // namespace camcrew
