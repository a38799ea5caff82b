#include "camcrew/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "camcrew/rng.hpp"
#include "camcrew/video.hpp"

namespace camcrew {

namespace {

struct CameraRt {
  const CameraConfig* cfg = nullptr;
  Frame background;
  BackgroundModel model;
  Frame frame;
  ForegroundMask mask;
  std::vector<std::size_t> zone_idx;                  // into scenario.zones
  std::vector<std::vector<std::int32_t>> zone_pixels;
  bool runs_detection = false;
  int detections_this_tick = 0;
};

struct OverviewRt {
  std::size_t cam = 0;  // index into CameraRt list
  SimulatedDetector detector;
  std::vector<Detection> prev;
  std::deque<std::vector<Detection>> history;
  std::size_t window = 2;
  std::vector<Detection> dets;
  bool steady = false;
  std::optional<Canvas> proposal;
};

struct PtzRt {
  const CameraConfig* cfg = nullptr;
  std::size_t overview = 0;  // index into OverviewRt list
  CalibrationTable table;
  ShotState shot;
  PtzPose pose;
  bool pose_valid = false;
};

PtzGeometry make_geometry(const CameraConfig& overview, const CameraConfig& ptz,
                          const CalibParams& cal) {
  PtzGeometry g;
  g.frame_w = overview.width;
  g.frame_h = overview.height;
  g.overview_hfov = overview.hfov;
  g.ptz_hfov = ptz.hfov;
  g.pan_range_deg = ptz.pan_range_deg;
  g.tilt_range_deg = ptz.tilt_range_deg;
  g.zoom_range = ptz.zoom_max;
  g.cal_zoom_min = cal.zoom_min;
  g.cal_zoom_max = cal.zoom_max;
  return g;
}

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

RunResult run(const Scenario& sc, std::uint64_t seed, const RunOptions& opt) {
  RunResult result;
  result.tick = sc.tick;
  const int steps = int(std::llround(sc.duration / sc.tick));
  result.duration = steps * sc.tick;

  for (const Bucket& b : sc.buckets) result.bucket_ids.push_back(b.id);
  for (const CameraConfig& c : sc.world.cameras) result.camera_ids.push_back(c.id);

  // Per-camera pipelines, warmed up on the empty background.
  std::vector<CameraRt> cams(sc.world.cameras.size());
  for (std::size_t i = 0; i < cams.size(); ++i) {
    CameraRt& rt = cams[i];
    rt.cfg = &sc.world.cameras[i];
    rt.background = render_background(*rt.cfg);
    rt.model = BackgroundModel(rt.cfg->width, rt.cfg->height, sc.bgs.alpha, sc.bgs.tau);
    for (int k = 0; k < std::max(1, sc.bgs.warmup); ++k) bgs_step(rt.model, rt.background);
  }
  for (std::size_t zi = 0; zi < sc.zones.size(); ++zi) {
    const Zone& zone = sc.zones[zi];
    for (std::size_t i = 0; i < cams.size(); ++i) {
      if (cams[i].cfg->id != zone.camera) continue;
      cams[i].zone_idx.push_back(zi);
      cams[i].zone_pixels.push_back(
          polygon_pixel_indices(cams[i].cfg->width, cams[i].cfg->height, zone.polygon));
    }
  }

  // Detection runs once per overview camera that steers at least one PTZ.
  std::vector<OverviewRt> overviews;
  std::vector<PtzRt> ptzs;
  const SimulatedDetectorParams det_params{
      sc.detect.jitter_px, sc.detect.p_miss,
      sc.detect.frontal_cone_deg * 3.14159265358979323846 / 180.0, 0.9};
  for (const CameraConfig& cam : sc.world.cameras) {
    if (cam.kind != CameraKind::kPtz) continue;
    const CameraConfig* ov_cfg = sc.find_camera(cam.paired_overview);
    std::size_t ov_cam = 0;
    while (cams[ov_cam].cfg->id != ov_cfg->id) ++ov_cam;
    std::size_t ov = 0;
    for (; ov < overviews.size(); ++ov) {
      if (overviews[ov].cam == ov_cam) break;
    }
    if (ov == overviews.size()) {
      cams[ov_cam].runs_detection = true;
      OverviewRt rt{ov_cam, SimulatedDetector(det_params, mix64(seed, hash64(ov_cfg->id))),
                    {}, {}, 2, {}, false, std::nullopt};
      rt.window = std::max<std::size_t>(2, std::size_t(std::lround(sc.steady.window_s / sc.tick)));
      overviews.push_back(std::move(rt));
    }
    PtzRt prt;
    prt.cfg = &cam;
    prt.overview = ov;
    prt.table = calibrate(make_geometry(*ov_cfg, cam, sc.calib), sc.calib.grid, sc.calib.zooms);
    prt.shot.min_shot_s = sc.min_shot_s;
    prt.shot.hold_s = sc.hold_s;
    prt.shot.diff = sc.diff;
    prt.shot.frame_w = ov_cfg->width;
    ptzs.push_back(std::move(prt));
    result.ptz_ids.push_back(cam.id);
  }

  SelectionState sel;
  sel.buckets = sc.buckets;
  sel.zones = sc.zones;
  for (const CameraConfig& cam : sc.world.cameras) sel.camera_recording[cam.id] = false;

  MatrixState matrix(result.camera_ids, sc.channels);
  result.ledger.bitrate = sc.bitrate;

  if (!opt.dump_dir.empty()) {
    std::filesystem::create_directories(opt.dump_dir);
  }

  std::map<std::string, double> activities;
  for (int step = 1; step <= steps; ++step) {
    const double t = step * sc.tick;

    for (CameraRt& rt : cams) {
      rt.frame = rt.background;
      draw_actors(rt.frame, sc.world.floorplan, *rt.cfg, sc.world.actors, t);
      rt.mask = bgs_step(rt.model, rt.frame);
      for (std::size_t k = 0; k < rt.zone_idx.size(); ++k) {
        activities[sc.zones[rt.zone_idx[k]].id] = zone_activity(rt.mask, rt.zone_pixels[k]);
      }
      rt.detections_this_tick = 0;
    }

    selection_tick(sel, activities, sc.tick);

    std::set<std::string> requested;
    std::map<std::string, double> priority;
    for (const auto& [cam, flag] : sel.camera_recording) {
      if (!flag) continue;
      requested.insert(cam);
      double best = 0.0;
      for (const Bucket& b : sel.buckets) {
        if (std::find(b.cameras.begin(), b.cameras.end(), cam) != b.cameras.end()) {
          best = std::max(best, b.level);
        }
      }
      priority[cam] = best;
    }
    for (const RecordSegmentEvent& ev : matrix_tick(matrix, requested, priority, t, result.ledger)) {
      EventRow row;
      row.t = t;
      row.type = ev.type == RecordEventType::kStart ? "record_start" : "record_stop";
      row.camera = ev.camera;
      row.channel = ev.channel;
      result.events.push_back(std::move(row));
    }

    for (OverviewRt& ov : overviews) {
      CameraRt& cam = cams[ov.cam];
      const auto regions = activity_regions(cam.mask, sc.detect.min_area);
      const DetectionPool pool =
          update_pool(ov.prev, sc.detect.margin_frac, regions, cam.cfg->width, cam.cfg->height);
      DetectorInput input{&sc.world, cam.cfg, t, &cam.frame};
      DetectorFn fn = [&ov](const DetectorInput& in, const std::vector<ImageBox>& r) {
        return ov.detector(in, r);
      };
      ov.dets = detect(fn, input, pool, sc.detect.dedup_iou);
      cam.detections_this_tick = int(ov.dets.size());
      ov.history.push_back(ov.dets);
      while (ov.history.size() > ov.window) ov.history.pop_front();
      ov.steady = is_steady(ov.history, sc.steady.eps_move, sc.steady.eps_size, cam.cfg->width);
      ov.proposal.reset();
      if (!ov.dets.empty()) {
        ov.proposal = propose_canvas(ov.dets, cam.cfg->width, cam.cfg->height, sc.compose);
      }
      ov.prev = ov.dets;
    }

    for (PtzRt& ptz : ptzs) {
      const OverviewRt& ov = overviews[ptz.overview];
      const auto switched = shot_fsm_tick(ptz.shot, ov.proposal, ov.steady, sc.tick);
      if (switched) {
        const MappedPose mapped = canvas_to_ptz(ptz.table, *switched);
        ptz.pose = mapped.pose;
        ptz.pose_valid = true;
        EventRow row;
        row.t = t;
        row.type = "shot_switch";
        row.camera = ptz.cfg->id;
        row.has_shot = true;
        row.canvas = switched->rect;
        row.pose = mapped.pose;
        result.events.push_back(std::move(row));
        if (mapped.outside_grid) {
          EventRow warn;
          warn.t = t;
          warn.type = "ptz_warning";
          warn.camera = ptz.cfg->id;
          result.events.push_back(std::move(warn));
        }
      }
    }

    TimelineSample sample;
    sample.t = t;
    for (const Bucket& b : sel.buckets) {
      sample.bucket_levels.push_back(b.level);
      sample.bucket_recording.push_back(b.recording ? 1 : 0);
    }
    for (std::size_t i = 0; i < cams.size(); ++i) {
      const std::string& id = result.camera_ids[i];
      sample.camera_requested.push_back(sel.camera_recording.at(id) ? 1 : 0);
      sample.camera_channel.push_back(matrix.channel_of(id));
      sample.detection_count.push_back(cams[i].detections_this_tick);
    }
    for (const PtzRt& ptz : ptzs) {
      ShotSample shot;
      if (ptz.shot.current) {
        shot.active = true;
        shot.canvas = ptz.shot.current->rect;
        shot.pose = ptz.pose;
      }
      sample.shots.push_back(shot);
    }
    result.timeline.push_back(std::move(sample));

    if (!opt.dump_dir.empty() && step % std::max(1, opt.dump_every) == 0) {
      for (const CameraRt& rt : cams) {
        char name[128];
        std::snprintf(name, sizeof(name), "%s_%06d", rt.cfg->id.c_str(), step);
        write_pgm(rt.frame, opt.dump_dir / (std::string(name) + ".pgm"));
        write_pgm(rt.mask, opt.dump_dir / (std::string(name) + "_mask.pgm"));
      }
    }
  }

  for (const RecordSegmentEvent& ev : close_all(matrix, result.duration, result.ledger)) {
    EventRow row;
    row.t = result.duration;
    row.type = "record_stop";
    row.camera = ev.camera;
    row.channel = ev.channel;
    result.events.push_back(std::move(row));
  }
  return result;
}

namespace {

bool expected_at(const Scenario& sc, const std::string& bucket_id, double t) {
  const auto it = sc.expected.find(bucket_id);
  if (it == sc.expected.end()) return false;
  // Slack absorbs accumulated tick rounding at interval edges.
  constexpr double kEps = 1e-9;
  for (const ExpectedInterval& iv : it->second) {
    if (t >= iv.start - kEps && t <= iv.end + kEps) return true;
  }
  return false;
}

}  // namespace

MetricsReport evaluate(const RunResult& run, const Scenario& sc, double sample_period) {
  if (sample_period <= 0.0) throw std::invalid_argument("evaluate: sample_period must be positive");
  MetricsReport report;

  const int n_samples = int(std::floor(run.duration / sample_period + 1e-9));
  report.samples = n_samples;
  for (std::size_t bi = 0; bi < run.bucket_ids.size(); ++bi) {
    BucketMetrics m;
    for (int k = 1; k <= n_samples; ++k) {
      const double tau = k * sample_period;
      const int idx = int(std::llround(tau / run.tick)) - 1;
      if (idx < 0 || idx >= int(run.timeline.size())) continue;
      const bool actual = run.timeline[std::size_t(idx)].bucket_recording[bi] != 0;
      const bool expected = expected_at(sc, run.bucket_ids[bi], tau);
      if (actual && expected) ++m.tp;
      else if (actual && !expected) ++m.fp;
      else if (!actual && expected) ++m.fn;
      else ++m.tn;
    }
    const int total = m.tp + m.fp + m.fn + m.tn;
    m.accuracy = total > 0 ? double(m.tp + m.tn) / total : 0.0;
    report.per_bucket[run.bucket_ids[bi]] = m;
  }

  report.total_camera_seconds = double(run.camera_ids.size()) * run.duration;
  report.recorded_camera_seconds = run.ledger.recorded_seconds();
  report.savings = savings_fraction(run.ledger, report.total_camera_seconds);

  // Recorded time nothing in the annotation accounts for, integrated per tick.
  double fp_seconds = 0.0;
  double rec_seconds = 0.0;
  for (const TimelineSample& s : run.timeline) {
    for (std::size_t ci = 0; ci < run.camera_ids.size(); ++ci) {
      if (s.camera_channel[ci] < 0) continue;
      rec_seconds += run.tick;
      bool justified = false;
      for (std::size_t bi = 0; bi < run.bucket_ids.size() && !justified; ++bi) {
        const auto bucket = std::find_if(
            sc.buckets.begin(), sc.buckets.end(),
            [&](const Bucket& b) { return b.id == run.bucket_ids[bi]; });
        if (bucket == sc.buckets.end()) continue;
        if (std::find(bucket->cameras.begin(), bucket->cameras.end(), run.camera_ids[ci]) ==
            bucket->cameras.end()) {
          continue;
        }
        justified = expected_at(sc, bucket->id, s.t);
      }
      if (!justified) fp_seconds += run.tick;
    }
  }
  report.overhead = rec_seconds > 0.0 ? fp_seconds / rec_seconds : 0.0;
  return report;
}

void write_timeline_csv(const RunResult& run, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t";
  for (const std::string& id : run.bucket_ids) out << ",level_" << id << ",rec_" << id;
  for (const std::string& id : run.camera_ids)
    out << ",rec_" << id << ",chan_" << id << ",det_" << id;
  for (const std::string& id : run.ptz_ids) {
    out << ",shot_" << id << ",shot_x_" << id << ",shot_y_" << id << ",shot_w_" << id
        << ",shot_h_" << id << ",pan_" << id << ",tilt_" << id << ",zoom_" << id;
  }
  out << "\n";
  for (const TimelineSample& s : run.timeline) {
    out << fmt4(s.t);
    for (std::size_t i = 0; i < run.bucket_ids.size(); ++i) {
      out << "," << fmt4(s.bucket_levels[i]) << "," << int(s.bucket_recording[i]);
    }
    for (std::size_t i = 0; i < run.camera_ids.size(); ++i) {
      out << "," << int(s.camera_requested[i]) << "," << s.camera_channel[i] << ","
          << s.detection_count[i];
    }
    for (const ShotSample& shot : s.shots) {
      out << "," << (shot.active ? 1 : 0) << "," << fmt4(shot.canvas.x) << ","
          << fmt4(shot.canvas.y) << "," << fmt4(shot.canvas.w) << "," << fmt4(shot.canvas.h)
          << "," << fmt4(shot.pose.pan) << "," << fmt4(shot.pose.tilt) << ","
          << fmt4(shot.pose.zoom);
    }
    out << "\n";
  }
}

void write_events_csv(const RunResult& run, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,type,camera,channel,x,y,w,h,pan,tilt,zoom\n";
  for (const EventRow& ev : run.events) {
    out << fmt4(ev.t) << "," << ev.type << "," << ev.camera << ",";
    if (ev.channel >= 0) out << ev.channel;
    out << ",";
    if (ev.has_shot) {
      out << fmt4(ev.canvas.x) << "," << fmt4(ev.canvas.y) << "," << fmt4(ev.canvas.w) << ","
          << fmt4(ev.canvas.h) << "," << fmt4(ev.pose.pan) << "," << fmt4(ev.pose.tilt) << ","
          << fmt4(ev.pose.zoom);
    } else {
      out << ",,,,,,";
    }
    out << "\n";
  }
}

void write_metrics_csv(const MetricsReport& metrics, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "metric,bucket,value\n";
  for (const auto& [id, m] : metrics.per_bucket) {
    out << "tp," << id << "," << m.tp << "\n";
    out << "fp," << id << "," << m.fp << "\n";
    out << "fn," << id << "," << m.fn << "\n";
    out << "tn," << id << "," << m.tn << "\n";
    out << "accuracy," << id << "," << fmt4(m.accuracy) << "\n";
  }
  out << "samples,," << metrics.samples << "\n";
  out << "savings,," << fmt4(metrics.savings) << "\n";
  out << "overhead,," << fmt4(metrics.overhead) << "\n";
  out << "recorded_camera_seconds,," << fmt4(metrics.recorded_camera_seconds) << "\n";
  out << "total_camera_seconds,," << fmt4(metrics.total_camera_seconds) << "\n";
}

MetricsReport read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  MetricsReport metrics;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string metric, bucket, value;
    std::getline(ss, metric, ',');
    std::getline(ss, bucket, ',');
    std::getline(ss, value, ',');
    if (metric == "samples") metrics.samples = std::stoi(value);
    else if (metric == "savings") metrics.savings = std::stod(value);
    else if (metric == "overhead") metrics.overhead = std::stod(value);
    else if (metric == "recorded_camera_seconds") metrics.recorded_camera_seconds = std::stod(value);
    else if (metric == "total_camera_seconds") metrics.total_camera_seconds = std::stod(value);
    else if (metric == "tp") metrics.per_bucket[bucket].tp = std::stoi(value);
    else if (metric == "fp") metrics.per_bucket[bucket].fp = std::stoi(value);
    else if (metric == "fn") metrics.per_bucket[bucket].fn = std::stoi(value);
    else if (metric == "tn") metrics.per_bucket[bucket].tn = std::stoi(value);
    else if (metric == "accuracy") metrics.per_bucket[bucket].accuracy = std::stod(value);
  }
  return metrics;
}

void write_storage_txt(const RunResult& run, const Scenario& sc,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "camera  seconds  bytes\n";
  std::uint64_t total_bytes = 0;
  for (const std::string& id : run.camera_ids) {
    const double secs = run.ledger.recorded_seconds(id);
    const std::uint64_t bytes = storage_bytes(secs, sc.bitrate);
    total_bytes += bytes;
    out << id << "  " << fmt4(secs) << "  " << bytes << "\n";
  }
  out << "total  " << fmt4(run.ledger.recorded_seconds()) << "  " << total_bytes << "\n";
  out << "savings  "
      << fmt4(savings_fraction(run.ledger, double(run.camera_ids.size()) * run.duration)) << "\n";
}

std::string format_report(const MetricsReport& metrics) {
  std::ostringstream out;
  out << "recording decision report\n";
  out << "bucket  samples  tp  fp  fn  tn  accuracy\n";
  for (const auto& [id, m] : metrics.per_bucket) {
    out << id << "  " << metrics.samples << "  " << m.tp << "  " << m.fp << "  " << m.fn << "  "
        << m.tn << "  " << fmt4(m.accuracy) << "\n";
  }
  out << "recorded " << fmt4(metrics.recorded_camera_seconds) << " of "
      << fmt4(metrics.total_camera_seconds) << " camera-seconds\n";
  out << "savings  " << fmt4(metrics.savings) << "\n";
  out << "overhead " << fmt4(metrics.overhead) << "\n";
  return out.str();
}

void write_run_outputs(const RunResult& run, const MetricsReport& metrics, const Scenario& sc,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_timeline_csv(run, dir / "timeline.csv");
  write_events_csv(run, dir / "events.csv");
  write_metrics_csv(metrics, dir / "metrics.csv");
  write_storage_txt(run, sc, dir / "storage.txt");
  std::ofstream out(dir / "report.txt");
  if (!out) throw std::runtime_error("cannot write report.txt");
  out << format_report(metrics);
}

}  // namespace camcrew
