#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "camcrew/cinema.hpp"
#include "camcrew/recorder.hpp"
#include "camcrew/scenario.hpp"

namespace camcrew {

struct ShotSample {
  bool active = false;
  ImageBox canvas;
  PtzPose pose;
};

struct TimelineSample {
  double t = 0.0;
  std::vector<double> bucket_levels;            // bucket order
  std::vector<std::uint8_t> bucket_recording;   // bucket order
  std::vector<std::uint8_t> camera_requested;   // camera order, selection output
  std::vector<int> camera_channel;              // camera order, -1 when unassigned
  std::vector<int> detection_count;             // camera order
  std::vector<ShotSample> shots;                // ptz order
};

struct EventRow {
  double t = 0.0;
  std::string type;  // record_start, record_stop, shot_switch, ptz_warning
  std::string camera;
  int channel = -1;
  bool has_shot = false;
  ImageBox canvas;
  PtzPose pose;
};

struct RunResult {
  std::vector<std::string> bucket_ids;
  std::vector<std::string> camera_ids;
  std::vector<std::string> ptz_ids;
  std::vector<TimelineSample> timeline;  // one per tick, t = (i+1)*tick
  std::vector<EventRow> events;
  StorageLedger ledger;
  double duration = 0.0;
  double tick = 0.0;
};

struct RunOptions {
  std::filesystem::path dump_dir;  // when set, PGM frame/mask dumps
  int dump_every = 10;             // every N ticks
};

// Deterministic tick loop: render -> background subtraction -> zone
// activity -> bucket selection -> matrix assignment, plus the detection /
// framing / shot pipeline for every overview camera that steers a PTZ.
RunResult run(const Scenario& scenario, std::uint64_t seed, const RunOptions& options = {});

struct BucketMetrics {
  int tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
};

struct MetricsReport {
  std::map<std::string, BucketMetrics> per_bucket;
  int samples = 0;  // per bucket
  double savings = 0.0;
  double overhead = 0.0;
  double recorded_camera_seconds = 0.0;
  double total_camera_seconds = 0.0;
};

// Compares recording flags against the scenario annotation on the sampling
// grid t = k * sample_period, and derives savings plus the fraction of
// recorded time that no annotation accounts for.
MetricsReport evaluate(const RunResult& run, const Scenario& scenario, double sample_period);

void write_timeline_csv(const RunResult& run, const std::filesystem::path& path);
void write_events_csv(const RunResult& run, const std::filesystem::path& path);
void write_metrics_csv(const MetricsReport& metrics, const std::filesystem::path& path);
MetricsReport read_metrics_csv(const std::filesystem::path& path);
void write_storage_txt(const RunResult& run, const Scenario& scenario,
                       const std::filesystem::path& path);
std::string format_report(const MetricsReport& metrics);

// timeline.csv, events.csv, metrics.csv, storage.txt and report.txt.
void write_run_outputs(const RunResult& run, const MetricsReport& metrics,
                       const Scenario& scenario, const std::filesystem::path& dir);

}  // namespace camcrew
