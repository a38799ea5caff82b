#include <chrono>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "camcrew/cinema.hpp"
#include "camcrew/scenario.hpp"
#include "camcrew/sim.hpp"

namespace {

int cmd_simulate(const std::string& scenario_path, long long seed, double tick_ms,
                 const std::string& out_dir, bool dump_frames, double sample_period) {
  camcrew::Scenario sc = camcrew::load_scenario(scenario_path);
  if (seed >= 0) sc.seed = std::uint64_t(seed);
  if (tick_ms > 0.0) sc.tick = tick_ms / 1000.0;

  camcrew::RunOptions opt;
  if (dump_frames) opt.dump_dir = std::filesystem::path(out_dir) / "frames";

  const auto started = std::chrono::steady_clock::now();
  const camcrew::RunResult result = camcrew::run(sc, sc.seed, opt);
  const camcrew::MetricsReport metrics = camcrew::evaluate(result, sc, sample_period);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  camcrew::write_run_outputs(result, metrics, sc, out_dir);

  std::cout << camcrew::format_report(metrics);
  std::printf("wall time %.2fs, outputs in %s\n", elapsed, out_dir.c_str());
  return 0;
}

int cmd_calibrate(const std::string& scenario_path, int grid, int zooms,
                  const std::string& out_file, const std::string& camera_id) {
  const camcrew::Scenario sc = camcrew::load_scenario(scenario_path);

  const camcrew::CameraConfig* ptz = nullptr;
  for (const camcrew::CameraConfig& cam : sc.world.cameras) {
    if (cam.kind != camcrew::CameraKind::kPtz) continue;
    if (!camera_id.empty() && cam.id != camera_id) continue;
    if (ptz) {
      std::cerr << "several ptz cameras in scenario; pick one with --camera\n";
      return 1;
    }
    ptz = &cam;
  }
  if (!ptz) {
    std::cerr << "no matching ptz camera in scenario\n";
    return 1;
  }
  const camcrew::CameraConfig* overview = sc.find_camera(ptz->paired_overview);

  camcrew::PtzGeometry geom;
  geom.frame_w = overview->width;
  geom.frame_h = overview->height;
  geom.overview_hfov = overview->hfov;
  geom.ptz_hfov = ptz->hfov;
  geom.pan_range_deg = ptz->pan_range_deg;
  geom.tilt_range_deg = ptz->tilt_range_deg;
  geom.zoom_range = ptz->zoom_max;
  geom.cal_zoom_min = sc.calib.zoom_min;
  geom.cal_zoom_max = sc.calib.zoom_max;

  const camcrew::CalibrationTable table = camcrew::calibrate(geom, grid, zooms);
  table.save(out_file);
  std::cout << "wrote " << grid << "x" << grid << "x" << zooms << " table for '" << ptz->id
            << "' to " << out_file << "\n";
  return 0;
}

int cmd_report(const std::string& run_dir) {
  const auto metrics = camcrew::read_metrics_csv(std::filesystem::path(run_dir) / "metrics.csv");
  std::cout << camcrew::format_report(metrics);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-camera recording and virtual-cinematographer simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  long long seed = -1;
  double tick_ms = 0.0;
  std::string out_dir = "out";
  bool dump_frames = false;
  double sample_period = 10.0;

  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario and write the timeline");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--seed", seed, "override the scenario seed");
  simulate->add_option("--tick-ms", tick_ms, "override the tick length in milliseconds");
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_flag("--dump-frames", dump_frames, "dump PGM frames and masks");
  simulate->add_option("--sample-period", sample_period, "metrics sampling period in seconds");

  int grid = 5;
  int zooms = 3;
  std::string out_file = "calibration.txt";
  std::string camera_id;
  CLI::App* calibrate = app.add_subcommand("calibrate", "build a PTZ calibration table");
  calibrate->add_option("--scenario", scenario_path, "scenario file")->required();
  calibrate->add_option("--grid", grid, "grid positions per axis");
  calibrate->add_option("--zooms", zooms, "zoom levels");
  calibrate->add_option("--out", out_file, "output table file");
  calibrate->add_option("--camera", camera_id, "ptz camera id");

  std::string run_dir;
  CLI::App* report = app.add_subcommand("report", "print the report for a finished run");
  report->add_option("--run", run_dir, "run output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(scenario_path, seed, tick_ms, out_dir, dump_frames, sample_period);
    }
    if (calibrate->parsed()) {
      return cmd_calibrate(scenario_path, grid, zooms, out_file, camera_id);
    }
    if (report->parsed()) {
      return cmd_report(run_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
