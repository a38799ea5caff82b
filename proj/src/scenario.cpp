#include "camcrew/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "camcrew/video.hpp"

namespace camcrew {

const CameraConfig* Scenario::find_camera(const std::string& id) const {
  for (const CameraConfig& cam : world.cameras) {
    if (cam.id == id) return &cam;
  }
  return nullptr;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct ParseCtx {
  std::string file;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ScenarioError(file + ":" + std::to_string(line_no) + ": " + msg);
  }
};

double parse_double(const ParseCtx& ctx, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    ctx.fail("expected a number, got '" + value + "'");
  }
  if (used != value.size()) ctx.fail("trailing junk in number '" + value + "'");
  return v;
}

long long parse_int(const ParseCtx& ctx, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    ctx.fail("expected an integer, got '" + value + "'");
  }
  if (used != value.size()) ctx.fail("trailing junk in integer '" + value + "'");
  return v;
}

std::vector<double> parse_numbers(const ParseCtx& ctx, const std::string& value) {
  std::istringstream ss(value);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) out.push_back(parse_double(ctx, tok));
  return out;
}

Vec2 parse_vec2(const ParseCtx& ctx, const std::string& value) {
  const auto nums = parse_numbers(ctx, value);
  if (nums.size() != 2) ctx.fail("expected 'x y'");
  return {nums[0], nums[1]};
}

Segment parse_segment(const ParseCtx& ctx, const std::string& value) {
  const auto nums = parse_numbers(ctx, value);
  if (nums.size() != 4) ctx.fail("expected 'x1 y1 x2 y2'");
  return {{nums[0], nums[1]}, {nums[2], nums[3]}};
}

std::vector<Vec2> parse_polygon(const ParseCtx& ctx, const std::string& value) {
  const auto nums = parse_numbers(ctx, value);
  if (nums.size() < 6 || nums.size() % 2 != 0) {
    ctx.fail("polygon needs at least three 'x y' pairs");
  }
  std::vector<Vec2> poly;
  for (std::size_t i = 0; i < nums.size(); i += 2) poly.push_back({nums[i], nums[i + 1]});
  return poly;
}

std::vector<std::string> parse_id_list(const ParseCtx& ctx, const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    // trim
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) ctx.fail("empty id in list");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) ctx.fail("empty id list");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct PendingBucket {
  Bucket bucket;
  bool has_theta_off = false;
  bool has_level_max = false;
};

struct Parser {
  ParseCtx ctx;
  Scenario sc;

  std::string section;
  Room room;
  CameraConfig camera;
  Actor actor;
  Zone zone;
  PendingBucket bucket;
  std::string expect_bucket;
  std::vector<ExpectedInterval> expect_intervals;

  void finish_section() {
    if (section == "room") {
      if (room.name.empty()) ctx.fail("[room] missing name");
      if (room.polygon.empty()) ctx.fail("[room] missing polygon");
      sc.world.floorplan.rooms.push_back(std::move(room));
    } else if (section == "camera") {
      if (camera.id.empty()) ctx.fail("[camera] missing id");
      sc.world.cameras.push_back(std::move(camera));
    } else if (section == "actor") {
      if (actor.id.empty()) ctx.fail("[actor] missing id");
      if (actor.waypoints.empty()) ctx.fail("[actor] needs at least one waypoint");
      sc.world.actors.push_back(std::move(actor));
    } else if (section == "zone") {
      if (zone.id.empty()) ctx.fail("[zone] missing id");
      if (zone.polygon.empty()) ctx.fail("[zone] missing polygon");
      if (zone.camera.empty()) ctx.fail("[zone] missing camera");
      if (zone.buckets.empty()) ctx.fail("[zone] missing buckets");
      sc.zones.push_back(std::move(zone));
    } else if (section == "bucket") {
      if (bucket.bucket.id.empty()) ctx.fail("[bucket] missing id");
      if (!bucket.has_theta_off) bucket.bucket.theta_off = 0.5 * bucket.bucket.theta_on;
      if (!bucket.has_level_max) bucket.bucket.level_max = 3.0 * bucket.bucket.theta_on;
      sc.buckets.push_back(std::move(bucket.bucket));
    } else if (section == "expect") {
      if (expect_bucket.empty()) ctx.fail("[expect] missing bucket");
      auto& dst = sc.expected[expect_bucket];
      dst.insert(dst.end(), expect_intervals.begin(), expect_intervals.end());
    }
    section.clear();
    room = {};
    camera = {};
    actor = {};
    zone = {};
    bucket = {};
    expect_bucket.clear();
    expect_intervals.clear();
  }

  void begin_section(const std::string& name) {
    finish_section();
    static const char* kKnown[] = {"room", "wall", "door", "camera", "actor",
                                   "zone", "bucket", "params", "expect"};
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&](const char* k) { return name == k; }) == std::end(kKnown)) {
      ctx.fail("unknown section [" + name + "]");
    }
    section = name;
  }

  void key_value(const std::string& key, const std::string& value) {
    if (section.empty()) ctx.fail("key outside a section");
    if (section == "room") {
      if (key == "name") room.name = value;
      else if (key == "polygon") room.polygon = parse_polygon(ctx, value);
      else ctx.fail("unknown [room] key '" + key + "'");
    } else if (section == "wall") {
      if (key == "segment") sc.world.floorplan.walls.push_back(parse_segment(ctx, value));
      else ctx.fail("unknown [wall] key '" + key + "'");
    } else if (section == "door") {
      if (key == "segment") sc.world.floorplan.doors.push_back(parse_segment(ctx, value));
      else ctx.fail("unknown [door] key '" + key + "'");
    } else if (section == "camera") {
      camera_key(key, value);
    } else if (section == "actor") {
      actor_key(key, value);
    } else if (section == "zone") {
      if (key == "id") zone.id = value;
      else if (key == "camera") zone.camera = value;
      else if (key == "polygon") zone.polygon = parse_polygon(ctx, value);
      else if (key == "weight") zone.weight = parse_double(ctx, value);
      else if (key == "buckets") zone.buckets = parse_id_list(ctx, value);
      else ctx.fail("unknown [zone] key '" + key + "'");
    } else if (section == "bucket") {
      bucket_key(key, value);
    } else if (section == "params") {
      params_key(key, value);
    } else if (section == "expect") {
      if (key == "bucket") expect_bucket = value;
      else if (key == "interval") {
        const auto nums = parse_numbers(ctx, value);
        if (nums.size() != 2) ctx.fail("interval needs 'start end'");
        expect_intervals.push_back({nums[0], nums[1]});
      } else ctx.fail("unknown [expect] key '" + key + "'");
    }
  }

  void camera_key(const std::string& key, const std::string& value) {
    if (key == "id") camera.id = value;
    else if (key == "kind") {
      if (value == "static") camera.kind = CameraKind::kStatic;
      else if (value == "overview") camera.kind = CameraKind::kOverview;
      else if (value == "ptz") camera.kind = CameraKind::kPtz;
      else ctx.fail("camera kind must be static, overview or ptz");
    } else if (key == "position") camera.position = parse_vec2(ctx, value);
    else if (key == "mount_height") camera.mount_height = parse_double(ctx, value);
    else if (key == "yaw_deg") camera.yaw = parse_double(ctx, value) * kPi / 180.0;
    else if (key == "hfov_deg") camera.hfov = parse_double(ctx, value) * kPi / 180.0;
    else if (key == "resolution") {
      const auto x = value.find('x');
      if (x == std::string::npos) ctx.fail("resolution must be WxH");
      camera.width = int(parse_int(ctx, trim(value.substr(0, x))));
      camera.height = int(parse_int(ctx, trim(value.substr(x + 1))));
    } else if (key == "overview") camera.paired_overview = value;
    else if (key == "pan_range_deg") camera.pan_range_deg = parse_double(ctx, value);
    else if (key == "tilt_range_deg") camera.tilt_range_deg = parse_double(ctx, value);
    else if (key == "zoom_max") camera.zoom_max = parse_double(ctx, value);
    else ctx.fail("unknown [camera] key '" + key + "'");
  }

  void actor_key(const std::string& key, const std::string& value) {
    if (key == "id") actor.id = value;
    else if (key == "body_height") actor.body_height = parse_double(ctx, value);
    else if (key == "body_width") actor.body_width = parse_double(ctx, value);
    else if (key == "eye_height_fraction") actor.eye_height_fraction = parse_double(ctx, value);
    else if (key == "waypoint") {
      const auto nums = parse_numbers(ctx, value);
      if (nums.size() != 3) ctx.fail("waypoint needs 't x y'");
      actor.waypoints.push_back({nums[0], {nums[1], nums[2]}});
    } else ctx.fail("unknown [actor] key '" + key + "'");
  }

  void bucket_key(const std::string& key, const std::string& value) {
    if (key == "id") bucket.bucket.id = value;
    else if (key == "theta_on") bucket.bucket.theta_on = parse_double(ctx, value);
    else if (key == "theta_off") {
      bucket.bucket.theta_off = parse_double(ctx, value);
      bucket.has_theta_off = true;
    } else if (key == "leak") bucket.bucket.leak = parse_double(ctx, value);
    else if (key == "level_max") {
      bucket.bucket.level_max = parse_double(ctx, value);
      bucket.has_level_max = true;
    } else if (key == "cameras") bucket.bucket.cameras = parse_id_list(ctx, value);
    else ctx.fail("unknown [bucket] key '" + key + "'");
  }

  void params_key(const std::string& key, const std::string& value) {
    if (key == "duration") sc.duration = parse_double(ctx, value);
    else if (key == "tick") sc.tick = parse_double(ctx, value);
    else if (key == "seed") sc.seed = std::uint64_t(parse_int(ctx, value));
    else if (key == "channels") sc.channels = int(parse_int(ctx, value));
    else if (key == "bitrate") sc.bitrate = parse_int(ctx, value);
    else if (key == "alpha") sc.bgs.alpha = parse_double(ctx, value);
    else if (key == "tau") sc.bgs.tau = parse_double(ctx, value);
    else if (key == "warmup") sc.bgs.warmup = int(parse_int(ctx, value));
    else if (key == "min_area") sc.detect.min_area = int(parse_int(ctx, value));
    else if (key == "margin_frac") sc.detect.margin_frac = parse_double(ctx, value);
    else if (key == "jitter") sc.detect.jitter_px = parse_double(ctx, value);
    else if (key == "p_miss") sc.detect.p_miss = parse_double(ctx, value);
    else if (key == "frontal_cone_deg") sc.detect.frontal_cone_deg = parse_double(ctx, value);
    else if (key == "dedup_iou") sc.detect.dedup_iou = parse_double(ctx, value);
    else if (key == "width_margin") sc.compose.width_margin = parse_double(ctx, value);
    else if (key == "margin_floor") sc.compose.margin_floor = parse_double(ctx, value);
    else if (key == "eye_line") sc.compose.eye_line = parse_double(ctx, value);
    else if (key == "single_height_factor")
      sc.compose.single_height_factor = parse_double(ctx, value);
    else if (key == "iou_min") sc.diff.iou_min = parse_double(ctx, value);
    else if (key == "center_shift_max") sc.diff.center_shift_max = parse_double(ctx, value);
    else if (key == "size_ratio_min") sc.diff.size_ratio_min = parse_double(ctx, value);
    else if (key == "size_ratio_max") sc.diff.size_ratio_max = parse_double(ctx, value);
    else if (key == "steady_window") sc.steady.window_s = parse_double(ctx, value);
    else if (key == "eps_move") sc.steady.eps_move = parse_double(ctx, value);
    else if (key == "eps_size") sc.steady.eps_size = parse_double(ctx, value);
    else if (key == "min_shot") sc.min_shot_s = parse_double(ctx, value);
    else if (key == "hold") sc.hold_s = parse_double(ctx, value);
    else if (key == "cal_grid") sc.calib.grid = int(parse_int(ctx, value));
    else if (key == "cal_zooms") sc.calib.zooms = int(parse_int(ctx, value));
    else if (key == "cal_zoom_min") sc.calib.zoom_min = parse_double(ctx, value);
    else if (key == "cal_zoom_max") sc.calib.zoom_max = parse_double(ctx, value);
    else ctx.fail("unknown [params] key '" + key + "'");
  }
};

template <typename T, typename GetId>
void check_unique_sorted(std::vector<T>& items, GetId get_id, const char* what) {
  std::sort(items.begin(), items.end(),
            [&](const T& a, const T& b) { return get_id(a) < get_id(b); });
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (get_id(items[i]) == get_id(items[i - 1])) {
      throw ScenarioError(std::string("duplicate ") + what + " id '" + get_id(items[i]) + "'");
    }
  }
}

void check_id(const std::string& id, const char* what) {
  if (id.empty()) throw ScenarioError(std::string(what) + " with empty id");
  if (id.find_first_of(", \t") != std::string::npos) {
    throw ScenarioError(std::string(what) + " id '" + id + "' contains separators");
  }
}

}  // namespace

void validate_scenario(Scenario& sc) {
  if (sc.duration <= 0.0) throw ScenarioError("duration must be positive");
  if (sc.tick <= 0.0) throw ScenarioError("tick must be positive");
  if (sc.channels <= 0) throw ScenarioError("channels must be positive");
  if (sc.world.cameras.size() > 20) throw ScenarioError("at most 20 cameras supported");
  if (sc.bgs.alpha < 0.0 || sc.bgs.alpha > 1.0) throw ScenarioError("alpha must be in [0,1]");
  if (sc.bgs.tau <= 0.0) throw ScenarioError("tau must be positive");

  check_unique_sorted(sc.world.cameras, [](const CameraConfig& c) { return c.id; }, "camera");
  check_unique_sorted(sc.world.actors, [](const Actor& a) { return a.id; }, "actor");
  check_unique_sorted(sc.zones, [](const Zone& z) { return z.id; }, "zone");
  check_unique_sorted(sc.buckets, [](const Bucket& b) { return b.id; }, "bucket");

  for (const Room& room : sc.world.floorplan.rooms) {
    if (room.polygon.size() < 3 || !polygon_is_convex(room.polygon)) {
      throw ScenarioError("room '" + room.name + "' polygon must be convex");
    }
  }
  for (const Segment& wall : sc.world.floorplan.walls) {
    if (norm(wall.b - wall.a) <= 0.0) throw ScenarioError("wall segment has zero length");
  }
  for (const Segment& door : sc.world.floorplan.doors) {
    bool on_wall = false;
    for (const Segment& wall : sc.world.floorplan.walls) {
      if (point_on_segment(door.a, wall, 1e-6) && point_on_segment(door.b, wall, 1e-6)) {
        on_wall = true;
        break;
      }
    }
    if (!on_wall) throw ScenarioError("door segment does not lie on any wall");
  }

  for (const CameraConfig& cam : sc.world.cameras) {
    check_id(cam.id, "camera");
    if (cam.width <= 0 || cam.height <= 0) {
      throw ScenarioError("camera '" + cam.id + "' needs a positive resolution");
    }
    if (cam.hfov <= 0.0 || cam.hfov >= kPi) {
      throw ScenarioError("camera '" + cam.id + "' hfov must be in (0, 180) degrees");
    }
    if (cam.kind == CameraKind::kPtz) {
      const CameraConfig* ov = sc.find_camera(cam.paired_overview);
      if (!ov) {
        throw ScenarioError("ptz camera '" + cam.id + "' references unknown overview '" +
                            cam.paired_overview + "'");
      }
      if (ov->kind != CameraKind::kOverview) {
        throw ScenarioError("ptz camera '" + cam.id + "' must pair with an overview camera");
      }
    }
  }

  for (const Actor& actor : sc.world.actors) {
    check_id(actor.id, "actor");
    if (actor.body_height <= 0.0 || actor.body_width <= 0.0) {
      throw ScenarioError("actor '" + actor.id + "' body dimensions must be positive");
    }
    if (actor.eye_height_fraction <= 0.0 || actor.eye_height_fraction > 1.0) {
      throw ScenarioError("actor '" + actor.id + "' eye_height_fraction must be in (0,1]");
    }
    for (std::size_t i = 1; i < actor.waypoints.size(); ++i) {
      if (actor.waypoints[i].t <= actor.waypoints[i - 1].t) {
        throw ScenarioError("actor '" + actor.id + "' waypoint times must strictly increase");
      }
    }
    if (actor.waypoints.front().t > 0.0 || actor.waypoints.back().t < sc.duration) {
      throw ScenarioError("actor '" + actor.id + "' trajectory must cover [0, duration]");
    }
  }

  for (const Zone& zone : sc.zones) {
    check_id(zone.id, "zone");
    if (zone.weight < 0.0) throw ScenarioError("zone '" + zone.id + "' weight must be >= 0");
    const CameraConfig* cam = sc.find_camera(zone.camera);
    if (!cam) {
      throw ScenarioError("zone '" + zone.id + "' references unknown camera '" + zone.camera + "'");
    }
    for (const std::string& b : zone.buckets) {
      const bool found = std::any_of(sc.buckets.begin(), sc.buckets.end(),
                                     [&](const Bucket& bucket) { return bucket.id == b; });
      if (!found) {
        throw ScenarioError("zone '" + zone.id + "' references unknown bucket '" + b + "'");
      }
    }
    if (polygon_pixel_indices(cam->width, cam->height, zone.polygon).empty()) {
      throw ScenarioError("zone '" + zone.id + "' encloses no pixels in camera '" + zone.camera +
                          "'");
    }
  }

  for (const Bucket& bucket : sc.buckets) {
    check_id(bucket.id, "bucket");
    if (!(0.0 < bucket.theta_off && bucket.theta_off <= bucket.theta_on &&
          bucket.theta_on <= bucket.level_max)) {
      throw ScenarioError("bucket '" + bucket.id +
                          "' needs 0 < theta_off <= theta_on <= level_max");
    }
    if (bucket.leak < 0.0) throw ScenarioError("bucket '" + bucket.id + "' leak must be >= 0");
    if (bucket.level < 0.0 || bucket.level > bucket.level_max) {
      throw ScenarioError("bucket '" + bucket.id + "' level outside [0, level_max]");
    }
    for (const std::string& cam : bucket.cameras) {
      if (!sc.find_camera(cam)) {
        throw ScenarioError("bucket '" + bucket.id + "' references unknown camera '" + cam + "'");
      }
    }
  }

  for (const auto& [bucket_id, intervals] : sc.expected) {
    const bool found = std::any_of(sc.buckets.begin(), sc.buckets.end(),
                                   [&](const Bucket& b) { return b.id == bucket_id; });
    if (!found) {
      throw ScenarioError("[expect] references unknown bucket '" + bucket_id + "'");
    }
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      if (intervals[i].end <= intervals[i].start) {
        throw ScenarioError("expected interval for '" + bucket_id + "' has end <= start");
      }
      if (i > 0 && intervals[i].start <= intervals[i - 1].end) {
        throw ScenarioError("expected intervals for '" + bucket_id +
                            "' must be sorted and disjoint");
      }
    }
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());

  Parser p;
  p.ctx.file = path.string();

  std::string raw;
  while (std::getline(in, raw)) {
    ++p.ctx.line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.ctx.fail("malformed section header");
      p.begin_section(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.ctx.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) p.ctx.fail("empty key");
    p.key_value(key, value);
  }
  p.finish_section();

  try {
    validate_scenario(p.sc);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  return p.sc;
}

}  // namespace camcrew
