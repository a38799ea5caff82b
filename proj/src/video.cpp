#include "camcrew/video.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "camcrew/rng.hpp"

namespace camcrew {

std::size_t ForegroundMask::count() const {
  std::size_t n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

Frame render_background(const CameraConfig& cam) {
  Frame f(cam.width, cam.height);
  const std::uint64_t key = hash64(cam.id);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    const int offset = int(mix64(key, i) % 11) - 5;
    f.pixels[i] = std::uint8_t(64 + offset);
  }
  return f;
}

std::uint8_t actor_intensity(std::size_t idx) {
  static constexpr std::uint8_t kPalette[] = {170, 210, 140, 230, 190, 250};
  return kPalette[idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

namespace {

void fill_box(Frame& frame, const ImageBox& box, std::uint8_t value) {
  const int x0 = std::max(0L, std::lround(box.x));
  const int y0 = std::max(0L, std::lround(box.y));
  const int x1 = std::min(long(frame.width), std::lround(box.right()));
  const int y1 = std::min(long(frame.height), std::lround(box.bottom()));
  for (int y = y0; y < y1; ++y) {
    std::fill(frame.pixels.begin() + std::size_t(y) * frame.width + x0,
              frame.pixels.begin() + std::size_t(y) * frame.width + x1, value);
  }
}

}  // namespace

void draw_actors(Frame& frame, const Floorplan& plan, const CameraConfig& cam,
                 const std::vector<Actor>& actors, double t) {
  // Painter's order by id; the caller keeps `actors` sorted.
  for (std::size_t i = 0; i < actors.size(); ++i) {
    const auto box = project(plan, cam, actors[i], t);
    if (!box) continue;
    fill_box(frame, *box, actor_intensity(i));
  }
}

Frame render(const CameraConfig& cam, const World& world, double t) {
  Frame frame = render_background(cam);
  draw_actors(frame, world.floorplan, cam, world.actors, t);
  return frame;
}

ForegroundMask bgs_step(BackgroundModel& model, const Frame& frame) {
  if (model.width != frame.width || model.height != frame.height) {
    throw std::invalid_argument("bgs_step: frame dimensions do not match model");
  }
  ForegroundMask mask(frame.width, frame.height);
  if (!model.initialized) {
    for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
      model.mean[i] = float(frame.pixels[i]);
    }
    model.initialized = true;
    return mask;
  }
  const float tau = float(model.tau);
  const float alpha = float(model.alpha);
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    const float diff = float(frame.pixels[i]) - model.mean[i];
    if (std::fabs(diff) > tau) {
      mask.bits[i] = 1;
    } else {
      model.mean[i] += alpha * diff;
    }
  }
  return mask;
}

std::vector<std::int32_t> polygon_pixel_indices(int width, int height,
                                                const std::vector<Vec2>& poly) {
  std::vector<std::int32_t> out;
  if (poly.size() < 3) return out;
  double min_x = poly[0].x, max_x = poly[0].x, min_y = poly[0].y, max_y = poly[0].y;
  for (const Vec2& v : poly) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  const int x0 = std::max(0, int(std::floor(min_x)));
  const int y0 = std::max(0, int(std::floor(min_y)));
  const int x1 = std::min(width, int(std::ceil(max_x)) + 1);
  const int y1 = std::min(height, int(std::ceil(max_y)) + 1);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      if (point_in_polygon({x + 0.5, y + 0.5}, poly)) {
        out.push_back(std::int32_t(y) * width + x);
      }
    }
  }
  return out;
}

double zone_activity(const ForegroundMask& mask, std::span<const std::int32_t> pixel_indices) {
  if (pixel_indices.empty()) {
    throw std::invalid_argument("zone_activity: zone encloses no pixels");
  }
  std::size_t fg = 0;
  for (std::int32_t i : pixel_indices) fg += mask.bits[i];
  return double(fg) / double(pixel_indices.size());
}

double zone_activity(const ForegroundMask& mask, const std::vector<Vec2>& poly) {
  const auto idx = polygon_pixel_indices(mask.width, mask.height, poly);
  return zone_activity(mask, idx);
}

namespace {

void write_pgm_raw(int width, int height, const std::uint8_t* data,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(data), std::streamsize(width) * height);
}

}  // namespace

void write_pgm(const Frame& frame, const std::filesystem::path& path) {
  write_pgm_raw(frame.width, frame.height, frame.pixels.data(), path);
}

void write_pgm(const ForegroundMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> img(mask.bits.size());
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = mask.bits[i] ? 255 : 0;
  write_pgm_raw(mask.width, mask.height, img.data(), path);
}

}  // namespace camcrew
