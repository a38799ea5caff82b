#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "camcrew/scene.hpp"

namespace camcrew {

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major grayscale

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0) : width(w), height(h), pixels(std::size_t(w) * h, fill) {}
  std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
};

struct ForegroundMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 = background, 1 = foreground

  ForegroundMask() = default;
  ForegroundMask(int w, int h) : width(w), height(h), bits(std::size_t(w) * h, 0) {}
  bool at(int x, int y) const { return bits[std::size_t(y) * width + x] != 0; }
  std::size_t count() const;
};

// Running-average background with selective update: only pixels classified
// as background are blended in, so foreground objects do not absorb.
struct BackgroundModel {
  int width = 0;
  int height = 0;
  std::vector<float> mean;
  double alpha = 0.02;   // learning rate, [0,1]
  double tau = 20.0;     // |frame - mean| threshold, gray levels
  bool initialized = false;

  BackgroundModel() = default;
  BackgroundModel(int w, int h, double a, double thr)
      : width(w), height(h), mean(std::size_t(w) * h, 0.0f), alpha(a), tau(thr) {}
};

// Constant 64 plus a per-pixel offset in [-5, +5] keyed on the camera id.
Frame render_background(const CameraConfig& cam);

// Intensity assigned to the idx-th actor (by id order). All palette entries
// sit at least 70 gray levels from the background band.
std::uint8_t actor_intensity(std::size_t idx);

// Paints every visible actor as its projected full-body rectangle, painter's
// order by actor id. `frame` starts as the camera background.
void draw_actors(Frame& frame, const Floorplan& plan, const CameraConfig& cam,
                 const std::vector<Actor>& actors, double t);

Frame render(const CameraConfig& cam, const World& world, double t);

// Classifies, then selectively updates the model. The first frame ever seen
// initializes the mean and classifies as all-background.
// Throws std::invalid_argument on dimension mismatch.
ForegroundMask bgs_step(BackgroundModel& model, const Frame& frame);

// Indices of pixels whose centers fall inside the polygon (even-odd rule),
// clipped to the frame.
std::vector<std::int32_t> polygon_pixel_indices(int width, int height,
                                                const std::vector<Vec2>& poly);

// Foreground fraction over the given pixel set. Throws std::invalid_argument
// when the set is empty.
double zone_activity(const ForegroundMask& mask, std::span<const std::int32_t> pixel_indices);

// Convenience: rasterizes the polygon, then measures.
double zone_activity(const ForegroundMask& mask, const std::vector<Vec2>& poly);

void write_pgm(const Frame& frame, const std::filesystem::path& path);
void write_pgm(const ForegroundMask& mask, const std::filesystem::path& path);

}  // namespace camcrew
