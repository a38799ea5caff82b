#include "camcrew/recorder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace camcrew {

MatrixState::MatrixState(std::vector<std::string> input_ids, int num_channels)
    : inputs(std::move(input_ids)), channels(std::size_t(num_channels)) {
  if (inputs.size() > 20) throw std::invalid_argument("matrix supports at most 20 inputs");
  if (num_channels <= 0) throw std::invalid_argument("matrix needs at least one channel");
}

int MatrixState::channel_of(const std::string& camera) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] && channels[i]->camera == camera) return int(i);
  }
  return -1;
}

int MatrixState::occupied() const {
  int n = 0;
  for (const auto& slot : channels) n += slot.has_value();
  return n;
}

double StorageLedger::recorded_seconds() const {
  double total = 0.0;
  for (const StorageSegment& s : segments) total += s.end - s.start;
  return total;
}

double StorageLedger::recorded_seconds(const std::string& camera) const {
  double total = 0.0;
  for (const StorageSegment& s : segments) {
    if (s.camera == camera) total += s.end - s.start;
  }
  return total;
}

std::vector<RecordSegmentEvent> matrix_tick(MatrixState& state,
                                            const std::set<std::string>& requested,
                                            const std::map<std::string, double>& priority,
                                            double t, StorageLedger& ledger) {
  for (const std::string& cam : requested) {
    if (std::find(state.inputs.begin(), state.inputs.end(), cam) == state.inputs.end()) {
      throw std::invalid_argument("matrix_tick: unknown camera '" + cam + "'");
    }
    if (!priority.count(cam)) {
      throw std::invalid_argument("matrix_tick: no priority for camera '" + cam + "'");
    }
  }

  std::vector<RecordSegmentEvent> events;

  // Stop whatever is no longer requested.
  for (std::size_t i = 0; i < state.channels.size(); ++i) {
    auto& slot = state.channels[i];
    if (slot && !requested.count(slot->camera)) {
      ledger.segments.push_back({slot->camera, slot->start, t});
      events.push_back({RecordEventType::kStop, slot->camera, int(i), t});
      slot.reset();
    }
  }

  // Waiting cameras in priority order, ties by id.
  std::vector<std::string> waiting;
  for (const std::string& cam : requested) {
    if (state.channel_of(cam) < 0) waiting.push_back(cam);
  }
  std::sort(waiting.begin(), waiting.end(), [&](const std::string& a, const std::string& b) {
    const double pa = priority.at(a);
    const double pb = priority.at(b);
    if (pa != pb) return pa > pb;
    return a < b;
  });

  state.pending.clear();
  std::size_t next = 0;
  for (std::size_t i = 0; i < state.channels.size() && next < waiting.size(); ++i) {
    if (state.channels[i]) continue;
    state.channels[i] = ChannelSlot{waiting[next], t};
    events.push_back({RecordEventType::kStart, waiting[next], int(i), t});
    ++next;
  }
  state.pending.assign(waiting.begin() + long(next), waiting.end());
  return events;
}

std::vector<RecordSegmentEvent> close_all(MatrixState& state, double t, StorageLedger& ledger) {
  std::vector<RecordSegmentEvent> events;
  for (std::size_t i = 0; i < state.channels.size(); ++i) {
    auto& slot = state.channels[i];
    if (!slot) continue;
    if (t > slot->start) ledger.segments.push_back({slot->camera, slot->start, t});
    events.push_back({RecordEventType::kStop, slot->camera, int(i), t});
    slot.reset();
  }
  return events;
}

std::uint64_t storage_bytes(double duration_s, std::int64_t bitrate_bps) {
  if (duration_s < 0.0) throw std::invalid_argument("storage_bytes: negative duration");
  if (bitrate_bps < 0) throw std::invalid_argument("storage_bytes: negative bitrate");
  if (duration_s == std::floor(duration_s) &&
      duration_s < 9.0e18 / double(bitrate_bps ? bitrate_bps : 1)) {
    const std::uint64_t bits = std::uint64_t(duration_s) * std::uint64_t(bitrate_bps);
    return (bits + 4) / 8;  // round to nearest byte
  }
  return std::uint64_t(std::llround(duration_s * double(bitrate_bps) / 8.0));
}

double savings_fraction(const StorageLedger& ledger, double total_camera_seconds) {
  if (total_camera_seconds <= 0.0) {
    throw std::invalid_argument("savings_fraction: total must be positive");
  }
  return 1.0 - ledger.recorded_seconds() / total_camera_seconds;
}

}  // namespace camcrew
