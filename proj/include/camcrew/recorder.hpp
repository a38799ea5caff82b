#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace camcrew {

struct ChannelSlot {
  std::string camera;
  double start = 0.0;
};

// Switch matrix feeding a multi-channel recorder: up to 20 inputs routed
// onto a fixed set of channels (8 by default). No preemption: a recording
// camera keeps its channel until its request drops.
struct MatrixState {
  std::vector<std::string> inputs;                  // known cameras, <= 20
  std::vector<std::optional<ChannelSlot>> channels;  // empty or (camera, start)
  std::vector<std::string> pending;                  // rebuilt each tick by priority

  explicit MatrixState(std::vector<std::string> input_ids, int num_channels = 8);
  int channel_of(const std::string& camera) const;   // -1 when not assigned
  int occupied() const;
};

struct StorageSegment {
  std::string camera;
  double start = 0.0;
  double end = 0.0;
};

struct StorageLedger {
  std::vector<StorageSegment> segments;
  std::int64_t bitrate = 102'000'000;  // bits/second

  double recorded_seconds() const;
  double recorded_seconds(const std::string& camera) const;
};

enum class RecordEventType { kStart, kStop };

struct RecordSegmentEvent {
  RecordEventType type;
  std::string camera;
  int channel = -1;
  double t = 0.0;
};

// Applies one tick of requests: stops cameras that dropped out (closing
// their ledger segments), then assigns free channels to waiting cameras in
// descending priority (ties broken by ascending id). Excess requests queue
// in `pending`, re-sorted every tick. Throws on unknown cameras or missing
// priorities.
std::vector<RecordSegmentEvent> matrix_tick(MatrixState& state,
                                            const std::set<std::string>& requested,
                                            const std::map<std::string, double>& priority,
                                            double t, StorageLedger& ledger);

// Closes every open channel at time t (end of run).
std::vector<RecordSegmentEvent> close_all(MatrixState& state, double t, StorageLedger& ledger);

// duration * bitrate / 8, exact in integer arithmetic when possible,
// rounded to the nearest byte otherwise.
std::uint64_t storage_bytes(double duration_s, std::int64_t bitrate_bps);

// 1 - recorded / total.
double savings_fraction(const StorageLedger& ledger, double total_camera_seconds);

}  // namespace camcrew
