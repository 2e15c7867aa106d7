#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wildnet/geometry.hpp"
#include "wildnet/thermal.hpp"

namespace wildnet {

// One scored box in model-input (256x256) pixel space.
struct Detection {
  std::int64_t frame_id = 0;
  BBox bbox;
  double confidence = 0.0;
  int class_id = 0;  // 0 = deer in single-class mode
  std::optional<double> est_distance_ft;

  bool operator==(const Detection&) const = default;
};

// Throws FrameError when the box or confidence violates the invariants
// (box must be well-formed and inside [0,256]^2, confidence in [0,1]).
void validate(const Detection& det);

// Inference latency assumed when a replay log entry carries none.
inline constexpr double kDefaultInferenceMs = 45.0;

// Contract for anything that turns a frame into detections. Must be
// deterministic for a fixed backend state and frame.
class DetectorBackend {
 public:
  struct Result {
    std::vector<Detection> detections;
    double inference_ms = 0.0;
  };

  virtual ~DetectorBackend() = default;
  virtual Result detect(const ThermalFrame& frame) const = 0;
};

// Replays pre-recorded detections from a JSON Lines log keyed by
// frame_id. The only backend this project ships; a live model would slot
// in behind the same interface.
//
// Log line shape:
//   {"frame_id":12, "t_ms":480, "inference_ms":46.0,
//    "detections":[{"bbox":[80,90,140,170], "conf":0.82, "class_id":0,
//                   "est_distance_ft":55.0}]}
// inference_ms and est_distance_ft are optional.
class ReplayDetector : public DetectorBackend {
 public:
  ReplayDetector() = default;

  static ReplayDetector from_file(const std::filesystem::path& path);
  // source_name is used in parse error messages ("source:line: ...").
  static ReplayDetector from_stream(std::istream& in, std::string_view source_name);

  Result detect(const ThermalFrame& frame) const override;
  Result detect_by_id(std::int64_t frame_id) const;

  std::size_t entry_count() const { return entries_.size(); }

 private:
  struct LogEntry {
    std::vector<Detection> detections;
    std::optional<double> inference_ms;
  };

  std::unordered_map<std::int64_t, LogEntry> entries_;
};

}  // namespace wildnet
