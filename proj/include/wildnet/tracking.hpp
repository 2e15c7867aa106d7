#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wildnet/detection.hpp"
#include "wildnet/geometry.hpp"

namespace wildnet {

// Decision thresholds for the two decision points: warn the sensing
// driver, and broadcast an alert to other road users. All overridable
// from the scenario file and the CLI.
struct ThresholdConfig {
  double driver_warn_conf = 0.50;
  double broadcast_conf = 0.65;
  int confirm_frames = 3;
  double assoc_iou = 0.3;
  int max_age_frames = 5;
  // Heated backgrounds produce low-confidence false positives; this mode
  // raises the driver threshold to at least 0.65.
  bool hot_weather_mode = false;

  double effective_driver_warn_conf() const {
    return hot_weather_mode ? (driver_warn_conf > 0.65 ? driver_warn_conf : 0.65)
                            : driver_warn_conf;
  }

  // Throws ConfigError unless 0 <= effective driver <= broadcast <= 1,
  // confirm_frames >= 1, assoc_iou in [0,1], max_age_frames >= 0.
  void validate() const;
};

// One temporally-linked object across frames.
struct Track {
  std::int64_t track_id = 0;
  BBox last_bbox;
  double last_confidence = 0.0;
  int consecutive_hits = 0;  // frames in a row with an associated detection
  int age_frames = 0;        // frames since last association
  double peak_confidence = 0.0;  // running max over the track's life
  bool broadcast_issued = false;
  std::int64_t last_update_ms = 0;
  std::optional<double> est_distance_ft;  // carried from the latest detection

  bool operator==(const Track&) const = default;
};

// One association step. Greedy one-to-one matching: candidate
// (detection, track) pairs with IoU >= cfg.assoc_iou are taken in order
// of IoU descending (ties: lower detection index, then lower track_id).
// Matched tracks gain a hit and reset their age; a missed frame resets
// consecutive_hits to 0; tracks older than cfg.max_age_frames are
// dropped; leftover detections spawn new tracks numbered from
// next_track_id.
std::vector<Track> update_tracks(std::vector<Track> tracks,
                                 std::span<const Detection> detections,
                                 std::int64_t now_ms, const ThresholdConfig& cfg,
                                 std::int64_t& next_track_id);

// True when the track's current confidence clears the (hot-weather
// adjusted) driver threshold. Stateless; may fire on the first frame.
bool evaluate_driver_warning(const Track& track, const ThresholdConfig& cfg);

// True when the track has been confirmed for cfg.confirm_frames
// consecutive frames, its peak confidence clears the broadcast
// threshold, and no broadcast has been issued yet. The caller sets
// broadcast_issued on use, so each track broadcasts at most once.
bool evaluate_broadcast(const Track& track, const ThresholdConfig& cfg);

}  // namespace wildnet
