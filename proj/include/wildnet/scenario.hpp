#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wildnet/latency.hpp"
#include "wildnet/radio.hpp"
#include "wildnet/tracking.hpp"
#include "wildnet/udp.hpp"

namespace wildnet {

// Timed ego pose sample; t_ms is relative to the scenario epoch. The
// simulator holds the most recent sample (step interpolation).
struct PosePoint {
  std::int64_t t_ms = 0;
  double lat = 0.0;
  double lon = 0.0;
  double heading_deg = 0.0;
  double speed_mps = 0.0;
  double elev_m = 0.0;
};

struct EgoTrack {
  std::uint32_t station_id = 1;
  std::vector<PosePoint> poses;
};

struct Scenario {
  std::int64_t epoch_ms = 0;
  std::int64_t frame_period_ms = 40;  // 25 FPS
  std::int64_t duration_ms = 40;
  EgoTrack ego;
  std::vector<StationNode> stations;  // other vehicles and RSUs
  RadioModel radio;
  ThresholdConfig thresholds;
  std::filesystem::path detection_log;  // empty = no detections
  std::optional<Endpoint> obu_endpoint;
};

// Parses and invariant-checks a scenario file. Relative paths inside the
// file resolve against the file's directory.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

struct BroadcastEvent {
  std::int64_t frame_id = 0;
  std::int64_t track_id = 0;
  std::uint8_t msg_count = 0;
  std::uint8_t confidence_pct = 0;
  std::size_t encoded_bytes = 0;
};

struct ReceiverAlert {
  std::int64_t frame_id = 0;
  std::uint32_t station_id = 0;
  std::uint8_t confidence_pct = 0;
  double arrival_ms = 0.0;
  bool via_relay = false;
};

struct StageStats {
  std::string source;  // "sampled", "replay-log", or "measured"
  LatencySummary summary;
};

struct SimReport {
  std::uint64_t seed = 0;
  std::uint64_t frames_processed = 0;
  std::uint64_t detections_seen = 0;
  std::uint64_t driver_warnings = 0;  // per track per frame
  std::uint64_t broadcasts = 0;
  std::uint64_t sdsm_encoded = 0;
  std::uint64_t udp_datagrams_sent = 0;
  std::uint64_t udp_send_failures = 0;
  DeliveryStats delivery;
  std::vector<std::int64_t> warning_frames;  // frames with >= 1 warning
  std::vector<BroadcastEvent> broadcast_events;
  std::vector<ReceiverAlert> receiver_alerts;
  std::vector<FrameTiming> frame_timings;
  std::array<StageStats, kStageCount> stage_stats;
  std::optional<double> median_total_ms;
  bool median_under_target = false;
  std::vector<BudgetViolation> violations;
  bool complete = true;  // false when the run aborted mid-way
  std::string abort_reason;
};

struct SimOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<Endpoint> obu_endpoint_override;
  // When true, the capture and sdsm_gen stages report wall-clock
  // measurements of the work actually executed instead of sampled
  // values. Byte-identical reports are only guaranteed with this off.
  bool measure = false;
  bool udp_enabled = true;
};

// Drives the full pipeline frame by frame in lockstep. Deterministic for
// a fixed (scenario, seed) with default options.
SimReport run(const Scenario& scenario, const SimOptions& options = {});

nlohmann::ordered_json report_to_json(const SimReport& report);

// Human-readable summary table (stderr companion to the JSON report).
std::string render_summary(const SimReport& report);

}  // namespace wildnet
