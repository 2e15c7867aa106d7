#include "wildnet/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "wildnet/detection.hpp"
#include "wildnet/error.hpp"
#include "wildnet/sdsm.hpp"
#include "wildnet/thermal.hpp"

namespace wildnet {

namespace {

using nlohmann::json;

RadioModel radio_from_json(const json& j) {
  RadioModel radio;
  if (j.contains("max_range_m")) radio.max_range_m = j["max_range_m"].get<double>();
  if (j.contains("in_range_delivery_prob"))
    radio.in_range_delivery_prob = j["in_range_delivery_prob"].get<double>();
  if (j.contains("per_hop_latency_ms")) {
    const auto& window = j["per_hop_latency_ms"];
    if (!window.is_array() || window.size() != 2)
      throw ConfigError("radio.per_hop_latency_ms must be [min, max]");
    radio.per_hop_latency_min_ms = window[0].get<double>();
    radio.per_hop_latency_max_ms = window[1].get<double>();
  }
  if (j.contains("rng_seed")) radio.rng_seed = j["rng_seed"].get<std::uint64_t>();
  return radio;
}

ThresholdConfig thresholds_from_json(const json& j) {
  ThresholdConfig cfg;
  if (j.contains("driver_warn_conf")) cfg.driver_warn_conf = j["driver_warn_conf"].get<double>();
  if (j.contains("broadcast_conf")) cfg.broadcast_conf = j["broadcast_conf"].get<double>();
  if (j.contains("confirm_frames")) cfg.confirm_frames = j["confirm_frames"].get<int>();
  if (j.contains("assoc_iou")) cfg.assoc_iou = j["assoc_iou"].get<double>();
  if (j.contains("max_age_frames")) cfg.max_age_frames = j["max_age_frames"].get<int>();
  if (j.contains("hot_weather_mode")) cfg.hot_weather_mode = j["hot_weather_mode"].get<bool>();
  return cfg;
}

StationNode station_from_json(const json& j) {
  StationNode node;
  node.station_id = j.at("station_id").get<std::uint32_t>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "obu")
    node.kind = StationKind::obu;
  else if (kind == "rsu")
    node.kind = StationKind::rsu;
  else
    throw ConfigError("station kind must be \"obu\" or \"rsu\", got \"" + kind + "\"");
  node.position.lat = j.at("lat").get<double>();
  node.position.lon = j.at("lon").get<double>();
  if (j.contains("range_m")) node.range_m = j["range_m"].get<double>();
  return node;
}

}  // namespace

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  Scenario sc;
  try {
    if (j.contains("epoch_ms")) sc.epoch_ms = j["epoch_ms"].get<std::int64_t>();
    if (j.contains("frame_period_ms")) sc.frame_period_ms = j["frame_period_ms"].get<std::int64_t>();
    if (j.contains("duration_ms"))
      sc.duration_ms = j["duration_ms"].get<std::int64_t>();
    else
      sc.duration_ms = sc.frame_period_ms;  // one frame by default

    const auto& ego = j.at("ego");
    if (ego.contains("station_id")) sc.ego.station_id = ego["station_id"].get<std::uint32_t>();
    for (const auto& pj : ego.at("poses")) {
      PosePoint pose;
      if (pj.contains("t_ms")) pose.t_ms = pj["t_ms"].get<std::int64_t>();
      pose.lat = pj.at("lat").get<double>();
      pose.lon = pj.at("lon").get<double>();
      if (pj.contains("heading_deg")) pose.heading_deg = pj["heading_deg"].get<double>();
      if (pj.contains("speed_mps")) pose.speed_mps = pj["speed_mps"].get<double>();
      if (pj.contains("elev_m")) pose.elev_m = pj["elev_m"].get<double>();
      sc.ego.poses.push_back(pose);
    }

    if (j.contains("stations"))
      for (const auto& sj : j["stations"]) sc.stations.push_back(station_from_json(sj));
    if (j.contains("radio")) sc.radio = radio_from_json(j["radio"]);
    if (j.contains("thresholds")) sc.thresholds = thresholds_from_json(j["thresholds"]);
    if (j.contains("detection_log") && !j["detection_log"].is_null()) {
      std::filesystem::path log = j["detection_log"].get<std::string>();
      sc.detection_log = log.is_absolute() ? log : base_dir / log;
    }
    if (j.contains("obu_endpoint") && !j["obu_endpoint"].is_null())
      sc.obu_endpoint = Endpoint::parse(j["obu_endpoint"].get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }

  // invariants
  if (sc.frame_period_ms <= 0)
    throw ConfigError("frame_period_ms must be > 0, got " + std::to_string(sc.frame_period_ms));
  if (sc.duration_ms < 0)
    throw ConfigError("duration_ms must be >= 0, got " + std::to_string(sc.duration_ms));
  if (sc.epoch_ms < 0)
    throw ConfigError("epoch_ms must be >= 0, got " + std::to_string(sc.epoch_ms));
  if (sc.ego.poses.empty()) throw ConfigError("ego pose track is empty");
  for (std::size_t i = 1; i < sc.ego.poses.size(); ++i)
    if (sc.ego.poses[i].t_ms <= sc.ego.poses[i - 1].t_ms)
      throw ConfigError("ego pose timestamps must be strictly increasing (index " +
                        std::to_string(i) + ")");
  std::set<std::uint32_t> ids{sc.ego.station_id};
  for (const auto& s : sc.stations) {
    if (s.range_m <= 0.0)
      throw ConfigError("station " + std::to_string(s.station_id) + " has non-positive range_m");
    if (!ids.insert(s.station_id).second)
      throw ConfigError("duplicate station_id " + std::to_string(s.station_id));
  }
  if (sc.radio.max_range_m <= 0.0) throw ConfigError("radio.max_range_m must be > 0");
  if (sc.radio.in_range_delivery_prob < 0.0 || sc.radio.in_range_delivery_prob > 1.0)
    throw ConfigError("radio.in_range_delivery_prob must be in [0,1]");
  if (sc.radio.per_hop_latency_min_ms > sc.radio.per_hop_latency_max_ms)
    throw ConfigError("radio.per_hop_latency_ms window is inverted");
  sc.thresholds.validate();
  if (!sc.detection_log.empty() && !std::filesystem::exists(sc.detection_log))
    throw ConfigError("detection log not found: " + sc.detection_log.string());
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return scenario_from_json(j, path.parent_path());
}

namespace {

const PosePoint& pose_at(const EgoTrack& ego, std::int64_t rel_t_ms) {
  const PosePoint* best = &ego.poses.front();
  for (const auto& pose : ego.poses) {
    if (pose.t_ms <= rel_t_ms) best = &pose;
    else break;
  }
  return *best;
}

// Deterministic synthetic raster so the preprocessing stage has real
// input to chew on; the replay backend ignores the pixels.
ThermalFrame synthesize_frame(std::int64_t frame_id, std::int64_t t_ms) {
  ThermalFrame frame;
  frame.frame_id = frame_id;
  frame.t_ms = t_ms;
  frame.width = 256;
  frame.height = 192;
  frame.pixels.resize(static_cast<std::size_t>(frame.width) * frame.height);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x)
      frame.pixels[static_cast<std::size_t>(y) * frame.width + x] =
          static_cast<std::uint16_t>((x * 31 + y * 61 + frame_id * 131) & 0x3FFF);
  return frame;
}

double wall_ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

constexpr std::uint64_t kStageStreamSalt = 0x9e3779b97f4a7c15ull;

}  // namespace

SimReport run(const Scenario& scenario, const SimOptions& options) {
  SimReport report;

  RadioModel radio = scenario.radio;
  if (options.seed_override) radio.rng_seed = *options.seed_override;
  report.seed = radio.rng_seed;

  // World = ego vehicle plus the configured stations; ego pose updates
  // each frame.
  std::vector<StationNode> world_nodes;
  world_nodes.push_back(StationNode{scenario.ego.station_id, StationKind::obu,
                                    {scenario.ego.poses.front().lat, scenario.ego.poses.front().lon},
                                    radio.max_range_m,
                                    {}});
  for (const auto& s : scenario.stations) world_nodes.push_back(s);
  RadioWorld world(std::move(world_nodes), radio);
  // Separate stream for stage sampling so radio draws stay stable no
  // matter how many stages get sampled.
  DeterministicRng stage_rng(radio.rng_seed ^ kStageStreamSalt);

  ReplayDetector replay;
  if (!scenario.detection_log.empty())
    replay = ReplayDetector::from_file(scenario.detection_log);

  Endpoint endpoint = options.obu_endpoint_override.value_or(
      scenario.obu_endpoint.value_or(Endpoint{}));
  std::optional<UdpSender> sender;
  if (options.udp_enabled) {
    try {
      sender.emplace(endpoint);
    } catch (const TransportError&) {
      sender.reset();  // every send attempt will be counted as a failure
    }
  }

  const auto sample_stage = [&stage_rng](std::size_t stage_index) {
    const StageBudget& budget = kStageBudgets[stage_index];
    return stage_rng.uniform(budget.typical_min_ms, budget.typical_max_ms);
  };

  std::vector<Track> tracks;
  std::int64_t next_track_id = 1;
  std::uint8_t msg_count = 0;
  std::vector<std::size_t> rx_cursor(world.stations().size(), 0);
  std::array<std::vector<double>, kStageCount> stage_samples;

  const std::int64_t n_frames =
      scenario.duration_ms / scenario.frame_period_ms;  // ticks never exceed duration

  try {
    for (std::int64_t i = 0; i < n_frames; ++i) {
      const std::int64_t frame_id = i + 1;
      const std::int64_t rel_t = i * scenario.frame_period_ms;
      const std::int64_t now_ms = scenario.epoch_ms + rel_t;
      const PosePoint& pose = pose_at(scenario.ego, rel_t);
      world.find(scenario.ego.station_id)->position = LatLon{pose.lat, pose.lon};

      FrameTiming timing;
      timing.frame_id = frame_id;

      // capture + preprocessing
      const auto capture_start = std::chrono::steady_clock::now();
      const ThermalFrame frame = synthesize_frame(frame_id, rel_t);
      const GrayFrame gray = normalize_frame(frame);
      const GrayFrame model_input = resize_to_model_input(gray);
      (void)model_input;
      const double capture_sampled = sample_stage(0);
      timing.stages.capture_ms = options.measure ? wall_ms_since(capture_start) : capture_sampled;

      // inference (replayed)
      const auto result = replay.detect(frame);
      timing.stages.inference_ms = result.inference_ms;
      report.detections_seen += result.detections.size();

      tracks = update_tracks(tracks, result.detections, now_ms, scenario.thresholds,
                             next_track_id);

      bool warned = false;
      for (const auto& track : tracks) {
        if (track.age_frames != 0) continue;  // only tracks updated this frame
        if (evaluate_driver_warning(track, scenario.thresholds)) {
          report.driver_warnings += 1;
          warned = true;
        }
      }
      if (warned) report.warning_frames.push_back(frame_id);

      bool sent_this_frame = false;
      for (auto& track : tracks) {
        if (!evaluate_broadcast(track, scenario.thresholds)) continue;
        track.broadcast_issued = true;  // at most one broadcast per track

        const auto gen_start = std::chrono::steady_clock::now();
        const SensorDataSharingMessage msg =
            build_sdsm(track, EgoPose{pose.lat, pose.lon, pose.elev_m, pose.heading_deg,
                                      pose.speed_mps},
                       now_ms, msg_count, scenario.ego.station_id);
        const std::vector<std::uint8_t> bytes = encode(msg);
        const double gen_sampled = sample_stage(2);
        if (!sent_this_frame)
          timing.stages.sdsm_gen_ms =
              options.measure ? wall_ms_since(gen_start) : gen_sampled;

        report.broadcasts += 1;
        report.sdsm_encoded += 1;
        report.broadcast_events.push_back(BroadcastEvent{
            frame_id, track.track_id, msg_count, msg.objects.front().confidence_pct,
            bytes.size()});
        msg_count = static_cast<std::uint8_t>((msg_count + 1) & 0x7F);

        if (options.udp_enabled) {
          try {
            if (!sender) throw TransportError("udp sender unavailable for " + endpoint.to_string());
            sender->send(bytes);
            report.udp_datagrams_sent += 1;
          } catch (const TransportError&) {
            report.udp_send_failures += 1;  // fire-and-forget: never blocks the pipeline
          }
        }

        report.delivery += world.broadcast(bytes, scenario.ego.station_id, now_ms);
        if (!sent_this_frame) timing.stages.v2x_tx_ms = sample_stage(3);
        sent_this_frame = true;
      }

      if (sent_this_frame) {
        // single-hop RSU relays for fresh, non-relayed arrivals
        const auto& stations = world.stations();
        for (std::size_t s = 0; s < stations.size(); ++s) {
          if (stations[s].kind != StationKind::rsu) continue;
          const std::uint32_t rsu_id = stations[s].station_id;
          // rx_log may grow behind this loop; index bounds re-checked each pass
          for (std::size_t r = rx_cursor[s]; r < world.stations()[s].rx_log.size(); ++r) {
            const RxRecord record = world.stations()[s].rx_log[r];
            if (record.via_relay) continue;
            report.delivery += world.rsu_relay(rsu_id, record.payload, record.arrival_ms);
          }
        }

        // receiver-side decode + driver alert at other vehicles
        bool alerted = false;
        for (std::size_t s = 0; s < world.stations().size(); ++s) {
          const StationNode& node = world.stations()[s];
          const std::size_t begin = rx_cursor[s];
          rx_cursor[s] = node.rx_log.size();
          if (node.kind != StationKind::obu || node.station_id == scenario.ego.station_id)
            continue;
          for (std::size_t r = begin; r < node.rx_log.size(); ++r) {
            const RxRecord& record = node.rx_log[r];
            SensorDataSharingMessage received;
            try {
              received = decode(record.payload);
            } catch (const CodecError&) {
              continue;  // malformed datagrams never alert
            }
            report.receiver_alerts.push_back(ReceiverAlert{
                frame_id, node.station_id, received.objects.front().confidence_pct,
                record.arrival_ms, record.via_relay});
            alerted = true;
          }
        }
        if (alerted) {
          timing.stages.rx_decode_ms = sample_stage(4);
          timing.stages.alert_ms = sample_stage(5);
          timing.complete = true;
        }
      }

      // stage sample collection (only stages that ran this frame)
      const auto values = timing.stages.values();
      for (std::size_t s = 0; s < kStageCount; ++s) {
        const bool ran = (s <= 1) || values[s] > 0.0;
        if (ran) stage_samples[s].push_back(values[s]);
      }
      report.frame_timings.push_back(timing);
      report.frames_processed += 1;
    }
  } catch (const std::exception& e) {
    report.complete = false;
    report.abort_reason = e.what();
  }

  static constexpr std::array<const char*, kStageCount> kSampledSource = {
      "sampled", "replay-log", "sampled", "sampled", "sampled", "sampled"};
  for (std::size_t s = 0; s < kStageCount; ++s) {
    report.stage_stats[s].source = kSampledSource[s];
    if (options.measure && (s == 0 || s == 2)) report.stage_stats[s].source = "measured";
    report.stage_stats[s].summary = summarize_latencies(std::move(stage_samples[s]));
  }

  BudgetReport budget = check_budgets(report.frame_timings);
  report.violations = std::move(budget.violations);
  report.median_total_ms = budget.median_total_ms;
  report.median_under_target = budget.median_under_target;
  return report;
}

namespace {

nlohmann::ordered_json summary_to_json(const LatencySummary& summary) {
  nlohmann::ordered_json j;
  j["count"] = summary.count;
  j["min_ms"] = summary.min_ms;
  j["median_ms"] = summary.median_ms;
  j["p95_ms"] = summary.p95_ms;
  j["max_ms"] = summary.max_ms;
  return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(const SimReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["frames_processed"] = report.frames_processed;
  j["detections_seen"] = report.detections_seen;
  j["driver_warnings"] = report.driver_warnings;
  j["broadcasts"] = report.broadcasts;
  j["sdsm_encoded"] = report.sdsm_encoded;
  j["udp"] = {{"datagrams_sent", report.udp_datagrams_sent},
              {"send_failures", report.udp_send_failures}};

  nlohmann::ordered_json delivery;
  delivery["sent"] = report.delivery.sent;
  delivery["delivered"] = report.delivery.delivered;
  delivery["relayed"] = report.delivery.relayed;
  delivery["duplicates_suppressed"] = report.delivery.duplicates_suppressed;
  delivery["hop_latency"] = summary_to_json(summarize_latencies(report.delivery.latency_samples_ms));
  j["delivery"] = std::move(delivery);

  j["warning_frames"] = report.warning_frames;

  j["broadcast_events"] = nlohmann::ordered_json::array();
  for (const auto& ev : report.broadcast_events)
    j["broadcast_events"].push_back({{"frame_id", ev.frame_id},
                                     {"track_id", ev.track_id},
                                     {"msg_count", ev.msg_count},
                                     {"confidence_pct", ev.confidence_pct},
                                     {"encoded_bytes", ev.encoded_bytes}});

  j["receiver_alerts"] = nlohmann::ordered_json::array();
  for (const auto& alert : report.receiver_alerts)
    j["receiver_alerts"].push_back({{"frame_id", alert.frame_id},
                                    {"station_id", alert.station_id},
                                    {"confidence_pct", alert.confidence_pct},
                                    {"arrival_ms", alert.arrival_ms},
                                    {"via_relay", alert.via_relay}});

  nlohmann::ordered_json latency;
  nlohmann::ordered_json stages;
  for (std::size_t s = 0; s < kStageCount; ++s) {
    nlohmann::ordered_json stage = summary_to_json(report.stage_stats[s].summary);
    stage["source"] = report.stage_stats[s].source;
    stages[kStageBudgets[s].name] = std::move(stage);
  }
  latency["stages"] = std::move(stages);
  if (report.median_total_ms)
    latency["median_total_ms"] = *report.median_total_ms;
  else
    latency["median_total_ms"] = nullptr;
  latency["median_under_target"] = report.median_under_target;
  j["latency"] = std::move(latency);

  j["budget_violations"] = nlohmann::ordered_json::array();
  for (const auto& v : report.violations)
    j["budget_violations"].push_back({{"frame_id", v.frame_id},
                                      {"stage", v.stage},
                                      {"value_ms", v.value_ms},
                                      {"limit_ms", v.limit_ms}});

  j["frame_timings"] = nlohmann::ordered_json::array();
  for (const auto& ft : report.frame_timings)
    j["frame_timings"].push_back({{"frame_id", ft.frame_id},
                                  {"capture_ms", ft.stages.capture_ms},
                                  {"inference_ms", ft.stages.inference_ms},
                                  {"sdsm_gen_ms", ft.stages.sdsm_gen_ms},
                                  {"v2x_tx_ms", ft.stages.v2x_tx_ms},
                                  {"rx_decode_ms", ft.stages.rx_decode_ms},
                                  {"alert_ms", ft.stages.alert_ms},
                                  {"total_ms", ft.stages.total_ms()},
                                  {"complete", ft.complete}});

  j["complete"] = report.complete;
  j["abort_reason"] = report.abort_reason;
  return j;
}

std::string render_summary(const SimReport& report) {
  std::ostringstream out;
  out << "frames " << report.frames_processed << ", detections " << report.detections_seen
      << ", warnings " << report.driver_warnings << ", broadcasts " << report.broadcasts
      << "\n";
  out << "delivery: sent " << report.delivery.sent << ", delivered " << report.delivery.delivered
      << ", relayed " << report.delivery.relayed << ", duplicates suppressed "
      << report.delivery.duplicates_suppressed << "\n";
  out << "udp: " << report.udp_datagrams_sent << " datagrams, " << report.udp_send_failures
      << " failures; receiver alerts " << report.receiver_alerts.size() << "\n";
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %-10s %8s %8s %8s %8s %6s\n", "stage", "source",
                "min", "median", "p95", "max", "n");
  out << line;
  for (std::size_t s = 0; s < kStageCount; ++s) {
    const auto& stats = report.stage_stats[s];
    std::snprintf(line, sizeof(line), "%-10s %-10s %8.2f %8.2f %8.2f %8.2f %6zu\n",
                  kStageBudgets[s].name, stats.source.c_str(), stats.summary.min_ms,
                  stats.summary.median_ms, stats.summary.p95_ms, stats.summary.max_ms,
                  stats.summary.count);
    out << line;
  }
  if (report.median_total_ms) {
    std::snprintf(line, sizeof(line), "median total %.2f ms (%s %g ms target)\n",
                  *report.median_total_ms,
                  report.median_under_target ? "under" : "OVER", kMedianTargetMs);
    out << line;
  } else {
    out << "median total: n/a (no complete detection-to-alert frames)\n";
  }
  out << "budget violations: " << report.violations.size() << "\n";
  if (!report.complete) out << "RUN INCOMPLETE: " << report.abort_reason << "\n";
  return out.str();
}

}  // namespace wildnet
