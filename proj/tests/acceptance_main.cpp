// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one pass/fail line per criterion.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wildnet/eval.hpp"
#include "wildnet/geo.hpp"
#include "wildnet/latency.hpp"
#include "wildnet/radio.hpp"
#include "wildnet/scenario.hpp"
#include "wildnet/sdsm.hpp"
#include "wildnet/tracking.hpp"

namespace {

using namespace wildnet;

namespace fs = std::filesystem;

const std::string kCli = WILDNET_CLI_PATH;
const fs::path kFixtures = WILDNET_FIXTURE_DIR;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

int g_failures = 0;

void criterion(int number, const std::string& name, const std::function<void()>& body) {
  try {
    body();
    std::printf("PASS criterion %2d: %s\n", number, name.c_str());
  } catch (const Failure& f) {
    ++g_failures;
    std::printf("FAIL criterion %2d: %s -- %s\n", number, name.c_str(), f.what.c_str());
  } catch (const std::exception& e) {
    ++g_failures;
    std::printf("FAIL criterion %2d: %s -- unexpected error: %s\n", number, name.c_str(),
                e.what());
  }
}

std::string run_command(const std::string& cmd, int& exit_code) {
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) throw Failure{"popen failed for: " + cmd};
  std::string out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

SensorDataSharingMessage random_message(std::mt19937_64& rng) {
  const auto pick = [&rng](long long lo, long long hi) -> long long {
    switch (rng() % 7) {
      case 0: return lo;
      case 1: return hi;
      default:
        return lo + static_cast<long long>(rng() % static_cast<unsigned long long>(hi - lo + 1));
    }
  };
  SensorDataSharingMessage m;
  m.msg_count = static_cast<std::uint8_t>(pick(0, 127));
  m.source_id = static_cast<std::uint32_t>(pick(0, 0xFFFFFFFFll));
  m.sdsm_time_ms = rng();
  m.ref_lat = static_cast<std::int32_t>(pick(-900000000, 900000000));
  m.ref_lon = static_cast<std::int32_t>(pick(-1800000000, 1800000000));
  m.ref_elev_dm = static_cast<std::int16_t>(pick(-32768, 32767));
  const std::size_t n = (rng() % 50 == 0) ? 200 + rng() % 56 : 1 + rng() % 12;
  for (std::size_t i = 0; i < n; ++i) {
    DetectedObject o;
    o.obj_type = static_cast<std::uint8_t>(pick(0, 15));
    o.obj_id = static_cast<std::uint16_t>(pick(0, 65535));
    o.time_offset_ms = static_cast<std::uint16_t>(pick(0, 65535));
    o.pos_offset_x_dm = static_cast<std::int16_t>(pick(-32768, 32767));
    o.pos_offset_y_dm = static_cast<std::int16_t>(pick(-32768, 32767));
    o.speed_units = static_cast<std::uint16_t>(pick(0, 65535));
    o.heading_units = static_cast<std::uint16_t>(pick(0, 28799));
    o.confidence_pct = static_cast<std::uint8_t>(pick(0, 100));
    m.objects.push_back(o);
  }
  return m;
}

// brute-force all-threshold AP enumeration
double oracle_ap(const std::vector<std::pair<double, bool>>& preds, std::size_t num_gt) {
  std::vector<double> thresholds;
  for (const auto& [conf, tp] : preds) thresholds.push_back(conf);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double sum = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = static_cast<double>(i) / 100.0;
    double best = 0.0;
    for (const double c : thresholds) {
      std::size_t tp = 0;
      std::size_t fp = 0;
      for (const auto& [conf, is_tp] : preds)
        if (conf >= c) (is_tp ? tp : fp) += 1;
      const double recall = static_cast<double>(tp) / static_cast<double>(num_gt);
      const double precision =
          (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
      if (recall >= r && precision > best) best = precision;
    }
    sum += best;
  }
  return sum / 101.0;
}

StationNode node(std::uint32_t id, StationKind kind, const LatLon& pos) {
  StationNode n;
  n.station_id = id;
  n.kind = kind;
  n.position = pos;
  return n;
}

}  // namespace

int main() {
  criterion(1, "f1(0.9544, 0.9596) reproduces 0.9570 within 1e-4", [] {
    const double f1 = f1_score(0.9544, 0.9596);
    require(std::abs(f1 - 0.9570) <= 1e-4,
            "f1 = " + std::to_string(f1) + " not within 1e-4 of 0.9570");
  });

  criterion(2, "dataset split 9118/2009/910 of 12037 validates at 75.8/16.7/7.6", [] {
    const auto check = validate_split({9118, 2009, 910, 12037, 75.8, 16.7, 7.6});
    std::string joined;
    for (const auto& f : check.failures) joined += f + "; ";
    require(check.pass, "split check failed: " + joined);
    require(std::abs(check.recomputed_train_pct - 75.8) <= 0.1, "train pct drifted");
    require(std::abs(check.recomputed_val_pct - 16.7) <= 0.1, "val pct drifted");
    require(std::abs(check.recomputed_test_pct - 7.6) <= 0.1, "test pct drifted");
  });

  criterion(3, "stage midpoints total 96.5 ms < 100 with zero violations; one overage flags once", [] {
    FrameTiming frame;
    frame.frame_id = 1;
    frame.stages = {10.0, 45.0, 9.0, 12.5, 12.5, 7.5};
    frame.complete = true;
    const auto clean = check_budgets(std::vector<FrameTiming>{frame});
    require(clean.violations.empty(), "unexpected violations at typical midpoints");
    require(clean.median_total_ms.has_value() && *clean.median_total_ms == 96.5,
            "median total is not 96.5 ms");
    require(clean.median_under_target, "96.5 ms not reported under the 100 ms target");

    for (std::size_t s = 0; s < kStageCount; ++s) {
      FrameTiming over = frame;
      auto set_stage = [&over](std::size_t idx, double v) {
        switch (idx) {
          case 0: over.stages.capture_ms = v; break;
          case 1: over.stages.inference_ms = v; break;
          case 2: over.stages.sdsm_gen_ms = v; break;
          case 3: over.stages.v2x_tx_ms = v; break;
          case 4: over.stages.rx_decode_ms = v; break;
          case 5: over.stages.alert_ms = v; break;
        }
      };
      set_stage(s, kStageBudgets[s].max_ms + 5.0);
      const auto flagged = check_budgets(std::vector<FrameTiming>{over});
      require(flagged.violations.size() == 1,
              std::string("stage ") + kStageBudgets[s].name + " overage flagged " +
                  std::to_string(flagged.violations.size()) + " times, expected exactly 1");
      require(flagged.violations[0].stage == kStageBudgets[s].name, "wrong stage flagged");
    }
  });

  criterion(4, "codec: 10,000 random SDSMs round-trip; length law holds for n=1..255", [] {
    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 10000; ++i) {
      const auto msg = random_message(rng);
      const auto bytes = encode(msg);
      if (!(decode(bytes) == msg)) throw Failure{"decode(encode(m)) != m at i=" + std::to_string(i)};
      if (encode(decode(bytes)) != bytes)
        throw Failure{"encode(decode(b)) != b at i=" + std::to_string(i)};
    }
    for (std::size_t n = 1; n <= 255; ++n) {
      SensorDataSharingMessage msg;
      msg.objects.assign(n, DetectedObject{});
      const std::size_t expected = (190 + 107 * n + 7) / 8;
      if (encode(msg).size() != expected)
        throw Failure{"length law broken at n=" + std::to_string(n)};
    }
  });

  criterion(5, "AP equals the brute-force enumeration oracle on 1,000 seeded instances", [] {
    std::mt19937 rng(555);
    int checked = 0;
    while (checked < 1000) {
      PredictionSet ps;
      GroundTruthSet gs;
      const std::size_t n_images = 1 + rng() % 4;
      std::size_t total_gt = 0;
      std::size_t total_boxes = 0;
      for (std::size_t i = 0; i < n_images && total_boxes < 10; ++i) {
        ImageGroundTruth g;
        g.image_id = "img" + std::to_string(i);
        ImagePredictions p;
        p.image_id = g.image_id;
        const std::size_t ng = rng() % 3;
        const std::size_t np = rng() % 3;
        for (std::size_t k = 0; k < ng && total_boxes < 10; ++k, ++total_boxes) {
          const double x = static_cast<double>(rng() % 100);
          const double y = static_cast<double>(rng() % 100);
          GtBox box;
          box.bbox = {x, y, x + 10 + static_cast<double>(rng() % 30),
                      y + 10 + static_cast<double>(rng() % 30)};
          g.boxes.push_back(box);
        }
        for (std::size_t k = 0; k < np && total_boxes < 10; ++k, ++total_boxes) {
          const double x = static_cast<double>(rng() % 100);
          const double y = static_cast<double>(rng() % 100);
          PredBox box;
          box.bbox = {x, y, x + 10 + static_cast<double>(rng() % 30),
                      y + 10 + static_cast<double>(rng() % 30)};
          box.confidence = (1 + rng() % 10) / 10.0;
          p.boxes.push_back(box);
        }
        total_gt += g.boxes.size();
        gs.images.push_back(std::move(g));
        ps.images.push_back(std::move(p));
      }
      if (total_gt == 0) continue;
      ++checked;
      const auto result = match_detections(ps, gs, 0.5);
      std::vector<std::pair<double, bool>> records;
      for (const auto& rec : result.preds) records.emplace_back(rec.confidence, rec.is_tp);
      const double impl = average_precision(pr_curve(result));
      const double oracle = oracle_ap(records, total_gt);
      if (std::abs(impl - oracle) >= 1e-9)
        throw Failure{"instance " + std::to_string(checked) + ": impl " + std::to_string(impl) +
                      " vs oracle " + std::to_string(oracle)};
    }
  });

  criterion(6, "delivery: 10,000 trials at 500 m land in [9740, 9860]; none beyond 1000 m", [] {
    const LatLon origin{35.8262, -82.5487};
    RadioModel model;  // prob 0.98, seed 42
    RadioWorld world({node(1, StationKind::obu, origin),
                      node(2, StationKind::obu, offset_north_m(origin, 500.0))},
                     model);
    SensorDataSharingMessage msg;
    msg.source_id = 1;
    msg.objects.push_back(DetectedObject{});
    const auto payload = encode(msg);
    DeliveryStats total;
    for (int i = 0; i < 10000; ++i) total += world.broadcast(payload, 1, i);
    require(total.delivered >= 9740 && total.delivered <= 9860,
            "delivered " + std::to_string(total.delivered) + " outside [9740, 9860]");

    for (std::uint64_t seed = 0; seed < 64; ++seed) {
      RadioModel hot;
      hot.rng_seed = seed;
      hot.in_range_delivery_prob = 1.0;
      RadioWorld far({node(1, StationKind::obu, origin),
                      node(2, StationKind::obu, offset_north_m(origin, 1000.01)),
                      node(3, StationKind::obu, offset_north_m(origin, 1430.0)),
                      node(4, StationKind::obu, offset_north_m(origin, 5000.0))},
                     hot);
      for (int i = 0; i < 25; ++i) far.broadcast(payload, 1, i);
      require(far.totals().delivered == 0,
              "delivery beyond 1000 m with seed " + std::to_string(seed));
    }
  });

  criterion(7, "RSU relay: the 1500 m-spaced receiver alerts iff the RSU is present", [] {
    SimOptions options;
    options.udp_enabled = false;
    const auto with_rsu = run(load_scenario(kFixtures / "marshill_small.json"), options);
    require(!with_rsu.receiver_alerts.empty(), "no alert at the far vehicle with the RSU present");
    for (const auto& alert : with_rsu.receiver_alerts)
      require(alert.via_relay, "far vehicle alert did not travel through the relay");

    const auto without_rsu = run(load_scenario(kFixtures / "marshill_no_rsu.json"), options);
    require(without_rsu.broadcasts == with_rsu.broadcasts,
            "broadcast behavior changed when removing the RSU");
    require(without_rsu.receiver_alerts.empty(),
            "alert reached the far vehicle without any relay path");
  });

  criterion(8, "N identical detections broadcast exactly at frame N, once per track (N=1..10)", [] {
    for (int n = 1; n <= 10; ++n) {
      ThresholdConfig cfg;
      cfg.confirm_frames = n;
      std::vector<Track> tracks;
      std::int64_t next_id = 1;
      int first_broadcast_frame = 0;
      int broadcast_count = 0;
      for (int frame = 1; frame <= n + 6; ++frame) {
        Detection det;
        det.frame_id = frame;
        det.bbox = {80, 90, 140, 170};
        det.confidence = 0.82;
        tracks = update_tracks(std::move(tracks), std::vector<Detection>{det}, 40 * frame,
                               cfg, next_id);
        for (auto& t : tracks) {
          if (evaluate_broadcast(t, cfg)) {
            t.broadcast_issued = true;
            ++broadcast_count;
            if (first_broadcast_frame == 0) first_broadcast_frame = frame;
          }
        }
        if (frame < n && broadcast_count > 0)
          throw Failure{"broadcast before frame N for N=" + std::to_string(n)};
      }
      require(first_broadcast_frame == n,
              "N=" + std::to_string(n) + ": first broadcast at frame " +
                  std::to_string(first_broadcast_frame));
      require(broadcast_count == 1,
              "N=" + std::to_string(n) + ": " + std::to_string(broadcast_count) + " SDSMs");
    }
  });

  criterion(9, "cmd_simulate on the fixture with --seed 7 is byte-identical across runs", [] {
    const std::string cmd =
        kCli + " simulate " + (kFixtures / "marshill_small.json").string() + " --seed 7 --no-udp";
    int code_a = -1;
    int code_b = -1;
    const std::string a = run_command(cmd, code_a);
    const std::string b = run_command(cmd, code_b);
    require(code_a == 0, "first run exited " + std::to_string(code_a));
    require(code_b == 0, "second run exited " + std::to_string(code_b));
    require(!a.empty(), "empty report");
    require(a == b, "reports differ between runs");
  });

  criterion(10, "loopback: warning on frame 1, broadcast on frame 3, receiver alert at 82%", [] {
    SimOptions options;
    options.udp_enabled = false;
    const auto report = run(load_scenario(kFixtures / "marshill_small.json"), options);
    require(!report.warning_frames.empty() && report.warning_frames.front() == 1,
            "driver warning did not fire on frame 1");
    require(!report.broadcast_events.empty(), "no broadcast");
    require(report.broadcast_events.front().frame_id == 3,
            "first broadcast at frame " + std::to_string(report.broadcast_events.front().frame_id));
    require(!report.receiver_alerts.empty(), "no receiver alert");
    const auto& alert = report.receiver_alerts.front();
    require(alert.frame_id == 3, "receiver alert not on frame 3");
    require(alert.confidence_pct == 82,
            "decoded alert confidence " + std::to_string(alert.confidence_pct) + " != 82");
  });

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
