#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "wildnet/geo.hpp"
#include "wildnet/rng.hpp"

namespace wildnet {

enum class StationKind { obu, rsu };

// One received copy of a message.
struct RxRecord {
  std::vector<std::uint8_t> payload;
  double arrival_ms = 0.0;
  std::uint32_t from_station = 0;
  bool via_relay = false;
};

struct StationNode {
  std::uint32_t station_id = 0;
  StationKind kind = StationKind::obu;
  LatLon position;
  double range_m = 1000.0;
  std::vector<RxRecord> rx_log;
};

// Disk range model with Bernoulli loss: anything inside the range circle
// is delivered with a fixed probability, anything outside never is.
struct RadioModel {
  double max_range_m = 1000.0;
  double in_range_delivery_prob = 0.98;
  double per_hop_latency_min_ms = 10.0;
  double per_hop_latency_max_ms = 20.0;
  std::uint64_t rng_seed = 42;
};

struct DeliveryStats {
  std::uint64_t sent = 0;      // over-the-air transmissions (origin + relays)
  std::uint64_t delivered = 0; // receive events across all stations
  std::uint64_t relayed = 0;   // rebroadcasts performed by RSUs
  std::uint64_t duplicates_suppressed = 0;
  std::vector<double> latency_samples_ms;  // per delivered copy

  DeliveryStats& operator+=(const DeliveryStats& other);
};

// The simulated over-the-air world. Single-owner: one caller advances it
// at a time; all randomness flows from the model's rng_seed.
class RadioWorld {
 public:
  RadioWorld(std::vector<StationNode> stations, const RadioModel& model);

  const std::vector<StationNode>& stations() const { return stations_; }
  StationNode* find(std::uint32_t station_id);
  const StationNode* find(std::uint32_t station_id) const;

  // Transmit from origin to every other node within range (hard cutoff at
  // min(origin range, model max range)); each in-range node receives with
  // the model's delivery probability and a per-hop latency sampled from
  // the configured window. Returns the stats delta for this transmission.
  DeliveryStats broadcast(std::span<const std::uint8_t> payload,
                          std::uint32_t origin_id, double now_ms);

  // Rebroadcast a received SDSM from an RSU, once per unique
  // (source_id, msg_count, sdsm_time_ms); repeat arrivals are suppressed
  // and counted. Relayed copies are marked and must not be relayed again
  // (single-hop relay).
  DeliveryStats rsu_relay(std::uint32_t rsu_id, std::span<const std::uint8_t> payload,
                          double now_ms);

  const DeliveryStats& totals() const { return totals_; }

 private:
  DeliveryStats transmit(const StationNode& origin, std::span<const std::uint8_t> payload,
                         double now_ms, bool via_relay);

  std::vector<StationNode> stations_;
  RadioModel model_;
  DeterministicRng rng_;
  DeliveryStats totals_;
  // per-RSU set of relayed message keys
  std::map<std::uint32_t, std::set<std::tuple<std::uint32_t, std::uint8_t, std::uint64_t>>> rsu_seen_;
};

}  // namespace wildnet
