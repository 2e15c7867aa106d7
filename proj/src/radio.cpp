#include "wildnet/radio.hpp"

#include <algorithm>
#include <string>

#include "wildnet/error.hpp"
#include "wildnet/sdsm.hpp"

namespace wildnet {

DeliveryStats& DeliveryStats::operator+=(const DeliveryStats& other) {
  sent += other.sent;
  delivered += other.delivered;
  relayed += other.relayed;
  duplicates_suppressed += other.duplicates_suppressed;
  latency_samples_ms.insert(latency_samples_ms.end(), other.latency_samples_ms.begin(),
                            other.latency_samples_ms.end());
  return *this;
}

RadioWorld::RadioWorld(std::vector<StationNode> stations, const RadioModel& model)
    : stations_(std::move(stations)), model_(model), rng_(model.rng_seed) {
  if (model_.in_range_delivery_prob < 0.0 || model_.in_range_delivery_prob > 1.0)
    throw ConfigError("in_range_delivery_prob must be in [0,1]");
  if (model_.per_hop_latency_min_ms > model_.per_hop_latency_max_ms)
    throw ConfigError("per-hop latency window is inverted");
  std::set<std::uint32_t> seen;
  for (const auto& s : stations_) {
    if (s.range_m <= 0.0)
      throw ConfigError("station " + std::to_string(s.station_id) + " has non-positive range");
    if (!seen.insert(s.station_id).second)
      throw ConfigError("duplicate station_id " + std::to_string(s.station_id));
  }
}

StationNode* RadioWorld::find(std::uint32_t station_id) {
  for (auto& s : stations_)
    if (s.station_id == station_id) return &s;
  return nullptr;
}

const StationNode* RadioWorld::find(std::uint32_t station_id) const {
  for (const auto& s : stations_)
    if (s.station_id == station_id) return &s;
  return nullptr;
}

DeliveryStats RadioWorld::transmit(const StationNode& origin,
                                   std::span<const std::uint8_t> payload, double now_ms,
                                   bool via_relay) {
  DeliveryStats delta;
  delta.sent = 1;
  const double reach = std::min(origin.range_m, model_.max_range_m);
  for (auto& node : stations_) {
    if (node.station_id == origin.station_id) continue;
    // Hard geometric cutoff first: out-of-range nodes draw no randomness
    // and can never receive, whatever the seed.
    if (haversine_m(origin.position, node.position) > reach) continue;
    if (!rng_.bernoulli(model_.in_range_delivery_prob)) continue;
    const double latency =
        rng_.uniform(model_.per_hop_latency_min_ms, model_.per_hop_latency_max_ms);
    node.rx_log.push_back(RxRecord{{payload.begin(), payload.end()}, now_ms + latency,
                                   origin.station_id, via_relay});
    delta.delivered += 1;
    delta.latency_samples_ms.push_back(latency);
  }
  return delta;
}

DeliveryStats RadioWorld::broadcast(std::span<const std::uint8_t> payload,
                                    std::uint32_t origin_id, double now_ms) {
  const StationNode* origin = find(origin_id);
  if (origin == nullptr)
    throw ConfigError("broadcast origin station " + std::to_string(origin_id) +
                      " is not in the world");
  DeliveryStats delta = transmit(*origin, payload, now_ms, /*via_relay=*/false);
  totals_ += delta;
  return delta;
}

DeliveryStats RadioWorld::rsu_relay(std::uint32_t rsu_id,
                                    std::span<const std::uint8_t> payload, double now_ms) {
  const StationNode* rsu = find(rsu_id);
  if (rsu == nullptr || rsu->kind != StationKind::rsu)
    throw ConfigError("rsu_relay requires an RSU station, got id " + std::to_string(rsu_id));

  DeliveryStats delta;
  SensorDataSharingMessage msg;
  try {
    msg = decode(payload);
  } catch (const CodecError&) {
    return delta;  // undecodable payloads are dropped, not relayed
  }
  const auto key = std::make_tuple(msg.source_id, msg.msg_count, msg.sdsm_time_ms);
  if (!rsu_seen_[rsu_id].insert(key).second) {
    delta.duplicates_suppressed = 1;
    totals_ += delta;
    return delta;
  }
  delta = transmit(*rsu, payload, now_ms, /*via_relay=*/true);
  delta.relayed = 1;
  totals_ += delta;
  return delta;
}

}  // namespace wildnet
