#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wildnet/tracking.hpp"

namespace wildnet {

// Detected-object record inside a sensor data sharing message. Units
// follow common V2X practice: positions in 1e-7 degree / 0.1 m steps,
// speed in 0.02 m/s steps, heading in 0.0125 degree steps clockwise from
// true north.
struct DetectedObject {
  std::uint8_t obj_type = 0;  // 0 unknown, 1 vehicle, 2 vru, 3 animal
  std::uint16_t obj_id = 0;
  std::uint16_t time_offset_ms = 0;  // ms before sdsm_time_ms
  std::int16_t pos_offset_x_dm = 0;  // east of reference position, 0.1 m
  std::int16_t pos_offset_y_dm = 0;  // north of reference position, 0.1 m
  std::uint16_t speed_units = 0;     // 0.02 m/s
  std::uint16_t heading_units = 0;   // 0.0125 deg, must be < 28800
  std::uint8_t confidence_pct = 0;   // 0..100

  bool operator==(const DetectedObject&) const = default;
};

inline constexpr std::uint8_t kObjTypeUnknown = 0;
inline constexpr std::uint8_t kObjTypeVehicle = 1;
inline constexpr std::uint8_t kObjTypeVru = 2;
inline constexpr std::uint8_t kObjTypeAnimal = 3;

struct SensorDataSharingMessage {
  std::uint8_t msg_count = 0;     // rolling 0..127
  std::uint32_t source_id = 0;    // sending station
  std::uint64_t sdsm_time_ms = 0; // ms since Unix epoch
  std::int32_t ref_lat = 0;       // 1e-7 deg, |lat| <= 90 deg
  std::int32_t ref_lon = 0;       // 1e-7 deg, |lon| <= 180 deg
  std::int16_t ref_elev_dm = 0;   // 0.1 m
  std::vector<DetectedObject> objects;  // 1..255 entries

  bool operator==(const SensorDataSharingMessage&) const = default;
};

// Wire format, MSB-first, signed fields as two's complement in width:
//
//   header (190 bits)            per object (107 bits)
//   ----------------             ---------------------
//   msg_count      7             obj_type          4
//   source_id     32             obj_id           16
//   sdsm_time_ms  64             time_offset_ms   16
//   ref_lat       31 signed      pos_offset_x_dm  16 signed
//   ref_lon       32 signed      pos_offset_y_dm  16 signed
//   ref_elev_dm   16 signed      speed_units      16
//   object_count   8             heading_units    16
//                                confidence_pct    7
//
// Total bits = 190 + 107*n, zero-padded to a byte boundary.
inline constexpr std::size_t kSdsmHeaderBits = 190;
inline constexpr std::size_t kSdsmObjectBits = 107;
inline constexpr std::size_t kSdsmMaxObjects = 255;

inline constexpr std::size_t sdsm_payload_bits(std::size_t object_count) {
  return kSdsmHeaderBits + kSdsmObjectBits * object_count;
}

inline constexpr std::size_t sdsm_encoded_bytes(std::size_t object_count) {
  return (sdsm_payload_bits(object_count) + 7) / 8;
}

// Throws CodecError(range) naming the first out-of-range field.
void validate_for_encode(const SensorDataSharingMessage& msg);

std::vector<std::uint8_t> encode(const SensorDataSharingMessage& msg);

// Inverse of encode. Rejects length mismatches (truncation), nonzero pad
// bits (padding), and decoded values that violate message invariants
// (semantic).
SensorDataSharingMessage decode(std::span<const std::uint8_t> bytes);

// Pose of the sensing vehicle at message-build time.
struct EgoPose {
  double lat = 0.0;
  double lon = 0.0;
  double elev_m = 0.0;
  double heading_deg = 0.0;  // 0 = true north, clockwise
  double speed_mps = 0.0;
};

// Builds the single-object animal message for a confirmed track. The
// object offset projects the track's estimated distance along the ego
// heading (east/north decimeters); with no distance estimate the offset
// is (0,0). Deer speed and heading are unmeasured and encode as 0.
SensorDataSharingMessage build_sdsm(const Track& track, const EgoPose& ego,
                                    std::int64_t now_ms, std::uint8_t msg_count,
                                    std::uint32_t source_id);

// JSON bridge used by the CLI; field order matches the wire order.
nlohmann::ordered_json sdsm_to_json(const SensorDataSharingMessage& msg);
SensorDataSharingMessage sdsm_from_json(const nlohmann::json& j);

// Annotated rendering of an encoded buffer: one line per field with its
// bit span and decoded value, the pad-bit count, and a hex dump.
std::string dump_annotated(std::span<const std::uint8_t> bytes);

}  // namespace wildnet
