#include "wildnet/sdsm.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "wildnet/bitio.hpp"
#include "wildnet/error.hpp"

namespace wildnet {

namespace {

constexpr std::int32_t kLatMax = 900000000;    // 90 deg in 1e-7 deg units
constexpr std::int32_t kLonMax = 1800000000;   // 180 deg
constexpr std::uint16_t kHeadingLimit = 28800; // 360 deg in 0.0125 deg units

[[noreturn]] void range_error(const char* field, const std::string& detail) {
  throw CodecError(CodecErrorKind::range,
                   std::string("encode: field '") + field + "' out of range: " + detail);
}

[[noreturn]] void semantic_error(const char* field, const std::string& detail) {
  throw CodecError(CodecErrorKind::semantic,
                   std::string("decode: field '") + field + "' violates invariant: " + detail);
}

}  // namespace

void validate_for_encode(const SensorDataSharingMessage& msg) {
  if (msg.msg_count > 127)
    range_error("msg_count", std::to_string(msg.msg_count) + " > 127");
  if (msg.ref_lat < -kLatMax || msg.ref_lat > kLatMax)
    range_error("ref_lat", std::to_string(msg.ref_lat) + " outside +-900000000");
  if (msg.ref_lon < -kLonMax || msg.ref_lon > kLonMax)
    range_error("ref_lon", std::to_string(msg.ref_lon) + " outside +-1800000000");
  if (msg.objects.empty() || msg.objects.size() > kSdsmMaxObjects)
    range_error("object_count",
                std::to_string(msg.objects.size()) + " not in 1..255");
  for (std::size_t i = 0; i < msg.objects.size(); ++i) {
    const auto& obj = msg.objects[i];
    const std::string at = " (objects[" + std::to_string(i) + "])";
    if (obj.obj_type > 15)
      range_error("obj_type", std::to_string(obj.obj_type) + " exceeds 4 bits" + at);
    if (obj.heading_units >= kHeadingLimit)
      range_error("heading_units",
                  std::to_string(obj.heading_units) + " >= 28800" + at);
    if (obj.confidence_pct > 100)
      range_error("confidence_pct", std::to_string(obj.confidence_pct) + " > 100" + at);
  }
}

std::vector<std::uint8_t> encode(const SensorDataSharingMessage& msg) {
  validate_for_encode(msg);
  BitWriter w;
  w.put_bits(msg.msg_count, 7);
  w.put_bits(msg.source_id, 32);
  w.put_bits(msg.sdsm_time_ms, 64);
  w.put_signed(msg.ref_lat, 31);
  w.put_signed(msg.ref_lon, 32);
  w.put_signed(msg.ref_elev_dm, 16);
  w.put_bits(msg.objects.size(), 8);
  for (const auto& obj : msg.objects) {
    w.put_bits(obj.obj_type, 4);
    w.put_bits(obj.obj_id, 16);
    w.put_bits(obj.time_offset_ms, 16);
    w.put_signed(obj.pos_offset_x_dm, 16);
    w.put_signed(obj.pos_offset_y_dm, 16);
    w.put_bits(obj.speed_units, 16);
    w.put_bits(obj.heading_units, 16);
    w.put_bits(obj.confidence_pct, 7);
  }
  return w.finish();
}

SensorDataSharingMessage decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() * 8 < kSdsmHeaderBits)
    throw CodecError(CodecErrorKind::truncation,
                     "truncated buffer: header needs " + std::to_string(kSdsmHeaderBits) +
                         " bits, have " + std::to_string(bytes.size() * 8));

  BitReader r(bytes);
  SensorDataSharingMessage msg;
  msg.msg_count = static_cast<std::uint8_t>(r.get_bits(7));
  msg.source_id = static_cast<std::uint32_t>(r.get_bits(32));
  msg.sdsm_time_ms = r.get_bits(64);
  msg.ref_lat = static_cast<std::int32_t>(r.get_signed(31));
  msg.ref_lon = static_cast<std::int32_t>(r.get_signed(32));
  msg.ref_elev_dm = static_cast<std::int16_t>(r.get_signed(16));
  const auto count = r.get_bits(8);

  if (count == 0) semantic_error("object_count", "0 objects (1..255 required)");
  const std::size_t expected_bits = sdsm_payload_bits(count);
  const std::size_t expected_bytes = (expected_bits + 7) / 8;
  if (bytes.size() != expected_bytes)
    throw CodecError(CodecErrorKind::truncation,
                     "length mismatch for " + std::to_string(count) + " objects: expected " +
                         std::to_string(expected_bytes) + " bytes (" +
                         std::to_string(expected_bits) + " data bits), got " +
                         std::to_string(bytes.size()) + " bytes (" +
                         std::to_string(bytes.size() * 8) + " bits)");

  if (msg.ref_lat < -kLatMax || msg.ref_lat > kLatMax)
    semantic_error("ref_lat", std::to_string(msg.ref_lat) + " outside +-900000000");
  if (msg.ref_lon < -kLonMax || msg.ref_lon > kLonMax)
    semantic_error("ref_lon", std::to_string(msg.ref_lon) + " outside +-1800000000");

  msg.objects.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    DetectedObject obj;
    obj.obj_type = static_cast<std::uint8_t>(r.get_bits(4));
    obj.obj_id = static_cast<std::uint16_t>(r.get_bits(16));
    obj.time_offset_ms = static_cast<std::uint16_t>(r.get_bits(16));
    obj.pos_offset_x_dm = static_cast<std::int16_t>(r.get_signed(16));
    obj.pos_offset_y_dm = static_cast<std::int16_t>(r.get_signed(16));
    obj.speed_units = static_cast<std::uint16_t>(r.get_bits(16));
    obj.heading_units = static_cast<std::uint16_t>(r.get_bits(16));
    obj.confidence_pct = static_cast<std::uint8_t>(r.get_bits(7));
    if (obj.heading_units >= kHeadingLimit)
      semantic_error("heading_units", std::to_string(obj.heading_units) + " >= 28800 (objects[" +
                                          std::to_string(i) + "])");
    if (obj.confidence_pct > 100)
      semantic_error("confidence_pct", std::to_string(obj.confidence_pct) + " > 100 (objects[" +
                                           std::to_string(i) + "])");
    msg.objects.push_back(obj);
  }

  if (!r.remaining_bits_zero())
    throw CodecError(CodecErrorKind::padding,
                     "nonzero pad bits after " + std::to_string(r.bit_pos()) + " data bits");
  return msg;
}

namespace {

constexpr double kDmPerFoot = 3.048;
constexpr double kDegToRad = std::numbers::pi / 180.0;

std::int16_t clamp_i16(long long v) {
  if (v > 32767) return 32767;
  if (v < -32768) return -32768;
  return static_cast<std::int16_t>(v);
}

}  // namespace

SensorDataSharingMessage build_sdsm(const Track& track, const EgoPose& ego,
                                    std::int64_t now_ms, std::uint8_t msg_count,
                                    std::uint32_t source_id) {
  SensorDataSharingMessage msg;
  msg.msg_count = msg_count;
  msg.source_id = source_id;
  msg.sdsm_time_ms = static_cast<std::uint64_t>(now_ms);
  msg.ref_lat = static_cast<std::int32_t>(std::llround(ego.lat * 1e7));
  msg.ref_lon = static_cast<std::int32_t>(std::llround(ego.lon * 1e7));
  msg.ref_elev_dm = clamp_i16(std::llround(ego.elev_m * 10.0));

  DetectedObject obj;
  obj.obj_type = kObjTypeAnimal;
  obj.obj_id = static_cast<std::uint16_t>(track.track_id % 65536);
  const std::int64_t offset = now_ms - track.last_update_ms;
  obj.time_offset_ms = static_cast<std::uint16_t>(std::clamp<std::int64_t>(offset, 0, 65535));
  if (track.est_distance_ft) {
    const double dist_dm = *track.est_distance_ft * kDmPerFoot;
    const double heading_rad = ego.heading_deg * kDegToRad;
    obj.pos_offset_x_dm = clamp_i16(std::llround(dist_dm * std::sin(heading_rad)));
    obj.pos_offset_y_dm = clamp_i16(std::llround(dist_dm * std::cos(heading_rad)));
  }
  obj.speed_units = 0;    // deer speed unmeasured
  obj.heading_units = 0;  // deer heading unmeasured
  obj.confidence_pct = static_cast<std::uint8_t>(std::llround(100.0 * track.peak_confidence));
  msg.objects.push_back(obj);
  return msg;
}

nlohmann::ordered_json sdsm_to_json(const SensorDataSharingMessage& msg) {
  nlohmann::ordered_json j;
  j["msg_count"] = msg.msg_count;
  j["source_id"] = msg.source_id;
  j["sdsm_time_ms"] = msg.sdsm_time_ms;
  j["ref_lat"] = msg.ref_lat;
  j["ref_lon"] = msg.ref_lon;
  j["ref_elev_dm"] = msg.ref_elev_dm;
  j["objects"] = nlohmann::ordered_json::array();
  for (const auto& obj : msg.objects) {
    nlohmann::ordered_json oj;
    oj["obj_type"] = obj.obj_type;
    oj["obj_id"] = obj.obj_id;
    oj["time_offset_ms"] = obj.time_offset_ms;
    oj["pos_offset_x_dm"] = obj.pos_offset_x_dm;
    oj["pos_offset_y_dm"] = obj.pos_offset_y_dm;
    oj["speed_units"] = obj.speed_units;
    oj["heading_units"] = obj.heading_units;
    oj["confidence_pct"] = obj.confidence_pct;
    j["objects"].push_back(std::move(oj));
  }
  return j;
}

SensorDataSharingMessage sdsm_from_json(const nlohmann::json& j) {
  try {
    SensorDataSharingMessage msg;
    msg.msg_count = j.at("msg_count").get<std::uint8_t>();
    msg.source_id = j.at("source_id").get<std::uint32_t>();
    msg.sdsm_time_ms = j.at("sdsm_time_ms").get<std::uint64_t>();
    msg.ref_lat = j.at("ref_lat").get<std::int32_t>();
    msg.ref_lon = j.at("ref_lon").get<std::int32_t>();
    msg.ref_elev_dm = j.at("ref_elev_dm").get<std::int16_t>();
    for (const auto& oj : j.at("objects")) {
      DetectedObject obj;
      obj.obj_type = oj.at("obj_type").get<std::uint8_t>();
      obj.obj_id = oj.at("obj_id").get<std::uint16_t>();
      obj.time_offset_ms = oj.at("time_offset_ms").get<std::uint16_t>();
      obj.pos_offset_x_dm = oj.at("pos_offset_x_dm").get<std::int16_t>();
      obj.pos_offset_y_dm = oj.at("pos_offset_y_dm").get<std::int16_t>();
      obj.speed_units = oj.at("speed_units").get<std::uint16_t>();
      obj.heading_units = oj.at("heading_units").get<std::uint16_t>();
      obj.confidence_pct = oj.at("confidence_pct").get<std::uint8_t>();
      msg.objects.push_back(obj);
    }
    return msg;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed SDSM JSON: ") + e.what());
  }
}

namespace {

struct FieldSpan {
  std::string name;
  std::size_t begin_bit;
  int width;
  bool is_signed;
};

std::vector<FieldSpan> layout_for(std::size_t object_count) {
  std::vector<FieldSpan> fields;
  std::size_t pos = 0;
  const auto add = [&fields, &pos](std::string name, int width, bool is_signed) {
    fields.push_back({std::move(name), pos, width, is_signed});
    pos += width;
  };
  add("msg_count", 7, false);
  add("source_id", 32, false);
  add("sdsm_time_ms", 64, false);
  add("ref_lat", 31, true);
  add("ref_lon", 32, true);
  add("ref_elev_dm", 16, true);
  add("object_count", 8, false);
  for (std::size_t i = 0; i < object_count; ++i) {
    const std::string p = "objects[" + std::to_string(i) + "].";
    add(p + "obj_type", 4, false);
    add(p + "obj_id", 16, false);
    add(p + "time_offset_ms", 16, false);
    add(p + "pos_offset_x_dm", 16, true);
    add(p + "pos_offset_y_dm", 16, true);
    add(p + "speed_units", 16, false);
    add(p + "heading_units", 16, false);
    add(p + "confidence_pct", 7, false);
  }
  return fields;
}

}  // namespace

std::string dump_annotated(std::span<const std::uint8_t> bytes) {
  const SensorDataSharingMessage msg = decode(bytes);  // errors propagate verbatim
  const std::size_t n = msg.objects.size();
  const std::size_t data_bits = sdsm_payload_bits(n);
  const std::size_t pad_bits = bytes.size() * 8 - data_bits;

  std::ostringstream out;
  out << bytes.size() << " bytes, " << data_bits << " data bits, " << pad_bits
      << " pad bits, " << n << (n == 1 ? " object\n" : " objects\n");

  BitReader r(bytes);
  for (const auto& f : layout_for(n)) {
    const long long value = f.is_signed ? r.get_signed(f.width)
                                        : static_cast<long long>(r.get_bits(f.width));
    char line[96];
    std::snprintf(line, sizeof(line), "  [%5zu..%5zu) %-28s = %lld\n", f.begin_bit,
                  f.begin_bit + f.width, f.name.c_str(), value);
    out << line;
  }
  if (pad_bits > 0)
    out << "  [" << data_bits << ".." << bytes.size() * 8 << ") pad, all zero\n";

  for (std::size_t i = 0; i < bytes.size(); i += 16) {
    char off[16];
    std::snprintf(off, sizeof(off), "%04zx:", i);
    out << off;
    for (std::size_t k = i; k < std::min(bytes.size(), i + 16); ++k) {
      char hex[8];
      std::snprintf(hex, sizeof(hex), " %02x", bytes[k]);
      out << hex;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace wildnet
