#include "wildnet/detection.hpp"

#include <fstream>
#include <string>

#include "json.hpp"
#include "wildnet/error.hpp"

namespace wildnet {

void validate(const Detection& det) {
  if (!well_formed(det.bbox))
    throw FrameError("detection bbox is not well-formed (x_min < x_max and y_min < y_max required)");
  if (det.bbox.x_min < 0.0 || det.bbox.y_min < 0.0 ||
      det.bbox.x_max > kModelInputSize || det.bbox.y_max > kModelInputSize)
    throw FrameError("detection bbox outside the [0,256]^2 model-input space");
  if (det.confidence < 0.0 || det.confidence > 1.0)
    throw FrameError("detection confidence outside [0,1]: " + std::to_string(det.confidence));
}

namespace {

using nlohmann::json;

Detection parse_detection(const json& j, std::int64_t frame_id) {
  const auto& box = j.at("bbox");
  if (!box.is_array() || box.size() != 4)
    throw ParseError("\"bbox\" must be an array of 4 numbers");
  Detection det;
  det.frame_id = frame_id;
  det.bbox = BBox{box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
                  box[3].get<double>()};
  det.confidence = j.at("conf").get<double>();
  det.class_id = j.at("class_id").get<int>();
  if (j.contains("est_distance_ft") && !j["est_distance_ft"].is_null())
    det.est_distance_ft = j["est_distance_ft"].get<double>();
  validate(det);
  return det;
}

}  // namespace

ReplayDetector ReplayDetector::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open replay log: " + path.string());
  return from_stream(in, path.string());
}

ReplayDetector ReplayDetector::from_stream(std::istream& in, std::string_view source_name) {
  ReplayDetector detector;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      const auto frame_id = j.at("frame_id").get<std::int64_t>();
      LogEntry entry;
      if (j.contains("inference_ms") && !j["inference_ms"].is_null())
        entry.inference_ms = j["inference_ms"].get<double>();
      for (const auto& dj : j.at("detections"))
        entry.detections.push_back(parse_detection(dj, frame_id));
      const auto [it, inserted] = detector.entries_.emplace(frame_id, std::move(entry));
      (void)it;
      if (!inserted)
        throw ParseError("duplicate frame_id " + std::to_string(frame_id));
    } catch (const json::exception& e) {
      throw ParseError(where + ": malformed replay record: " + e.what());
    } catch (const Error& e) {
      throw ParseError(where + ": malformed replay record: " + e.what());
    }
  }
  return detector;
}

DetectorBackend::Result ReplayDetector::detect(const ThermalFrame& frame) const {
  return detect_by_id(frame.frame_id);
}

DetectorBackend::Result ReplayDetector::detect_by_id(std::int64_t frame_id) const {
  const auto it = entries_.find(frame_id);
  if (it == entries_.end()) return Result{{}, kDefaultInferenceMs};
  return Result{it->second.detections,
                it->second.inference_ms.value_or(kDefaultInferenceMs)};
}

}  // namespace wildnet
