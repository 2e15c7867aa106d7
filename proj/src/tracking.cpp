#include "wildnet/tracking.hpp"

#include <algorithm>
#include <string>

#include "wildnet/error.hpp"

namespace wildnet {

void ThresholdConfig::validate() const {
  const double eff = effective_driver_warn_conf();
  if (!(eff >= 0.0 && eff <= broadcast_conf && broadcast_conf <= 1.0))
    throw ConfigError("thresholds must satisfy 0 <= driver_warn_conf <= broadcast_conf <= 1 "
                      "(after hot-weather adjustment); got driver " +
                      std::to_string(eff) + ", broadcast " + std::to_string(broadcast_conf));
  if (confirm_frames < 1)
    throw ConfigError("confirm_frames must be >= 1, got " + std::to_string(confirm_frames));
  if (assoc_iou < 0.0 || assoc_iou > 1.0)
    throw ConfigError("assoc_iou must be in [0,1], got " + std::to_string(assoc_iou));
  if (max_age_frames < 0)
    throw ConfigError("max_age_frames must be >= 0, got " + std::to_string(max_age_frames));
}

std::vector<Track> update_tracks(std::vector<Track> tracks,
                                 std::span<const Detection> detections,
                                 std::int64_t now_ms, const ThresholdConfig& cfg,
                                 std::int64_t& next_track_id) {
  struct Candidate {
    double overlap;
    std::size_t det_idx;
    std::size_t track_idx;
  };

  std::vector<Candidate> candidates;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      const double overlap = iou(detections[d].bbox, tracks[t].last_bbox);
      if (overlap >= cfg.assoc_iou) candidates.push_back({overlap, d, t});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&tracks](const Candidate& a, const Candidate& b) {
              if (a.overlap != b.overlap) return a.overlap > b.overlap;
              if (a.det_idx != b.det_idx) return a.det_idx < b.det_idx;
              return tracks[a.track_idx].track_id < tracks[b.track_idx].track_id;
            });

  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> track_matched(tracks.size(), false);
  for (const auto& c : candidates) {
    if (det_used[c.det_idx] || track_matched[c.track_idx]) continue;
    det_used[c.det_idx] = true;
    track_matched[c.track_idx] = true;
    Track& tr = tracks[c.track_idx];
    const Detection& det = detections[c.det_idx];
    tr.last_bbox = det.bbox;
    tr.last_confidence = det.confidence;
    tr.peak_confidence = std::max(tr.peak_confidence, det.confidence);
    tr.consecutive_hits += 1;
    tr.age_frames = 0;
    tr.last_update_ms = now_ms;
    if (det.est_distance_ft) tr.est_distance_ft = det.est_distance_ft;
  }

  std::vector<Track> next;
  next.reserve(tracks.size() + detections.size());
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    if (!track_matched[t]) {
      tracks[t].age_frames += 1;
      tracks[t].consecutive_hits = 0;  // a miss breaks the confirmation streak
      if (tracks[t].age_frames > cfg.max_age_frames) continue;
    }
    next.push_back(tracks[t]);
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (det_used[d]) continue;
    Track tr;
    tr.track_id = next_track_id++;
    tr.last_bbox = detections[d].bbox;
    tr.last_confidence = detections[d].confidence;
    tr.peak_confidence = detections[d].confidence;
    tr.consecutive_hits = 1;
    tr.age_frames = 0;
    tr.last_update_ms = now_ms;
    tr.est_distance_ft = detections[d].est_distance_ft;
    next.push_back(tr);
  }
  return next;
}

bool evaluate_driver_warning(const Track& track, const ThresholdConfig& cfg) {
  return track.last_confidence >= cfg.effective_driver_warn_conf();
}

bool evaluate_broadcast(const Track& track, const ThresholdConfig& cfg) {
  return track.consecutive_hits >= cfg.confirm_frames &&
         track.peak_confidence >= cfg.broadcast_conf && !track.broadcast_issued;
}

}  // namespace wildnet
