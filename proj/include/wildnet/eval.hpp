#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wildnet/geometry.hpp"

namespace wildnet {

struct GtBox {
  BBox bbox;
  int class_id = 0;
  std::optional<double> est_distance_ft;
};

struct PredBox {
  BBox bbox;
  int class_id = 0;
  double confidence = 0.0;
};

struct ImageGroundTruth {
  std::string image_id;
  std::vector<GtBox> boxes;
};

struct ImagePredictions {
  std::string image_id;
  std::vector<PredBox> boxes;
};

struct GroundTruthSet {
  std::vector<ImageGroundTruth> images;
  std::size_t total_boxes() const;
};

struct PredictionSet {
  std::vector<ImagePredictions> images;
};

// JSON Lines, one image per line:
//   gt:   {"image_id":"0001", "boxes":[{"bbox":[x0,y0,x1,y1], "class_id":0,
//          "est_distance_ft":15.0}]}
//   pred: {"image_id":"0001", "boxes":[{"bbox":[...], "class_id":0, "conf":0.9}]}
// load_predictions also accepts the detection replay-log format
// ({"frame_id":..., "detections":[...]}); frame ids become image ids.
GroundTruthSet load_ground_truth(const std::filesystem::path& path);
GroundTruthSet load_ground_truth(std::istream& in, std::string_view source_name);
PredictionSet load_predictions(const std::filesystem::path& path);
PredictionSet load_predictions(std::istream& in, std::string_view source_name);

// Greedy COCO-style matching for one image: predictions in confidence
// order (ties: input order) each take the unmatched ground truth with the
// highest IoU >= iou_thresh (ties: lower gt index).
struct ImageAssignment {
  struct Pair {
    std::size_t pred_index;
    std::size_t gt_index;
    double overlap;
  };
  std::vector<Pair> matches;            // TP pairs
  std::vector<std::size_t> fp_preds;    // unmatched predictions
  std::vector<std::size_t> fn_gts;      // unmatched ground truths
};

ImageAssignment match_image(std::span<const PredBox> preds, std::span<const GtBox> gts,
                            double iou_thresh);

// Dataset-level assignments at one IoU threshold. Ground-truth images the
// predictions never mention contribute pure FNs; a prediction image id
// missing from the ground truth is an error naming the offender.
struct MatchResult {
  struct PredRecord {
    double confidence = 0.0;
    bool is_tp = false;
    std::size_t image_index = 0;  // index into the gt image list
    std::size_t pred_index = 0;
  };
  std::vector<PredRecord> preds;  // sorted by confidence desc, stable
  std::size_t num_gt = 0;
  std::vector<ImageAssignment> per_image;  // parallel to gt image list
};

MatchResult match_detections(const PredictionSet& preds, const GroundTruthSet& gts,
                             double iou_thresh);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double confidence = 0.0;  // threshold producing this point

  bool operator==(const PrPoint&) const = default;
};

// Cumulative precision/recall swept over the distinct prediction
// confidences, descending. Throws EvalError when there are no ground
// truths (recall undefined).
std::vector<PrPoint> pr_curve(const MatchResult& result);

// 101-point interpolated AP: the precision envelope max{p : recall >= r}
// averaged over r in {0.00, 0.01, ..., 1.00}.
double average_precision(std::span<const PrPoint> curve);

// AP at IoU 0.5 and the mean over IoU 0.50:0.05:0.95.
std::pair<double, double> map_sweep(const PredictionSet& preds, const GroundTruthSet& gts);

// Harmonic mean; 0 when both inputs are 0.
double f1_score(double precision, double recall);

// Open-set detection confusion: TN is unbounded and reported as
// not-applicable rather than 0 counts meaning something.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion_matrix(const MatchResult& result, double conf_thresh);

// Column-normalized rates (actual-deer column); n/a when no actual deer.
struct ConfusionNormalized {
  std::optional<double> deer_tp_rate;
  std::optional<double> deer_fn_rate;
};

ConfusionNormalized normalize(const ConfusionCounts& counts);

struct RangeBin {
  std::string label;
  double lo_ft = 0.0;  // inclusive
  double hi_ft = 0.0;  // exclusive; infinity for the last bin
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::optional<double> accuracy;  // empty bin reports n/a, not 0
};

// Detection rate per distance band: <20, 20-50, 50-70, 70-100, >100 feet
// (lower-inclusive). Every ground truth must carry est_distance_ft.
std::vector<RangeBin> range_binned_accuracy(const GroundTruthSet& gts,
                                            const MatchResult& result,
                                            double conf_thresh);

struct SplitStats {
  std::uint64_t train = 0;
  std::uint64_t val = 0;
  std::uint64_t test = 0;
  std::uint64_t total = 0;
  double train_pct = 0.0;
  double val_pct = 0.0;
  double test_pct = 0.0;
};

struct SplitCheck {
  bool pass = false;
  std::vector<std::string> failures;
  double recomputed_train_pct = 0.0;
  double recomputed_val_pct = 0.0;
  double recomputed_test_pct = 0.0;
};

// Counts must sum to the total and each claimed percentage must match the
// recomputed one within 0.1 percentage points.
SplitCheck validate_split(const SplitStats& stats);

// Dataset-builder composition statistic: share of grayscale renderings vs
// RGB heatmap renderings in a training corpus, checked against a target
// split. Reported only, never enforced at runtime.
struct CompositionStats {
  std::uint64_t grayscale = 0;
  std::uint64_t heatmap = 0;
};

struct CompositionCheck {
  bool pass = false;
  double grayscale_pct = 0.0;
  std::vector<std::string> failures;
};

CompositionCheck validate_composition(const CompositionStats& stats,
                                      double grayscale_target_pct = 70.0,
                                      double tolerance_pp = 1.0);

struct EvalReport {
  std::size_t num_images = 0;
  std::size_t num_gt = 0;
  std::size_t num_preds = 0;
  double conf_thresh = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ap50 = 0.0;
  double map5095 = 0.0;
  std::vector<PrPoint> pr_points;
  ConfusionCounts confusion;
  ConfusionNormalized confusion_normalized;
  std::vector<RangeBin> range_bins;  // present only when every gt has a distance
};

// The whole suite in one pass. Precision/recall/F1 and the confusion
// matrix are computed at IoU 0.5 with predictions at conf_thresh.
EvalReport evaluate(const PredictionSet& preds, const GroundTruthSet& gts,
                    double conf_thresh = 0.0);

nlohmann::ordered_json eval_report_to_json(const EvalReport& report);
std::string render_metrics_table(const EvalReport& report);
std::string render_range_table(const EvalReport& report);

}  // namespace wildnet
