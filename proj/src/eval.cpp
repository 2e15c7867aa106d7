#include "wildnet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "wildnet/error.hpp"

namespace wildnet {

namespace {

using nlohmann::json;

BBox bbox_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw ParseError("\"bbox\" must be an array of 4 numbers");
  BBox box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!well_formed(box)) throw ParseError("bbox is not well-formed");
  return box;
}

template <typename PerLine>
void for_each_jsonl(std::istream& in, std::string_view source_name, PerLine&& handle) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    try {
      handle(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
}

}  // namespace

std::size_t GroundTruthSet::total_boxes() const {
  std::size_t n = 0;
  for (const auto& img : images) n += img.boxes.size();
  return n;
}

GroundTruthSet load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ground truth file: " + path.string());
  return load_ground_truth(in, path.string());
}

GroundTruthSet load_ground_truth(std::istream& in, std::string_view source_name) {
  GroundTruthSet set;
  std::set<std::string> seen;
  for_each_jsonl(in, source_name, [&set, &seen](const json& j) {
    ImageGroundTruth img;
    img.image_id = j.at("image_id").is_string() ? j["image_id"].get<std::string>()
                                                : std::to_string(j["image_id"].get<std::int64_t>());
    if (!seen.insert(img.image_id).second)
      throw ParseError("duplicate image_id \"" + img.image_id + "\"");
    for (const auto& bj : j.at("boxes")) {
      GtBox box;
      box.bbox = bbox_from_json(bj.at("bbox"));
      if (bj.contains("class_id")) box.class_id = bj["class_id"].get<int>();
      if (bj.contains("est_distance_ft") && !bj["est_distance_ft"].is_null())
        box.est_distance_ft = bj["est_distance_ft"].get<double>();
      img.boxes.push_back(box);
    }
    set.images.push_back(std::move(img));
  });
  return set;
}

PredictionSet load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open predictions file: " + path.string());
  return load_predictions(in, path.string());
}

PredictionSet load_predictions(std::istream& in, std::string_view source_name) {
  PredictionSet set;
  std::set<std::string> seen;
  for_each_jsonl(in, source_name, [&set, &seen](const json& j) {
    ImagePredictions img;
    if (j.contains("frame_id") && j.contains("detections")) {
      // detection replay-log record
      img.image_id = std::to_string(j["frame_id"].get<std::int64_t>());
      for (const auto& dj : j["detections"]) {
        PredBox box;
        box.bbox = bbox_from_json(dj.at("bbox"));
        box.confidence = dj.at("conf").get<double>();
        if (dj.contains("class_id")) box.class_id = dj["class_id"].get<int>();
        img.boxes.push_back(box);
      }
    } else {
      img.image_id = j.at("image_id").is_string()
                         ? j["image_id"].get<std::string>()
                         : std::to_string(j["image_id"].get<std::int64_t>());
      for (const auto& bj : j.at("boxes")) {
        PredBox box;
        box.bbox = bbox_from_json(bj.at("bbox"));
        box.confidence = bj.at("conf").get<double>();
        if (bj.contains("class_id")) box.class_id = bj["class_id"].get<int>();
        img.boxes.push_back(box);
      }
    }
    for (const auto& box : img.boxes)
      if (box.confidence < 0.0 || box.confidence > 1.0)
        throw ParseError("confidence outside [0,1]: " + std::to_string(box.confidence));
    if (!seen.insert(img.image_id).second)
      throw ParseError("duplicate image_id \"" + img.image_id + "\"");
    set.images.push_back(std::move(img));
  });
  return set;
}

ImageAssignment match_image(std::span<const PredBox> preds, std::span<const GtBox> gts,
                            double iou_thresh) {
  // confidence order, ties by input index
  std::vector<std::size_t> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&preds](std::size_t a, std::size_t b) {
    return preds[a].confidence > preds[b].confidence;
  });

  ImageAssignment out;
  std::vector<bool> gt_taken(gts.size(), false);
  for (const std::size_t p : order) {
    double best_iou = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g] || gts[g].class_id != preds[p].class_id) continue;
      const double overlap = iou(preds[p].bbox, gts[g].bbox);
      if (overlap < iou_thresh) continue;
      // strict ">" keeps the lower gt index on ties
      if (overlap > best_iou) {
        best_iou = overlap;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      gt_taken[best_gt] = true;
      out.matches.push_back({p, best_gt, best_iou});
    } else {
      out.fp_preds.push_back(p);
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!gt_taken[g]) out.fn_gts.push_back(g);
  return out;
}

MatchResult match_detections(const PredictionSet& preds, const GroundTruthSet& gts,
                             double iou_thresh) {
  std::map<std::string, std::size_t> gt_index;
  for (std::size_t i = 0; i < gts.images.size(); ++i)
    gt_index.emplace(gts.images[i].image_id, i);

  MatchResult result;
  result.num_gt = gts.total_boxes();
  result.per_image.resize(gts.images.size());

  std::vector<bool> image_has_preds(gts.images.size(), false);
  for (const auto& img : preds.images) {
    const auto it = gt_index.find(img.image_id);
    if (it == gt_index.end())
      throw EvalError("prediction image_id \"" + img.image_id +
                      "\" has no ground-truth entry");
    const std::size_t idx = it->second;
    image_has_preds[idx] = true;
    result.per_image[idx] = match_image(img.boxes, gts.images[idx].boxes, iou_thresh);

    const auto& assignment = result.per_image[idx];
    for (const auto& pair : assignment.matches)
      result.preds.push_back({img.boxes[pair.pred_index].confidence, true, idx, pair.pred_index});
    for (const std::size_t p : assignment.fp_preds)
      result.preds.push_back({img.boxes[p].confidence, false, idx, p});
  }
  // gt images never mentioned by the predictions are all FN
  for (std::size_t i = 0; i < gts.images.size(); ++i) {
    if (image_has_preds[i]) continue;
    for (std::size_t g = 0; g < gts.images[i].boxes.size(); ++g)
      result.per_image[i].fn_gts.push_back(g);
  }

  std::stable_sort(result.preds.begin(), result.preds.end(),
                   [](const MatchResult::PredRecord& a, const MatchResult::PredRecord& b) {
                     return a.confidence > b.confidence;
                   });
  return result;
}

std::vector<PrPoint> pr_curve(const MatchResult& result) {
  if (result.num_gt == 0)
    throw EvalError("recall undefined: zero ground-truth boxes");

  std::vector<PrPoint> curve;
  std::size_t tp = 0;
  std::size_t fp = 0;
  const double num_gt = static_cast<double>(result.num_gt);
  for (std::size_t i = 0; i < result.preds.size(); ++i) {
    if (result.preds[i].is_tp)
      ++tp;
    else
      ++fp;
    // emit one point per distinct confidence (the whole tie group counts)
    if (i + 1 < result.preds.size() &&
        result.preds[i + 1].confidence == result.preds[i].confidence)
      continue;
    const double denom = static_cast<double>(tp + fp);
    curve.push_back({static_cast<double>(tp) / num_gt,
                     denom > 0.0 ? static_cast<double>(tp) / denom : 0.0,
                     result.preds[i].confidence});
  }
  return curve;
}

double average_precision(std::span<const PrPoint> curve) {
  double sum = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = static_cast<double>(i) / 100.0;
    double best = 0.0;
    for (const auto& point : curve)
      if (point.recall >= r) best = std::max(best, point.precision);
    sum += best;
  }
  return sum / 101.0;
}

std::pair<double, double> map_sweep(const PredictionSet& preds, const GroundTruthSet& gts) {
  double ap50 = 0.0;
  double sum = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double thresh = static_cast<double>(50 + 5 * i) / 100.0;
    const MatchResult result = match_detections(preds, gts, thresh);
    const double ap = average_precision(pr_curve(result));
    if (i == 0) ap50 = ap;
    sum += ap;
  }
  return {ap50, sum / 10.0};
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

ConfusionCounts confusion_matrix(const MatchResult& result, double conf_thresh) {
  ConfusionCounts counts;
  std::size_t kept_tp = 0;
  std::size_t kept_fp = 0;
  for (const auto& rec : result.preds) {
    if (rec.confidence < conf_thresh) continue;
    if (rec.is_tp)
      ++kept_tp;
    else
      ++kept_fp;
  }
  counts.tp = kept_tp;
  counts.fp = kept_fp;
  // ground truths whose matching prediction fell below the threshold are
  // misses at this operating point
  counts.fn = result.num_gt - kept_tp;
  return counts;
}

ConfusionNormalized normalize(const ConfusionCounts& counts) {
  ConfusionNormalized norm;
  const std::uint64_t actual_deer = counts.tp + counts.fn;
  if (actual_deer > 0) {
    norm.deer_tp_rate = static_cast<double>(counts.tp) / static_cast<double>(actual_deer);
    norm.deer_fn_rate = static_cast<double>(counts.fn) / static_cast<double>(actual_deer);
  }
  return norm;
}

std::vector<RangeBin> range_binned_accuracy(const GroundTruthSet& gts,
                                            const MatchResult& result,
                                            double conf_thresh) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<RangeBin> bins = {
      {"<20 ft", 0.0, 20.0, 0, 0, std::nullopt},
      {"20-50 ft", 20.0, 50.0, 0, 0, std::nullopt},
      {"50-70 ft", 50.0, 70.0, 0, 0, std::nullopt},
      {"70-100 ft", 70.0, 100.0, 0, 0, std::nullopt},
      {">100 ft", 100.0, kInf, 0, 0, std::nullopt},
  };
  const auto bin_for = [&bins](double distance) -> RangeBin& {
    for (auto& bin : bins)
      if (distance >= bin.lo_ft && distance < bin.hi_ft) return bin;
    return bins.back();
  };

  std::map<std::pair<std::size_t, std::size_t>, double> confidence_of;
  for (const auto& rec : result.preds)
    confidence_of[{rec.image_index, rec.pred_index}] = rec.confidence;

  for (std::size_t i = 0; i < gts.images.size(); ++i) {
    const auto& boxes = gts.images[i].boxes;
    std::vector<bool> detected(boxes.size(), false);
    if (i < result.per_image.size()) {
      for (const auto& pair : result.per_image[i].matches) {
        const auto it = confidence_of.find({i, pair.pred_index});
        if (it != confidence_of.end() && it->second >= conf_thresh)
          detected[pair.gt_index] = true;
      }
    }
    for (std::size_t g = 0; g < boxes.size(); ++g) {
      if (!boxes[g].est_distance_ft)
        throw EvalError("range-binned accuracy requires est_distance_ft on every ground "
                        "truth (image \"" + gts.images[i].image_id + "\")");
      RangeBin& bin = bin_for(*boxes[g].est_distance_ft);
      if (detected[g])
        ++bin.tp;
      else
        ++bin.fn;
    }
  }
  for (auto& bin : bins) {
    const std::uint64_t total = bin.tp + bin.fn;
    if (total > 0)
      bin.accuracy = static_cast<double>(bin.tp) / static_cast<double>(total);
  }
  return bins;
}

SplitCheck validate_split(const SplitStats& stats) {
  SplitCheck check;
  if (stats.total == 0) {
    check.failures.push_back("empty dataset: total is 0");
    return check;
  }
  const std::uint64_t sum = stats.train + stats.val + stats.test;
  if (sum != stats.total)
    check.failures.push_back("counts sum to " + std::to_string(sum) + ", expected total " +
                             std::to_string(stats.total));
  const double total = static_cast<double>(stats.total);
  check.recomputed_train_pct = 100.0 * static_cast<double>(stats.train) / total;
  check.recomputed_val_pct = 100.0 * static_cast<double>(stats.val) / total;
  check.recomputed_test_pct = 100.0 * static_cast<double>(stats.test) / total;
  const auto check_pct = [&check](const char* name, double claimed, double recomputed) {
    if (std::abs(claimed - recomputed) > 0.1) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%s percentage %.2f differs from recomputed %.2f by more than 0.1pp",
                    name, claimed, recomputed);
      check.failures.push_back(buf);
    }
  };
  check_pct("train", stats.train_pct, check.recomputed_train_pct);
  check_pct("val", stats.val_pct, check.recomputed_val_pct);
  check_pct("test", stats.test_pct, check.recomputed_test_pct);
  check.pass = check.failures.empty();
  return check;
}

CompositionCheck validate_composition(const CompositionStats& stats,
                                      double grayscale_target_pct, double tolerance_pp) {
  CompositionCheck check;
  const std::uint64_t total = stats.grayscale + stats.heatmap;
  if (total == 0) {
    check.failures.push_back("empty dataset: no renderings counted");
    return check;
  }
  check.grayscale_pct = 100.0 * static_cast<double>(stats.grayscale) / static_cast<double>(total);
  if (std::abs(check.grayscale_pct - grayscale_target_pct) > tolerance_pp) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "grayscale share %.2f%% misses the %.1f%% target by more than %.1fpp",
                  check.grayscale_pct, grayscale_target_pct, tolerance_pp);
    check.failures.push_back(buf);
  }
  check.pass = check.failures.empty();
  return check;
}

EvalReport evaluate(const PredictionSet& preds, const GroundTruthSet& gts,
                    double conf_thresh) {
  EvalReport report;
  report.num_images = gts.images.size();
  report.num_gt = gts.total_boxes();
  for (const auto& img : preds.images) report.num_preds += img.boxes.size();
  report.conf_thresh = conf_thresh;

  const MatchResult at50 = match_detections(preds, gts, 0.5);
  report.pr_points = pr_curve(at50);
  const auto [ap50, map5095] = map_sweep(preds, gts);
  report.ap50 = ap50;
  report.map5095 = map5095;

  report.confusion = confusion_matrix(at50, conf_thresh);
  report.confusion_normalized = normalize(report.confusion);
  const auto& c = report.confusion;
  report.precision =
      (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  report.recall =
      (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  report.f1 = f1_score(report.precision, report.recall);

  const bool all_have_distance = [&gts]() {
    if (gts.total_boxes() == 0) return false;
    for (const auto& img : gts.images)
      for (const auto& box : img.boxes)
        if (!box.est_distance_ft) return false;
    return true;
  }();
  if (all_have_distance)
    report.range_bins = range_binned_accuracy(gts, at50, conf_thresh);
  return report;
}

nlohmann::ordered_json eval_report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["num_images"] = report.num_images;
  j["num_gt"] = report.num_gt;
  j["num_preds"] = report.num_preds;
  j["conf_thresh"] = report.conf_thresh;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["ap50"] = report.ap50;
  j["map5095"] = report.map5095;
  j["pr_curve"] = nlohmann::ordered_json::array();
  for (const auto& point : report.pr_points)
    j["pr_curve"].push_back(
        {{"recall", point.recall}, {"precision", point.precision}, {"confidence", point.confidence}});
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"fp", report.confusion.fp},
                    {"fn", report.confusion.fn},
                    {"tn", "n/a"}};
  nlohmann::ordered_json norm;
  norm["deer_tp_rate"] = report.confusion_normalized.deer_tp_rate
                             ? nlohmann::ordered_json(*report.confusion_normalized.deer_tp_rate)
                             : nlohmann::ordered_json(nullptr);
  norm["deer_fn_rate"] = report.confusion_normalized.deer_fn_rate
                             ? nlohmann::ordered_json(*report.confusion_normalized.deer_fn_rate)
                             : nlohmann::ordered_json(nullptr);
  j["confusion_normalized"] = std::move(norm);
  j["range_bins"] = nlohmann::ordered_json::array();
  for (const auto& bin : report.range_bins)
    j["range_bins"].push_back(
        {{"range", bin.label},
         {"tp", bin.tp},
         {"fn", bin.fn},
         {"accuracy", bin.accuracy ? nlohmann::ordered_json(*bin.accuracy)
                                   : nlohmann::ordered_json("n/a")}});
  return j;
}

std::string render_metrics_table(const EvalReport& report) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof(line), "%-16s %12s\n", "Metric", "Value");
  out << line;
  const auto row = [&out, &line](const char* name, double value) {
    std::snprintf(line, sizeof(line), "%-16s %11.2f%%\n", name, 100.0 * value);
    out << line;
  };
  row("mAP@0.5", report.ap50);
  row("mAP@0.5:0.95", report.map5095);
  row("Precision", report.precision);
  row("Recall", report.recall);
  row("F1 Score", report.f1);
  return out.str();
}

std::string render_range_table(const EvalReport& report) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof(line), "%-16s %10s %6s %6s\n", "Detection Range", "Accuracy",
                "TP", "FN");
  out << line;
  for (const auto& bin : report.range_bins) {
    if (bin.accuracy)
      std::snprintf(line, sizeof(line), "%-16s %9.1f%% %6llu %6llu\n", bin.label.c_str(),
                    100.0 * *bin.accuracy, static_cast<unsigned long long>(bin.tp),
                    static_cast<unsigned long long>(bin.fn));
    else
      std::snprintf(line, sizeof(line), "%-16s %10s %6llu %6llu\n", bin.label.c_str(), "n/a",
                    static_cast<unsigned long long>(bin.tp),
                    static_cast<unsigned long long>(bin.fn));
    out << line;
  }
  return out.str();
}

}  // namespace wildnet
