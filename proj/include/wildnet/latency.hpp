#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wildnet {

// Per-frame latency ledger for the six pipeline stages, capture through
// driver alert.
struct StageTimings {
  double capture_ms = 0.0;
  double inference_ms = 0.0;
  double sdsm_gen_ms = 0.0;
  double v2x_tx_ms = 0.0;
  double rx_decode_ms = 0.0;
  double alert_ms = 0.0;

  double total_ms() const {
    return capture_ms + inference_ms + sdsm_gen_ms + v2x_tx_ms + rx_decode_ms + alert_ms;
  }

  std::array<double, 6> values() const {
    return {capture_ms, inference_ms, sdsm_gen_ms, v2x_tx_ms, rx_decode_ms, alert_ms};
  }
};

inline constexpr std::size_t kStageCount = 6;

// Per-stage timing budget: the typical window the simulator samples from
// and the hard per-stage maximum the budget check enforces.
struct StageBudget {
  const char* name;
  double typical_min_ms;
  double typical_max_ms;
  double max_ms;
};

inline constexpr std::array<StageBudget, kStageCount> kStageBudgets = {{
    {"capture", 10.0, 10.0, 25.0},
    {"inference", 40.0, 50.0, 65.0},
    {"sdsm_gen", 8.0, 10.0, 15.0},
    {"v2x_tx", 10.0, 15.0, 20.0},
    {"rx_decode", 10.0, 15.0, 20.0},
    {"alert", 5.0, 10.0, 15.0},
}};

inline constexpr double kTotalBudgetMs = 160.0;
inline constexpr double kMedianTargetMs = 100.0;

struct FrameTiming {
  std::int64_t frame_id = 0;
  StageTimings stages;
  // true when the frame ran the full detection-to-alert pipeline
  bool complete = false;
};

struct BudgetViolation {
  std::int64_t frame_id = 0;
  std::string stage;  // stage name, or "total"
  double value_ms = 0.0;
  double limit_ms = 0.0;

  bool operator==(const BudgetViolation&) const = default;
};

struct BudgetReport {
  std::vector<BudgetViolation> violations;
  // median of total_ms over complete frames; empty when none completed
  std::optional<double> median_total_ms;
  bool median_under_target = false;
};

// Flags every stage sample above its per-stage maximum and every frame
// total above the 160 ms ceiling; reports whether the median complete
// total stays under 100 ms.
BudgetReport check_budgets(std::span<const FrameTiming> frames);

struct LatencySummary {
  double min_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
  std::size_t count = 0;
};

// min / median / p95 (nearest-rank) / max; zeroed summary when empty.
LatencySummary summarize_latencies(std::vector<double> samples);

}  // namespace wildnet
