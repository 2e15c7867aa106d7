#include "wildnet/latency.hpp"

#include <algorithm>
#include <cmath>

namespace wildnet {

BudgetReport check_budgets(std::span<const FrameTiming> frames) {
  BudgetReport report;
  std::vector<double> complete_totals;
  for (const auto& frame : frames) {
    const auto values = frame.stages.values();
    for (std::size_t s = 0; s < kStageCount; ++s) {
      if (values[s] > kStageBudgets[s].max_ms)
        report.violations.push_back(
            {frame.frame_id, kStageBudgets[s].name, values[s], kStageBudgets[s].max_ms});
    }
    const double total = frame.stages.total_ms();
    if (total > kTotalBudgetMs)
      report.violations.push_back({frame.frame_id, "total", total, kTotalBudgetMs});
    if (frame.complete) complete_totals.push_back(total);
  }
  if (!complete_totals.empty()) {
    const auto summary = summarize_latencies(std::move(complete_totals));
    report.median_total_ms = summary.median_ms;
    report.median_under_target = summary.median_ms < kMedianTargetMs;
  }
  return report;
}

LatencySummary summarize_latencies(std::vector<double> samples) {
  LatencySummary summary;
  if (samples.empty()) return summary;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  summary.count = n;
  summary.min_ms = samples.front();
  summary.max_ms = samples.back();
  summary.median_ms =
      (n % 2 == 1) ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2.0;
  // nearest-rank percentile
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  summary.p95_ms = samples[rank == 0 ? 0 : rank - 1];
  return summary;
}

}  // namespace wildnet
