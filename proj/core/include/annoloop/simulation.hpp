#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "annoloop/eval.hpp"
#include "annoloop/oracle.hpp"
#include "annoloop/sampler.hpp"
#include "annoloop/types.hpp"

namespace annoloop {

/// Annotator actions needed to turn a set of proposals into ground truth.
struct CorrectionStats {
  std::size_t additions = 0;
  std::size_t removals = 0;
  std::size_t matched = 0;

  CorrectionStats& operator+=(const CorrectionStats& o) noexcept {
    additions += o.additions;
    removals += o.removals;
    matched += o.matched;
    return *this;
  }
  friend bool operator==(const CorrectionStats&, const CorrectionStats&) = default;
};

/// A perfect annotator draws every unmatched gt and deletes every unmatched
/// proposal. Throws ConfigError unless 0 < threshold < 1.
CorrectionStats simulate_correction(std::span<const Prediction> preds,
                                    std::span<const ObjectLabel> gt, double threshold);

/// W_B = additions + removals + objects hand-labeled in B_1.
std::uint64_t workload_boxes(std::uint64_t b1n, std::uint64_t additions, std::uint64_t removals);

/// W_T = B1n*T + A*T + R*T/2, in seconds. Throws ConfigError unless T > 0.
double workload_time(std::uint64_t b1n, std::uint64_t additions, std::uint64_t removals,
                     double seconds_per_box);

/// 100 * (1 - W / W_full); negative when the loop costs more than labeling
/// from scratch. Throws ConfigError unless W_full > 0.
double reduction_percent(double workload, double full_workload);

struct IterationRow {
  std::size_t iter = 0;  ///< 1-based batch index
  std::size_t images = 0;
  std::size_t gt_objects = 0;
  std::size_t predictions = 0;
  std::size_t matched = 0;
  std::size_t additions = 0;  ///< for iter 1, every object (drawn by hand)
  std::size_t removals = 0;
  std::size_t labeled_objects_cum = 0;
  std::uint64_t wb_cum = 0;
  double wt_cum_s = 0.0;

  friend bool operator==(const IterationRow&, const IterationRow&) = default;
};

struct LoopTotals {
  std::uint64_t b1n = 0;
  std::uint64_t additions = 0;  ///< batches 2..n
  std::uint64_t removals = 0;   ///< batches 2..n
  std::uint64_t total_objects = 0;
  std::uint64_t wb = 0;
  double wt_s = 0.0;
  std::uint64_t wb_full = 0;
  double wt_full_s = 0.0;
  double reduction_b_pct = 0.0;
  double reduction_t_pct = 0.0;

  friend bool operator==(const LoopTotals&, const LoopTotals&) = default;
};

struct OrderingInfo {
  Strategy strategy = Strategy::random;
  Aggregation aggregation = Aggregation::min;
  std::uint64_t rng_seed = 0;
  std::size_t seed_count = 1;

  static OrderingInfo of(const Ordering& o) {
    return {o.strategy, o.aggregation, o.rng_seed, o.seed_count};
  }
};

struct LoopReport {
  std::vector<IterationRow> rows;
  LoopTotals totals;
  double iou_threshold = 0.5;
  double time_per_box_s = 10.0;
  DetectorOracle oracle;
  std::optional<OrderingInfo> ordering;
};

/// Train-annotate loop: B_1 is labeled by hand; for each later batch the
/// oracle proposes boxes given the objects labeled in earlier batches, the
/// simulated annotator corrects them, and the batch joins the labeled set.
/// Images within a batch may be processed on `threads` workers (0 = auto)
/// without changing the result.
LoopReport run_loop(const BatchPlan& plan, const Dataset& dataset, const DetectorOracle& oracle,
                    double iou_threshold, double seconds_per_box = 10.0, unsigned threads = 1);

}  // namespace annoloop
