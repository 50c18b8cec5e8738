#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "annoloop/distance.hpp"
#include "annoloop/eval.hpp"
#include "annoloop/sampler.hpp"
#include "annoloop/types.hpp"
#include "cli/run_config.hpp"

namespace annoloop::cli {

inline constexpr const char* kOrderingFile = "ordering.json";
inline constexpr const char* kPlanFile = "batch_plan.json";
inline constexpr const char* kSummaryJson = "summary.json";
inline constexpr const char* kSummaryCsv = "summary.csv";
inline constexpr const char* kCurveJson = "curve.json";
inline constexpr const char* kCurveCsv = "curve.csv";

struct Inputs {
  Dataset dataset;
  std::optional<FeatureMatrix> features;
  std::optional<DistanceMatrix> distances;
};

/// Loads annotations and, when a distance-based strategy needs them,
/// features (reordered to annotation order) and the distance matrix.
Inputs load_inputs(const RunConfig& config, bool need_distances, unsigned threads);

bool needs_distances(std::span<const Strategy> strategies);

Ordering build_ordering(Strategy strategy, const RunConfig& config, const Inputs& inputs,
                        std::uint64_t rng_seed);

struct SampleStats {
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> stddev;  ///< sample (n - 1) deviation; needs n >= 2
  std::optional<double> stderr_mean;
};

SampleStats sample_stats(std::span<const double> values);

struct SummaryRow {
  std::string label;
  std::vector<std::uint64_t> rng_seeds;
  std::vector<double> reduction_b_pct;
  std::vector<double> reduction_t_pct;
  SampleStats reduction_b;
  SampleStats reduction_t;
};

struct CurvePoint {
  std::string strategy;
  double fraction = 0.0;
  std::size_t labeled_images = 0;
  std::vector<std::optional<double>> values;  ///< one per seed
  SampleStats map;
};

/// mAP of the oracle on the images after the labeled prefix, for each
/// fraction of `ordering`; nullopt where the remainder has no gt.
std::vector<std::optional<double>> curve_values(const Ordering& ordering, const Dataset& dataset,
                                                const DetectorOracle& oracle,
                                                std::span<const double> fractions,
                                                double iou_threshold);

void cmd_order(const RunConfig& config, std::ostream& log);
std::vector<SummaryRow> cmd_simulate(const RunConfig& config, std::ostream& log);
MeanAveragePrecision cmd_eval(const RunConfig& config, std::ostream& out);
std::vector<CurvePoint> cmd_curve(const RunConfig& config, std::ostream& log);

}  // namespace annoloop::cli
