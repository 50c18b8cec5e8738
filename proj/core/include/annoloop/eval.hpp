#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "annoloop/types.hpp"

namespace annoloop {

struct Prediction {
  std::string class_name;
  BBox bbox;
  double score = 1.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct Match {
  std::size_t prediction = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

/// One-to-one assignment of predictions to ground truth. Every prediction
/// and gt index appears in exactly one of the three collections.
struct MatchResult {
  std::vector<Match> matches;
  std::vector<std::size_t> unmatched_predictions;
  std::vector<std::size_t> unmatched_gt;
};

/// Intersection over union in [0, 1]; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b) noexcept;

/// Greedy class-aware matching. Candidate pairs share a class and have
/// iou >= threshold; they are accepted in descending iou order (ties by
/// prediction index, then gt index) while both sides are free.
MatchResult match_greedy(std::span<const Prediction> preds, std::span<const ObjectLabel> gt,
                         double threshold);

using GroundTruthByImage = std::map<std::string, std::vector<ObjectLabel>>;
using PredictionMap = std::map<std::string, std::vector<Prediction>>;

GroundTruthByImage ground_truth_of(const Dataset& dataset);

/// All-point interpolated AP for one class. Predictions are ranked by score
/// (descending; ties by image id then prediction index); each takes the
/// best still-unconsumed gt of its image with iou >= threshold. Images
/// missing from `gt` are skipped. Returns nullopt if the class has no gt.
std::optional<double> average_precision(const PredictionMap& preds, const GroundTruthByImage& gt,
                                        const std::string& class_name, double threshold);

struct MeanAveragePrecision {
  /// Classes seen in gt or predictions; nullopt where the class has no gt.
  std::map<std::string, std::optional<double>> per_class;
  double map = 0.0;
};

/// Unweighted mean of AP over classes with gt; throws DataError if none.
MeanAveragePrecision mean_average_precision(const PredictionMap& preds,
                                            const GroundTruthByImage& gt, double threshold);

}  // namespace annoloop
