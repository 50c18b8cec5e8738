#include "annoloop/eval.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <tuple>

#include "annoloop/error.hpp"

namespace annoloop {
namespace {

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("IoU threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
}

}  // namespace

double iou(const BBox& a, const BBox& b) noexcept {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

MatchResult match_greedy(std::span<const Prediction> preds, std::span<const ObjectLabel> gt,
                         double threshold) {
  check_threshold(threshold);
  std::vector<Match> candidates;
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (preds[p].class_name != gt[g].class_name) continue;
      const double v = iou(preds[p].bbox, gt[g].bbox);
      if (v >= threshold) candidates.push_back({p, g, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return std::tie(a.prediction, a.gt) < std::tie(b.prediction, b.gt);
  });

  MatchResult result;
  std::vector<char> pred_used(preds.size(), 0);
  std::vector<char> gt_used(gt.size(), 0);
  for (const auto& c : candidates) {
    if (pred_used[c.prediction] || gt_used[c.gt]) continue;
    pred_used[c.prediction] = 1;
    gt_used[c.gt] = 1;
    result.matches.push_back(c);
  }
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (!pred_used[p]) result.unmatched_predictions.push_back(p);
  }
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) result.unmatched_gt.push_back(g);
  }
  return result;
}

GroundTruthByImage ground_truth_of(const Dataset& dataset) {
  GroundTruthByImage out;
  for (const auto& img : dataset.images()) out.emplace(img.id, img.objects);
  return out;
}

std::optional<double> average_precision(const PredictionMap& preds, const GroundTruthByImage& gt,
                                        const std::string& class_name, double threshold) {
  check_threshold(threshold);
  std::size_t positives = 0;
  for (const auto& [id, objects] : gt) {
    for (const auto& o : objects) positives += o.class_name == class_name ? 1 : 0;
  }
  if (positives == 0) return std::nullopt;

  struct Ranked {
    double score;
    const std::string* image;
    std::size_t index;
    const Prediction* pred;
  };
  std::vector<Ranked> ranked;
  for (const auto& [id, list] : preds) {
    if (!gt.count(id)) continue;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (list[k].class_name == class_name) ranked.push_back({list[k].score, &id, k, &list[k]});
    }
  }
  if (ranked.empty()) return 0.0;
  // Map iteration already yields ascending image ids; stable_sort keeps them
  // (and prediction indices) as the tie-break.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

  std::map<std::string, std::vector<char>> consumed;
  std::vector<double> precision(ranked.size());
  std::vector<double> recall(ranked.size());
  std::size_t tp = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto& objects = gt.at(*ranked[r].image);
    auto& used = consumed[*ranked[r].image];
    used.resize(objects.size(), 0);
    std::size_t best = objects.size();
    double best_iou = -1.0;
    for (std::size_t g = 0; g < objects.size(); ++g) {
      if (used[g] || objects[g].class_name != class_name) continue;
      const double v = iou(ranked[r].pred->bbox, objects[g].bbox);
      if (v >= threshold && v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    if (best != objects.size()) {
      used[best] = 1;
      ++tp;
    }
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
    recall[r] = static_cast<double>(tp) / static_cast<double>(positives);
  }

  for (std::size_t r = ranked.size() - 1; r > 0; --r) {
    precision[r - 1] = std::max(precision[r - 1], precision[r]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    ap += (recall[r] - prev_recall) * precision[r];
    prev_recall = recall[r];
  }
  return ap;
}

MeanAveragePrecision mean_average_precision(const PredictionMap& preds,
                                            const GroundTruthByImage& gt, double threshold) {
  std::set<std::string> classes;
  for (const auto& [id, objects] : gt) {
    for (const auto& o : objects) classes.insert(o.class_name);
  }
  for (const auto& [id, list] : preds) {
    if (!gt.count(id)) continue;
    for (const auto& p : list) classes.insert(p.class_name);
  }
  MeanAveragePrecision out;
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& c : classes) {
    auto ap = average_precision(preds, gt, c, threshold);
    out.per_class.emplace(c, ap);
    if (ap) {
      sum += *ap;
      ++counted;
    }
  }
  if (counted == 0) throw DataError("mAP is undefined: no class has ground truth");
  out.map = sum / static_cast<double>(counted);
  return out;
}

}  // namespace annoloop
