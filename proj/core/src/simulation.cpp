#include "annoloop/simulation.hpp"

#include <cmath>
#include <map>
#include <string>

#include "annoloop/error.hpp"
#include "annoloop/parallel.hpp"

namespace annoloop {

CorrectionStats simulate_correction(std::span<const Prediction> preds,
                                    std::span<const ObjectLabel> gt, double threshold) {
  const MatchResult m = match_greedy(preds, gt, threshold);
  return {m.unmatched_gt.size(), m.unmatched_predictions.size(), m.matches.size()};
}

std::uint64_t workload_boxes(std::uint64_t b1n, std::uint64_t additions, std::uint64_t removals) {
  return additions + removals + b1n;
}

double workload_time(std::uint64_t b1n, std::uint64_t additions, std::uint64_t removals,
                     double seconds_per_box) {
  if (!(seconds_per_box > 0.0) || !std::isfinite(seconds_per_box)) {
    throw ConfigError("time per box must be finite and > 0");
  }
  return static_cast<double>(b1n) * seconds_per_box +
         static_cast<double>(additions) * seconds_per_box +
         static_cast<double>(removals) * seconds_per_box / 2.0;
}

double reduction_percent(double workload, double full_workload) {
  if (!(full_workload > 0.0)) throw ConfigError("full-annotation workload must be > 0");
  return 100.0 * (1.0 - workload / full_workload);
}

LoopReport run_loop(const BatchPlan& plan, const Dataset& dataset, const DetectorOracle& oracle,
                    double iou_threshold, double seconds_per_box, unsigned threads) {
  if (plan.batches.empty()) throw DataError("empty batch plan");
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ConfigError("IoU threshold must lie in (0, 1)");
  }
  if (!(seconds_per_box > 0.0) || !std::isfinite(seconds_per_box)) {
    throw ConfigError("time per box must be finite and > 0");
  }
  oracle.validate();

  std::vector<std::string> planned;
  planned.reserve(plan.image_count());
  for (const auto& batch : plan.batches) {
    if (batch.empty()) throw DataError("batch plan contains an empty batch");
    planned.insert(planned.end(), batch.begin(), batch.end());
  }
  check_permutation(planned, dataset.ids());

  const std::size_t total_objects = dataset.total_objects();
  if (total_objects == 0) throw DataError("dataset has no objects; reductions are undefined");

  std::map<std::string, std::size_t> total_by_class;
  for (const auto& img : dataset.images()) {
    for (const auto& o : img.objects) ++total_by_class[o.class_name];
  }
  const std::vector<std::string> classes(dataset.class_set().begin(), dataset.class_set().end());

  LoopReport report;
  report.iou_threshold = iou_threshold;
  report.time_per_box_s = seconds_per_box;
  report.oracle = oracle;

  std::map<std::string, std::size_t> labeled_by_class;
  std::size_t labeled = 0;
  std::uint64_t b1n = 0;
  std::uint64_t additions = 0;
  std::uint64_t removals = 0;

  for (std::size_t b = 0; b < plan.batches.size(); ++b) {
    const auto& batch = plan.batches[b];
    IterationRow row;
    row.iter = b + 1;
    row.images = batch.size();

    std::vector<const ImageRecord*> images;
    images.reserve(batch.size());
    for (const auto& id : batch) images.push_back(&dataset.at(id));
    for (const auto* img : images) row.gt_objects += img->objects.size();

    if (b == 0) {
      b1n = row.gt_objects;
      row.additions = row.gt_objects;
    } else {
      const auto progress =
          TrainingProgress::from_counts(labeled, total_objects, labeled_by_class, total_by_class);
      struct PerImage {
        CorrectionStats stats;
        std::size_t predictions = 0;
      };
      std::vector<PerImage> per_image(images.size());
      parallel_for(images.size(), threads, [&](std::size_t k) {
        const auto preds = oracle_predict(oracle, *images[k], progress, classes);
        per_image[k].predictions = preds.size();
        per_image[k].stats = simulate_correction(preds, images[k]->objects, iou_threshold);
      });
      CorrectionStats batch_stats;
      for (const auto& r : per_image) {
        batch_stats += r.stats;
        row.predictions += r.predictions;
      }
      row.matched = batch_stats.matched;
      row.additions = batch_stats.additions;
      row.removals = batch_stats.removals;
      additions += row.additions;
      removals += row.removals;
    }

    // The corrected batch now carries ground-truth labels.
    for (const auto* img : images) {
      for (const auto& o : img->objects) ++labeled_by_class[o.class_name];
    }
    labeled += row.gt_objects;
    row.labeled_objects_cum = labeled;
    row.wb_cum = workload_boxes(b1n, additions, removals);
    row.wt_cum_s = workload_time(b1n, additions, removals, seconds_per_box);
    report.rows.push_back(row);
  }

  auto& t = report.totals;
  t.b1n = b1n;
  t.additions = additions;
  t.removals = removals;
  t.total_objects = total_objects;
  t.wb = workload_boxes(b1n, additions, removals);
  t.wt_s = workload_time(b1n, additions, removals, seconds_per_box);
  t.wb_full = total_objects;
  t.wt_full_s = static_cast<double>(total_objects) * seconds_per_box;
  t.reduction_b_pct = reduction_percent(static_cast<double>(t.wb), static_cast<double>(t.wb_full));
  t.reduction_t_pct = reduction_percent(t.wt_s, t.wt_full_s);
  return report;
}

}  // namespace annoloop
