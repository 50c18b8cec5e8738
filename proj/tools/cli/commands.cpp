#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "annoloop/error.hpp"
#include "annoloop/io.hpp"
#include "annoloop/oracle.hpp"
#include "annoloop/parallel.hpp"
#include "annoloop/serialize.hpp"
#include "annoloop/simulation.hpp"

namespace annoloop::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json stats_json(const SampleStats& s) {
  return {{"count", s.count},
          {"mean", optional_number(s.mean)},
          {"stddev", optional_number(s.stddev)},
          {"stderr", optional_number(s.stderr_mean)}};
}

std::string csv_number(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void require_path(const fs::path& p, const char* key) {
  if (p.empty()) throw ConfigError(std::string("--") + key + " is required");
}

// Plans shared by every replicate come from --plan or --ordering.
struct FixedPlan {
  BatchPlan plan;
  std::optional<Ordering> ordering;
  std::string label;
};

std::optional<FixedPlan> fixed_plan(const RunConfig& config, const Dataset& dataset) {
  if (config.plan.empty() && config.ordering.empty()) return std::nullopt;
  FixedPlan fixed;
  if (!config.ordering.empty()) {
    fixed.ordering = ordering_from_json(read_json_file(config.ordering));
    check_permutation(fixed.ordering->ids, dataset.ids());
    fixed.label = std::string(to_string(fixed.ordering->strategy));
  }
  if (!config.plan.empty()) {
    fixed.plan = batch_plan_from_json(read_json_file(config.plan));
    if (fixed.label.empty()) fixed.label = "plan";
  } else {
    fixed.plan = split_batches(*fixed.ordering, config.batch_count);
  }
  return fixed;
}

std::string report_stem(const std::string& label, std::size_t replicate) {
  return "report_" + label + "_r" + std::to_string(replicate);
}

}  // namespace

bool needs_distances(std::span<const Strategy> strategies) {
  return std::any_of(strategies.begin(), strategies.end(), [](Strategy s) {
    return s == Strategy::similar || s == Strategy::dissimilar;
  });
}

Inputs load_inputs(const RunConfig& config, bool need_distances, unsigned threads) {
  require_path(config.annotations, "annotations");
  Inputs in;
  in.dataset = load_annotations(config.annotations);
  if (in.dataset.empty()) throw DataError(config.annotations.string() + ": no images");
  if (!need_distances) return in;

  const auto ids = in.dataset.ids();
  if (!config.distance_cache.empty() && fs::exists(config.distance_cache)) {
    in.distances = load_distance_cache(config.distance_cache);
    check_permutation(in.distances->ids(), ids);
    return in;
  }
  require_path(config.features, "features");
  auto features = load_features(config.features);
  join_check(in.dataset, features);
  in.features = features.reordered(ids);
  in.distances = pairwise_euclidean(*in.features, config.normalize_features, threads);
  if (!config.distance_cache.empty()) save_distance_cache(config.distance_cache, *in.distances);
  return in;
}

Ordering build_ordering(Strategy strategy, const RunConfig& config, const Inputs& inputs,
                        std::uint64_t rng_seed) {
  switch (strategy) {
    case Strategy::dissimilar:
    case Strategy::similar: {
      if (!inputs.distances) throw ConfigError("similar/dissimilar orderings need --features");
      return strategy == Strategy::dissimilar
                 ? order_dissimilar(*inputs.distances, config.seed_count, rng_seed,
                                    config.aggregation)
                 : order_similar(*inputs.distances, config.seed_count, rng_seed,
                                 config.aggregation);
    }
    case Strategy::random:
      return order_random(inputs.dataset.ids(), rng_seed);
    case Strategy::temporal:
      return order_temporal(inputs.dataset);
  }
  throw ConfigError("unsupported strategy");
}

SampleStats sample_stats(std::span<const double> values) {
  SampleStats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  s.mean = mean;
  if (values.size() >= 2) {
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    const double sd = std::sqrt(sq / static_cast<double>(values.size() - 1));
    s.stddev = sd;
    s.stderr_mean = sd / std::sqrt(static_cast<double>(values.size()));
  }
  return s;
}

void cmd_order(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.strategies.size() != 1) throw ConfigError("order takes exactly one strategy");
  const Strategy strategy = config.strategies.front();
  const Inputs inputs = load_inputs(config, needs_distances(config.strategies), threads_from_env());
  const Ordering ordering = build_ordering(strategy, config, inputs, config.rng_seed);
  const BatchPlan plan = split_batches(ordering, config.batch_count);

  json ordering_json = to_json(ordering);
  ordering_json["config"] = config.to_json();
  json plan_json = to_json(plan);
  plan_json["config"] = config.to_json();
  write_file_atomic(config.output_dir / kOrderingFile, dump(ordering_json));
  write_file_atomic(config.output_dir / kPlanFile, dump(plan_json));

  log << "N=" << inputs.dataset.size() << " D="
      << (inputs.features ? std::to_string(inputs.features->dim()) : std::string("n/a"))
      << " strategy=" << to_string(strategy) << " aggregation=" << to_string(config.aggregation)
      << " seed_count=" << config.seed_count << " rng_seed=" << config.rng_seed
      << " batches=" << plan.batches.size() << '\n';
}

std::vector<SummaryRow> cmd_simulate(const RunConfig& config, std::ostream& log) {
  config.validate();
  const unsigned threads = threads_from_env();
  const bool has_fixed = !config.plan.empty() || !config.ordering.empty();
  const Inputs inputs =
      load_inputs(config, !has_fixed && needs_distances(config.strategies), threads);
  const Dataset& dataset = inputs.dataset;
  const auto fixed = fixed_plan(config, dataset);

  struct Cell {
    std::string label;
    std::optional<Strategy> strategy;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
  };
  std::vector<Cell> cells;
  std::vector<std::string> labels;
  if (fixed) {
    labels.push_back(fixed->label);
    for (std::size_t r = 0; r < config.replicates; ++r) {
      cells.push_back({fixed->label, std::nullopt, r, config.rng_seed + r});
    }
  } else {
    for (Strategy s : config.strategies) {
      const std::string label(to_string(s));
      if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
        throw ConfigError("strategy \"" + label + "\" listed twice");
      }
      labels.push_back(label);
      for (std::size_t r = 0; r < config.replicates; ++r) {
        cells.push_back({label, s, r, config.rng_seed + r});
      }
    }
  }

  std::vector<LoopTotals> totals(cells.size());
  const json echo = config.to_json();
  parallel_for(cells.size(), threads, [&](std::size_t k) {
    const Cell& cell = cells[k];
    BatchPlan plan;
    std::optional<OrderingInfo> info;
    if (fixed) {
      plan = fixed->plan;
      if (fixed->ordering) info = OrderingInfo::of(*fixed->ordering);
    } else {
      const Ordering ordering = build_ordering(*cell.strategy, config, inputs, cell.seed);
      plan = split_batches(ordering, config.batch_count);
      info = OrderingInfo::of(ordering);
    }
    DetectorOracle oracle = config.oracle;
    oracle.rng_seed = cell.seed;
    LoopReport report = run_loop(plan, dataset, oracle, config.iou_threshold,
                                 config.time_per_box_s, 1);
    report.ordering = info;
    totals[k] = report.totals;

    json j = to_json(report);
    j["config"]["run"] = echo;
    j["config"]["replicate"] = cell.replicate;
    std::ostringstream csv;
    write_report_csv(csv, report);
    const auto stem = report_stem(cell.label, cell.replicate);
    write_file_atomic(config.output_dir / (stem + ".json"), dump(j));
    write_file_atomic(config.output_dir / (stem + ".csv"), csv.str());
  });

  std::vector<SummaryRow> rows;
  for (const auto& label : labels) {
    SummaryRow row;
    row.label = label;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (cells[k].label != label) continue;
      row.rng_seeds.push_back(cells[k].seed);
      row.reduction_b_pct.push_back(totals[k].reduction_b_pct);
      row.reduction_t_pct.push_back(totals[k].reduction_t_pct);
    }
    row.reduction_b = sample_stats(row.reduction_b_pct);
    row.reduction_t = sample_stats(row.reduction_t_pct);
    rows.push_back(std::move(row));
  }

  json summary_rows = json::array();
  std::ostringstream csv;
  csv << "strategy,replicates,reduction_b_mean,reduction_b_std,reduction_t_mean,reduction_t_std\n";
  for (const auto& row : rows) {
    summary_rows.push_back({{"strategy", row.label},
                            {"replicates", row.rng_seeds.size()},
                            {"rng_seeds", row.rng_seeds},
                            {"reduction_b_pct", row.reduction_b_pct},
                            {"reduction_t_pct", row.reduction_t_pct},
                            {"reduction_b", stats_json(row.reduction_b)},
                            {"reduction_t", stats_json(row.reduction_t)}});
    csv << row.label << ',' << row.rng_seeds.size() << ',' << csv_number(row.reduction_b.mean)
        << ',' << csv_number(row.reduction_b.stddev) << ',' << csv_number(row.reduction_t.mean)
        << ',' << csv_number(row.reduction_t.stddev) << '\n';
  }
  write_file_atomic(config.output_dir / kSummaryJson,
                    dump({{"config", echo}, {"rows", std::move(summary_rows)}}));
  write_file_atomic(config.output_dir / kSummaryCsv, csv.str());

  for (const auto& row : rows) {
    log << row.label << ": reduction_b=" << csv_number(row.reduction_b.mean)
        << "% reduction_t=" << csv_number(row.reduction_t.mean) << "% over "
        << row.rng_seeds.size() << " replicate(s)\n";
  }
  return rows;
}

MeanAveragePrecision cmd_eval(const RunConfig& config, std::ostream& out) {
  if (!(config.iou_threshold > 0.0 && config.iou_threshold < 1.0)) {
    throw ConfigError("iou_threshold must lie in (0, 1)");
  }
  require_path(config.annotations, "annotations");
  require_path(config.predictions, "predictions");
  const Dataset dataset = load_annotations(config.annotations);
  const PredictionsByImage preds = load_predictions(config.predictions);

  std::size_t overlap = 0;
  for (const auto& [id, list] : preds) overlap += dataset.find(id) ? 1 : 0;
  if (!preds.empty() && overlap == 0) {
    throw DataError("prediction ids do not overlap the annotation ids");
  }
  const auto result = mean_average_precision(preds, ground_truth_of(dataset), config.iou_threshold);

  json per_class = json::object();
  for (const auto& [cls, ap] : result.per_class) per_class[cls] = optional_number(ap);
  const json report = {{"config",
                        {{"annotations", config.annotations.generic_string()},
                         {"predictions", config.predictions.generic_string()},
                         {"iou_threshold", config.iou_threshold}}},
                       {"images", dataset.size()},
                       {"images_with_predictions", overlap},
                       {"per_class", std::move(per_class)},
                       {"map", result.map}};
  if (config.output.empty()) {
    out << dump(report);
  } else {
    write_file_atomic(config.output, dump(report));
    out << "mAP=" << format_double(result.map) << '\n';
  }
  return result;
}

std::vector<std::optional<double>> curve_values(const Ordering& ordering, const Dataset& dataset,
                                                const DetectorOracle& oracle,
                                                std::span<const double> fractions,
                                                double iou_threshold) {
  const std::size_t n = ordering.ids.size();
  std::map<std::string, std::size_t> total_by_class;
  for (const auto& img : dataset.images()) {
    for (const auto& o : img.objects) ++total_by_class[o.class_name];
  }
  const std::vector<std::string> classes(dataset.class_set().begin(), dataset.class_set().end());

  std::vector<std::optional<double>> out;
  out.reserve(fractions.size());
  for (double f : fractions) {
    auto k = static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);

    std::map<std::string, std::size_t> labeled_by_class;
    std::size_t labeled = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (const auto& o : dataset.at(ordering.ids[i]).objects) {
        ++labeled_by_class[o.class_name];
        ++labeled;
      }
    }
    const auto progress = TrainingProgress::from_counts(labeled, dataset.total_objects(),
                                                        labeled_by_class, total_by_class);
    GroundTruthByImage gt;
    PredictionMap preds;
    std::size_t held_out_objects = 0;
    for (std::size_t i = k; i < n; ++i) {
      const auto& img = dataset.at(ordering.ids[i]);
      gt.emplace(img.id, img.objects);
      preds.emplace(img.id, oracle_predict(oracle, img, progress, classes));
      held_out_objects += img.objects.size();
    }
    if (held_out_objects == 0) {
      out.push_back(std::nullopt);
      continue;
    }
    out.push_back(mean_average_precision(preds, gt, iou_threshold).map);
  }
  return out;
}

std::vector<CurvePoint> cmd_curve(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.fractions.empty()) throw ConfigError("fractions must not be empty");
  const unsigned threads = threads_from_env();
  const Inputs inputs = load_inputs(config, needs_distances(config.strategies), threads);
  const Dataset& dataset = inputs.dataset;

  const std::size_t strategies = config.strategies.size();
  std::vector<std::vector<std::optional<double>>> values(strategies * config.replicates);
  parallel_for(values.size(), threads, [&](std::size_t cell) {
    const Strategy s = config.strategies[cell / config.replicates];
    const std::uint64_t seed = config.rng_seed + cell % config.replicates;
    const Ordering ordering = build_ordering(s, config, inputs, seed);
    DetectorOracle oracle = config.oracle;
    oracle.rng_seed = seed;
    values[cell] = curve_values(ordering, dataset, oracle, config.fractions, config.iou_threshold);
  });

  std::vector<CurvePoint> points;
  const std::size_t n = dataset.size();
  for (std::size_t si = 0; si < strategies; ++si) {
    for (std::size_t fi = 0; fi < config.fractions.size(); ++fi) {
      CurvePoint p;
      p.strategy = std::string(to_string(config.strategies[si]));
      p.fraction = config.fractions[fi];
      p.labeled_images = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::ceil(p.fraction * static_cast<double>(n) - 1e-9)), 1, n);
      std::vector<double> present;
      for (std::size_t r = 0; r < config.replicates; ++r) {
        const auto& v = values[si * config.replicates + r][fi];
        p.values.push_back(v);
        if (v) present.push_back(*v);
      }
      p.map = sample_stats(present);
      points.push_back(std::move(p));
    }
  }

  json rows = json::array();
  std::ostringstream csv;
  csv << "strategy,fraction,labeled_images,map_mean,map_std,map_stderr,count\n";
  for (const auto& p : points) {
    json vals = json::array();
    for (const auto& v : p.values) vals.push_back(optional_number(v));
    rows.push_back({{"strategy", p.strategy},
                    {"fraction", p.fraction},
                    {"labeled_images", p.labeled_images},
                    {"map", optional_number(p.map.mean)},
                    {"map_stats", stats_json(p.map)},
                    {"values", std::move(vals)}});
    csv << p.strategy << ',' << format_double(p.fraction) << ',' << p.labeled_images << ','
        << csv_number(p.map.mean) << ',' << csv_number(p.map.stddev) << ','
        << csv_number(p.map.stderr_mean) << ',' << p.map.count << '\n';
  }
  write_file_atomic(config.output_dir / kCurveJson,
                    dump({{"config", config.to_json()}, {"rows", std::move(rows)}}));
  write_file_atomic(config.output_dir / kCurveCsv, csv.str());
  log << "curve: " << points.size() << " rows written to "
      << (config.output_dir / kCurveJson).generic_string() << '\n';
  return points;
}

}  // namespace annoloop::cli
