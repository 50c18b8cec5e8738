#include "annoloop/serialize.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "annoloop/error.hpp"

namespace annoloop {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

json to_json(const Ordering& o) {
  return {{"strategy", to_string(o.strategy)},
          {"aggregation", to_string(o.aggregation)},
          {"rng_seed", o.rng_seed},
          {"seed_count", o.seed_count},
          {"ids", o.ids}};
}

Ordering ordering_from_json(const json& j) {
  try {
    Ordering o;
    o.strategy = parse_strategy(j.at("strategy").get<std::string>());
    o.aggregation = parse_aggregation(get_or<std::string>(j, "aggregation", "min"));
    o.rng_seed = get_or<std::uint64_t>(j, "rng_seed", 0);
    o.seed_count = get_or<std::size_t>(j, "seed_count", 1);
    o.ids = j.at("ids").get<std::vector<std::string>>();
    return o;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ordering: ") + e.what());
  }
}

json to_json(const BatchPlan& plan) { return {{"batches", plan.batches}}; }

BatchPlan batch_plan_from_json(const json& j) {
  try {
    return BatchPlan{j.at("batches").get<std::vector<std::vector<std::string>>>()};
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed batch plan: ") + e.what());
  }
}

json to_json(const DetectorOracle& o) {
  return {{"kind", to_string(o.kind)},   {"p_detect", o.p_detect}, {"jitter", o.jitter},
          {"class_flip", o.class_flip},  {"fp_rate", o.fp_rate},   {"p_max", o.p_max},
          {"tau", o.tau},                {"lambda0", o.lambda0},   {"coverage", to_string(o.coverage)},
          {"rng_seed", o.rng_seed}};
}

DetectorOracle oracle_from_json(const json& j) {
  try {
    DetectorOracle o;
    o.kind = parse_oracle_kind(get_or<std::string>(j, "kind", "perfect"));
    o.p_detect = get_or(j, "p_detect", o.p_detect);
    o.jitter = get_or(j, "jitter", o.jitter);
    o.class_flip = get_or(j, "class_flip", o.class_flip);
    o.fp_rate = get_or(j, "fp_rate", o.fp_rate);
    o.p_max = get_or(j, "p_max", o.p_max);
    o.tau = get_or(j, "tau", o.tau);
    o.lambda0 = get_or(j, "lambda0", o.lambda0);
    o.coverage = parse_coverage(get_or<std::string>(j, "coverage", "global"));
    o.rng_seed = get_or<std::uint64_t>(j, "rng_seed", 0);
    return o;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed oracle description: ") + e.what());
  }
}

json to_json(const LoopReport& r) {
  json config = {{"iou_threshold", r.iou_threshold},
                 {"time_per_box_s", r.time_per_box_s},
                 {"oracle", to_json(r.oracle)}};
  if (r.ordering) {
    config["ordering"] = {{"strategy", to_string(r.ordering->strategy)},
                          {"aggregation", to_string(r.ordering->aggregation)},
                          {"rng_seed", r.ordering->rng_seed},
                          {"seed_count", r.ordering->seed_count}};
  } else {
    config["ordering"] = nullptr;
  }

  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"iter", row.iter},
                    {"manual", row.iter == 1},
                    {"images", row.images},
                    {"gt_objects", row.gt_objects},
                    {"predictions", row.predictions},
                    {"matched", row.matched},
                    {"additions", row.additions},
                    {"removals", row.removals},
                    {"labeled_objects_cum", row.labeled_objects_cum},
                    {"wb_cum", row.wb_cum},
                    {"wt_cum_s", row.wt_cum_s}});
  }
  const auto& t = r.totals;
  json totals = {{"b1n", t.b1n},
                 {"additions", t.additions},
                 {"removals", t.removals},
                 {"total_objects", t.total_objects},
                 {"wb", t.wb},
                 {"wt_s", t.wt_s},
                 {"wb_full", t.wb_full},
                 {"wt_full_s", t.wt_full_s},
                 {"reduction_b_pct", t.reduction_b_pct},
                 {"reduction_t_pct", t.reduction_t_pct}};
  return {{"config", std::move(config)}, {"iterations", std::move(rows)}, {"totals", std::move(totals)}};
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_report_csv(std::ostream& out, const LoopReport& r) {
  out << "iter,images,gt_objects,predictions,matched,additions,removals,labeled_objects_cum,"
         "wb_cum,wt_cum_s\n";
  for (const auto& row : r.rows) {
    out << row.iter << ',' << row.images << ',' << row.gt_objects << ',' << row.predictions << ','
        << row.matched << ',' << row.additions << ',' << row.removals << ','
        << row.labeled_objects_cum << ',' << row.wb_cum << ',' << format_double(row.wt_cum_s)
        << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace annoloop
