#include "cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

#include "annoloop/error.hpp"
#include "annoloop/serialize.hpp"

namespace annoloop::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split_list(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const auto comma = raw.find(',', start);
    auto item = raw.substr(start, comma == std::string_view::npos ? raw.npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& key, std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("--" + key + ": \"" + std::string(s) + "\" is not a number");
  }
  return v;
}

template <typename T>
T typed(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key \"" + key + "\" has the wrong type");
  }
}

std::uint64_t non_negative_integer(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  throw ConfigError("config key \"" + key + "\" must be a non-negative integer");
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key \"" + key + "\" must be a number");
  return v.get<double>();
}

}  // namespace

DetectorOracle RunConfig::default_oracle() {
  DetectorOracle o;
  o.kind = OracleKind::learning;
  return o;
}

const std::map<std::string, ValueKind>& config_keys() {
  static const std::map<std::string, ValueKind> keys = {
      {"annotations", ValueKind::string},     {"features", ValueKind::string},
      {"output_dir", ValueKind::string},      {"ordering", ValueKind::string},
      {"plan", ValueKind::string},            {"predictions", ValueKind::string},
      {"output", ValueKind::string},          {"distance_cache", ValueKind::string},
      {"strategy", ValueKind::string_list},   {"aggregation", ValueKind::string},
      {"seed_count", ValueKind::integer},     {"rng_seed", ValueKind::integer},
      {"batch_count", ValueKind::integer},    {"iou_threshold", ValueKind::number},
      {"time_per_box_s", ValueKind::number},  {"normalize_features", ValueKind::boolean},
      {"oracle", ValueKind::string},          {"p_detect", ValueKind::number},
      {"jitter", ValueKind::number},          {"class_flip", ValueKind::number},
      {"fp_rate", ValueKind::number},         {"p_max", ValueKind::number},
      {"tau", ValueKind::number},             {"lambda0", ValueKind::number},
      {"coverage", ValueKind::string},        {"replicates", ValueKind::integer},
      {"fractions", ValueKind::number_list},
  };
  return keys;
}

json flag_to_json(const std::string& key, const std::string& raw) {
  const auto& keys = config_keys();
  auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError("unknown option --" + key);
  switch (it->second) {
    case ValueKind::string:
      return raw;
    case ValueKind::integer: {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc{} || ptr != raw.data() + raw.size() || raw.empty()) {
        throw ConfigError("--" + key + ": \"" + raw + "\" is not a non-negative integer");
      }
      return v;
    }
    case ValueKind::number:
      return parse_number(key, raw);
    case ValueKind::boolean:
      if (raw == "true" || raw == "1") return true;
      if (raw == "false" || raw == "0") return false;
      throw ConfigError("--" + key + ": expected true or false");
    case ValueKind::string_list:
      return split_list(raw);
    case ValueKind::number_list: {
      json arr = json::array();
      for (const auto& item : split_list(raw)) arr.push_back(parse_number(key, item));
      return arr;
    }
  }
  return raw;
}

RunConfig RunConfig::from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto& keys = config_keys();
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError("unknown config key \"" + key + "\"");
    if (value.is_null()) continue;
    if (key == "annotations") c.annotations = typed<std::string>(value, key);
    else if (key == "features") c.features = typed<std::string>(value, key);
    else if (key == "output_dir") c.output_dir = typed<std::string>(value, key);
    else if (key == "ordering") c.ordering = typed<std::string>(value, key);
    else if (key == "plan") c.plan = typed<std::string>(value, key);
    else if (key == "predictions") c.predictions = typed<std::string>(value, key);
    else if (key == "output") c.output = typed<std::string>(value, key);
    else if (key == "distance_cache") c.distance_cache = typed<std::string>(value, key);
    else if (key == "strategy") {
      std::vector<std::string> names;
      if (value.is_string()) names = split_list(value.get<std::string>());
      else names = typed<std::vector<std::string>>(value, key);
      c.strategies.clear();
      for (const auto& n : names) c.strategies.push_back(parse_strategy(n));
    } else if (key == "aggregation") c.aggregation = parse_aggregation(typed<std::string>(value, key));
    else if (key == "seed_count") c.seed_count = non_negative_integer(value, key);
    else if (key == "rng_seed") c.rng_seed = non_negative_integer(value, key);
    else if (key == "batch_count") c.batch_count = non_negative_integer(value, key);
    else if (key == "iou_threshold") c.iou_threshold = number(value, key);
    else if (key == "time_per_box_s") c.time_per_box_s = number(value, key);
    else if (key == "normalize_features") c.normalize_features = typed<bool>(value, key);
    else if (key == "oracle") c.oracle.kind = parse_oracle_kind(typed<std::string>(value, key));
    else if (key == "p_detect") c.oracle.p_detect = number(value, key);
    else if (key == "jitter") c.oracle.jitter = number(value, key);
    else if (key == "class_flip") c.oracle.class_flip = number(value, key);
    else if (key == "fp_rate") c.oracle.fp_rate = number(value, key);
    else if (key == "p_max") c.oracle.p_max = number(value, key);
    else if (key == "tau") c.oracle.tau = number(value, key);
    else if (key == "lambda0") c.oracle.lambda0 = number(value, key);
    else if (key == "coverage") c.oracle.coverage = parse_coverage(typed<std::string>(value, key));
    else if (key == "replicates") c.replicates = non_negative_integer(value, key);
    else if (key == "fractions") {
      if (value.is_string()) {
        c.fractions.clear();
        for (const auto& item : split_list(value.get<std::string>())) {
          c.fractions.push_back(parse_number(key, item));
        }
      } else {
        c.fractions = typed<std::vector<double>>(value, key);
      }
    }
  }
  return c;
}

RunConfig RunConfig::from_json(const json& j) { return from_json(j, RunConfig{}); }

void RunConfig::validate() const {
  if (strategies.empty()) throw ConfigError("at least one strategy is required");
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ConfigError("iou_threshold must lie in (0, 1)");
  }
  if (!(time_per_box_s > 0.0) || !std::isfinite(time_per_box_s)) {
    throw ConfigError("time_per_box_s must be finite and > 0");
  }
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (batch_count < 1) throw ConfigError("batch_count must be >= 1");
  if (seed_count < 1) throw ConfigError("seed_count must be >= 1");
  oracle.validate();
  double prev = 0.0;
  for (double f : fractions) {
    if (!(f > prev && f <= 1.0)) {
      throw ConfigError("fractions must be strictly ascending within (0, 1]");
    }
    prev = f;
  }
}

json RunConfig::to_json() const {
  json strategy_names = json::array();
  for (auto s : strategies) strategy_names.push_back(to_string(s));
  return {{"annotations", annotations.generic_string()},
          {"features", features.generic_string()},
          {"output_dir", output_dir.generic_string()},
          {"ordering", ordering.generic_string()},
          {"plan", plan.generic_string()},
          {"predictions", predictions.generic_string()},
          {"distance_cache", distance_cache.generic_string()},
          {"strategy", std::move(strategy_names)},
          {"aggregation", to_string(aggregation)},
          {"seed_count", seed_count},
          {"rng_seed", rng_seed},
          {"batch_count", batch_count},
          {"iou_threshold", iou_threshold},
          {"time_per_box_s", time_per_box_s},
          {"normalize_features", normalize_features},
          {"oracle", to_string(oracle.kind)},
          {"p_detect", oracle.p_detect},
          {"jitter", oracle.jitter},
          {"class_flip", oracle.class_flip},
          {"fp_rate", oracle.fp_rate},
          {"p_max", oracle.p_max},
          {"tau", oracle.tau},
          {"lambda0", oracle.lambda0},
          {"coverage", to_string(oracle.coverage)},
          {"replicates", replicates},
          {"fractions", fractions}};
}

RunConfig resolve_config(const std::filesystem::path& config_path,
                         const std::map<std::string, std::string>& overrides) {
  RunConfig c;
  if (!config_path.empty()) {
    json file;
    try {
      file = read_json_file(config_path);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    c = RunConfig::from_json(file, c);
  }
  json flags = json::object();
  for (const auto& [key, raw] : overrides) flags[key] = flag_to_json(key, raw);
  c = RunConfig::from_json(flags, c);
  return c;
}

}  // namespace annoloop::cli
