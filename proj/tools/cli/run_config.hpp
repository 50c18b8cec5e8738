#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "annoloop/oracle.hpp"
#include "annoloop/sampler.hpp"

namespace annoloop::cli {

/// Every knob of an experiment run. JSON keys and command-line flags share
/// the same lower_snake_case names; the oracle parameters are flat keys.
struct RunConfig {
  std::filesystem::path annotations;
  std::filesystem::path features;
  std::filesystem::path output_dir = "annoloop_out";
  std::filesystem::path ordering;        // optional precomputed ordering
  std::filesystem::path plan;            // optional precomputed batch plan
  std::filesystem::path predictions;     // eval only
  std::filesystem::path output;          // eval only; stdout when empty
  std::filesystem::path distance_cache;  // optional DMAT1 cache

  std::vector<Strategy> strategies{Strategy::dissimilar};
  Aggregation aggregation = Aggregation::min;
  std::size_t seed_count = 1;
  std::uint64_t rng_seed = 0;
  std::size_t batch_count = 10;
  double iou_threshold = 0.5;
  double time_per_box_s = 10.0;
  bool normalize_features = false;
  DetectorOracle oracle = default_oracle();
  std::size_t replicates = 1;
  std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  static DetectorOracle default_oracle();

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// Config echo embedded in every output file.
  [[nodiscard]] nlohmann::json to_json() const;
  /// Unknown keys and wrongly typed values raise ConfigError. Keys absent
  /// from `j` keep the values already in `base`.
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);
  static RunConfig from_json(const nlohmann::json& j);
};

enum class ValueKind { string, integer, number, boolean, string_list, number_list };

/// Keys accepted in config files and as `--key value` flags.
const std::map<std::string, ValueKind>& config_keys();

/// Converts a raw flag value into the JSON type expected for `key`.
nlohmann::json flag_to_json(const std::string& key, const std::string& raw);

/// Reads `config_path` (if non-empty) and applies `overrides` on top.
RunConfig resolve_config(const std::filesystem::path& config_path,
                         const std::map<std::string, std::string>& overrides);

}  // namespace annoloop::cli
