#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "annoloop/eval.hpp"
#include "annoloop/types.hpp"

namespace annoloop {

enum class OracleKind { perfect, null, duplicating, noisy, learning };

/// How the learning oracle measures how much it has been trained on.
enum class Coverage {
  global,     ///< labeled objects / all objects
  per_class,  ///< labeled objects of the gt's class / all objects of that class
};

std::string_view to_string(OracleKind k) noexcept;
std::string_view to_string(Coverage c) noexcept;
OracleKind parse_oracle_kind(std::string_view name);
Coverage parse_coverage(std::string_view name);

/// Simulated detector standing in for a trained network.
struct DetectorOracle {
  OracleKind kind = OracleKind::perfect;
  double p_detect = 0.9;    ///< noisy: probability each gt is emitted
  double jitter = 0.05;     ///< corner jitter as a fraction of box width/height
  double class_flip = 0.05; ///< probability an emitted box gets another class
  double fp_rate = 0.0;     ///< noisy: Poisson mean of false positives per image
  double p_max = 0.95;      ///< learning: asymptotic detection probability
  double tau = 0.25;        ///< learning: labeled-fraction scale
  double lambda0 = 1.0;     ///< learning: false-positive rate when untrained
  Coverage coverage = Coverage::global;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError when a parameter is out of range.
  void validate() const;
};

/// What the detector has been trained on when it predicts.
struct TrainingProgress {
  double labeled_fraction = 0.0;
  std::map<std::string, double> class_fraction;

  static TrainingProgress from_counts(std::size_t labeled, std::size_t total,
                                      const std::map<std::string, std::size_t>& labeled_by_class,
                                      const std::map<std::string, std::size_t>& total_by_class);
};

/// Predictions for one image. All randomness comes from a stream keyed by
/// (rng_seed, image id), so results do not depend on evaluation order.
/// `classes` supplies flip targets and false-positive labels.
std::vector<Prediction> oracle_predict(const DetectorOracle& oracle, const ImageRecord& image,
                                       const TrainingProgress& progress,
                                       std::span<const std::string> classes);

std::vector<Prediction> oracle_predict(const DetectorOracle& oracle, const ImageRecord& image,
                                       double labeled_fraction,
                                       std::span<const std::string> classes);

}  // namespace annoloop
