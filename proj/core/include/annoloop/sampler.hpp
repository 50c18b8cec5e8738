#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "annoloop/distance.hpp"
#include "annoloop/types.hpp"

namespace annoloop {

enum class Strategy { similar, dissimilar, random, temporal };
enum class Aggregation { min, mean };

std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(Aggregation a) noexcept;
/// Throw ConfigError on unknown names.
Strategy parse_strategy(std::string_view name);
Aggregation parse_aggregation(std::string_view name);

/// A permutation of every image id plus the parameters that produced it.
struct Ordering {
  Strategy strategy = Strategy::random;
  Aggregation aggregation = Aggregation::min;
  std::uint64_t rng_seed = 0;
  std::size_t seed_count = 1;
  std::vector<std::string> ids;

  friend bool operator==(const Ordering&, const Ordering&) = default;
};

/// Consecutive, non-empty slices B_1..B_n of an ordering.
struct BatchPlan {
  std::vector<std::vector<std::string>> batches;

  [[nodiscard]] std::size_t image_count() const noexcept;
  friend bool operator==(const BatchPlan&, const BatchPlan&) = default;
};

/// Indices of the initial query list: `seed_count` distinct indices in
/// [0, n) drawn uniformly with a partial Fisher-Yates shuffle.
std::vector<std::size_t> draw_query_seeds(std::size_t n, std::size_t seed_count,
                                          std::uint64_t rng_seed);

/// Greedy ordering that repeatedly appends the unselected image whose
/// aggregate (min or mean) distance to the query list is largest. With
/// Aggregation::min this is farthest-first traversal. Ties go to the
/// smaller matrix index.
Ordering order_dissimilar(const DistanceMatrix& dm, std::size_t seed_count = 1,
                          std::uint64_t rng_seed = 0, Aggregation aggregation = Aggregation::min);

/// As order_dissimilar, appending the image with the smallest aggregate.
Ordering order_similar(const DistanceMatrix& dm, std::size_t seed_count = 1,
                       std::uint64_t rng_seed = 0, Aggregation aggregation = Aggregation::min);

/// Greedy orderings started from an explicit query list (matrix indices,
/// distinct, non-empty).
Ordering order_dissimilar_from(const DistanceMatrix& dm, std::span<const std::size_t> query,
                               Aggregation aggregation = Aggregation::min);
Ordering order_similar_from(const DistanceMatrix& dm, std::span<const std::size_t> query,
                            Aggregation aggregation = Aggregation::min);

/// Fisher-Yates shuffle driven by rng_seed.
Ordering order_random(std::vector<std::string> ids, std::uint64_t rng_seed);

/// Ascending by seq (file position when absent), ties by id.
Ordering order_temporal(const Dataset& dataset);

/// First (N mod n) batches get ceil(N/n) ids, the rest floor(N/n).
BatchPlan split_batches(const Ordering& ordering, std::size_t batch_count);

/// Throws DataError unless `ids` is a permutation of `expected`.
void check_permutation(const std::vector<std::string>& ids,
                       const std::vector<std::string>& expected);

}  // namespace annoloop
