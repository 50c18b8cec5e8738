#include "annoloop/sampler.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "annoloop/error.hpp"
#include "annoloop/random.hpp"

namespace annoloop {
namespace {

enum class Direction { farthest, nearest };

// Running aggregate per candidate: the minimum distance to the query list,
// or the sum of distances (argmax/argmin of the sum equals that of the mean
// since every candidate shares the divisor).
Ordering greedy_order(const DistanceMatrix& dm, std::span<const std::size_t> query,
                      Aggregation aggregation, Direction direction) {
  const std::size_t n = dm.size();
  if (n == 0) throw DataError("cannot order an empty distance matrix");
  if (query.empty() || query.size() > n) {
    throw ConfigError("seed_count must lie in [1, " + std::to_string(n) + "]");
  }

  std::vector<double> agg(n, aggregation == Aggregation::min
                                 ? std::numeric_limits<double>::infinity()
                                 : 0.0);
  std::vector<char> selected(n, 0);
  std::vector<std::size_t> order;
  order.reserve(n);

  auto append = [&](std::size_t pick) {
    if (pick >= n || selected[pick]) throw ConfigError("query list must hold distinct indices");
    selected[pick] = 1;
    order.push_back(pick);
    auto row = dm.row(pick);
    for (std::size_t c = 0; c < n; ++c) {
      if (selected[c]) continue;
      if (aggregation == Aggregation::min) {
        agg[c] = std::min(agg[c], row[c]);
      } else {
        agg[c] += row[c];
      }
    }
  };

  for (std::size_t s : query) append(s);

  while (order.size() < n) {
    std::size_t best = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (selected[c]) continue;
      if (best == n) {
        best = c;
        continue;
      }
      const bool better = direction == Direction::farthest ? agg[c] > agg[best]
                                                           : agg[c] < agg[best];
      if (better) best = c;
    }
    append(best);
  }

  Ordering out;
  out.strategy = direction == Direction::farthest ? Strategy::dissimilar : Strategy::similar;
  out.aggregation = aggregation;
  out.seed_count = query.size();
  out.ids.reserve(n);
  for (std::size_t idx : order) out.ids.push_back(dm.ids()[idx]);
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::similar: return "similar";
    case Strategy::dissimilar: return "dissimilar";
    case Strategy::random: return "random";
    case Strategy::temporal: return "temporal";
  }
  return "unknown";
}

std::string_view to_string(Aggregation a) noexcept {
  return a == Aggregation::min ? "min" : "mean";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::similar, Strategy::dissimilar, Strategy::random, Strategy::temporal}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown strategy \"" + std::string(name) +
                    "\" (expected similar, dissimilar, random or temporal)");
}

Aggregation parse_aggregation(std::string_view name) {
  if (name == "min") return Aggregation::min;
  if (name == "mean") return Aggregation::mean;
  throw ConfigError("unknown aggregation \"" + std::string(name) + "\" (expected min or mean)");
}

std::size_t BatchPlan::image_count() const noexcept {
  std::size_t n = 0;
  for (const auto& b : batches) n += b.size();
  return n;
}

std::vector<std::size_t> draw_query_seeds(std::size_t n, std::size_t seed_count,
                                          std::uint64_t rng_seed) {
  if (seed_count > n) throw ConfigError("seed_count exceeds the number of images");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(rng_seed);
  for (std::size_t k = 0; k < seed_count; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(uniform_below(rng, n - k));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(seed_count);
  return idx;
}

namespace {

Ordering seeded_order(const DistanceMatrix& dm, std::size_t seed_count, std::uint64_t rng_seed,
                      Aggregation aggregation, Direction direction) {
  if (dm.size() == 0) throw DataError("cannot order an empty distance matrix");
  if (seed_count < 1 || seed_count > dm.size()) {
    throw ConfigError("seed_count must lie in [1, " + std::to_string(dm.size()) + "]");
  }
  const auto query = draw_query_seeds(dm.size(), seed_count, rng_seed);
  Ordering out = greedy_order(dm, query, aggregation, direction);
  out.rng_seed = rng_seed;
  return out;
}

}  // namespace

Ordering order_dissimilar(const DistanceMatrix& dm, std::size_t seed_count, std::uint64_t rng_seed,
                          Aggregation aggregation) {
  return seeded_order(dm, seed_count, rng_seed, aggregation, Direction::farthest);
}

Ordering order_similar(const DistanceMatrix& dm, std::size_t seed_count, std::uint64_t rng_seed,
                       Aggregation aggregation) {
  return seeded_order(dm, seed_count, rng_seed, aggregation, Direction::nearest);
}

Ordering order_dissimilar_from(const DistanceMatrix& dm, std::span<const std::size_t> query,
                               Aggregation aggregation) {
  return greedy_order(dm, query, aggregation, Direction::farthest);
}

Ordering order_similar_from(const DistanceMatrix& dm, std::span<const std::size_t> query,
                            Aggregation aggregation) {
  return greedy_order(dm, query, aggregation, Direction::nearest);
}

Ordering order_random(std::vector<std::string> ids, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(ids[i - 1], ids[j]);
  }
  Ordering out;
  out.strategy = Strategy::random;
  out.rng_seed = rng_seed;
  out.ids = std::move(ids);
  return out;
}

Ordering order_temporal(const Dataset& dataset) {
  const auto images = dataset.images();
  std::vector<std::size_t> idx(images.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    return images[i].seq.value_or(static_cast<std::int64_t>(i));
  };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = key(a);
    const auto kb = key(b);
    if (ka != kb) return ka < kb;
    return images[a].id < images[b].id;
  });
  Ordering out;
  out.strategy = Strategy::temporal;
  out.ids.reserve(idx.size());
  for (std::size_t i : idx) out.ids.push_back(images[i].id);
  return out;
}

BatchPlan split_batches(const Ordering& ordering, std::size_t batch_count) {
  const std::size_t n = ordering.ids.size();
  if (batch_count < 1 || batch_count > n) {
    throw ConfigError("batch_count must lie in [1, " + std::to_string(n) + "], got " +
                      std::to_string(batch_count));
  }
  const std::size_t base = n / batch_count;
  const std::size_t bigger = n % batch_count;
  BatchPlan plan;
  plan.batches.reserve(batch_count);
  auto it = ordering.ids.begin();
  for (std::size_t b = 0; b < batch_count; ++b) {
    const std::size_t size = base + (b < bigger ? 1 : 0);
    plan.batches.emplace_back(it, it + static_cast<std::ptrdiff_t>(size));
    it += static_cast<std::ptrdiff_t>(size);
  }
  return plan;
}

void check_permutation(const std::vector<std::string>& ids,
                       const std::vector<std::string>& expected) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw DataError("id \"" + id + "\" appears more than once");
  }
  const std::set<std::string> want(expected.begin(), expected.end());
  if (seen != want) {
    for (const auto& id : want) {
      if (!seen.count(id)) throw DataError("id \"" + id + "\" is missing from the ordering");
    }
    for (const auto& id : seen) {
      if (!want.count(id)) throw DataError("unknown id \"" + id + "\" in the ordering");
    }
  }
}

}  // namespace annoloop
