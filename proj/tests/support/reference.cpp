#include "support/reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace annoloop::testing {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<std::vector<double>> reference_distances(
    const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0.0L;
      for (std::size_t k = 0; k < rows[i].size(); ++k) {
        const long double diff = static_cast<long double>(rows[i][k]) - rows[j][k];
        s += diff * diff;
      }
      d[i][j] = static_cast<double>(std::sqrt(s));
    }
  }
  return d;
}

double aggregate_to_prefix(const DistanceMatrix& dm, std::size_t candidate,
                           std::span<const std::size_t> prefix, Aggregation aggregation) {
  if (aggregation == Aggregation::min) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p : prefix) best = std::min(best, dm(candidate, p));
    return best;
  }
  // The library ranks by the running sum; ranking by the sum in prefix order
  // gives the same argmax as the mean and identical rounding.
  double sum = 0.0;
  for (std::size_t p : prefix) sum += dm(candidate, p);
  return sum;
}

namespace {

std::size_t index_of(const DistanceMatrix& dm, const std::string& id) {
  const auto& ids = dm.ids();
  return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
}

std::size_t exhaustive_pick(const DistanceMatrix& dm, std::span<const std::size_t> prefix,
                            const std::vector<char>& used, Aggregation aggregation, Pick pick) {
  std::size_t best = dm.size();
  double best_value = 0.0;
  for (std::size_t c = 0; c < dm.size(); ++c) {
    if (used[c]) continue;
    const double v = aggregate_to_prefix(dm, c, prefix, aggregation);
    const bool better = best == dm.size() ||
                        (pick == Pick::farthest ? v > best_value : v < best_value);
    if (better) {
      best = c;
      best_value = v;
    }
  }
  return best;
}

}  // namespace

std::optional<std::size_t> first_greedy_violation(const DistanceMatrix& dm,
                                                  std::span<const std::string> ordering,
                                                  std::size_t seed_count, Aggregation aggregation,
                                                  Pick pick) {
  std::vector<std::size_t> prefix;
  std::vector<char> used(dm.size(), 0);
  for (std::size_t step = 0; step < ordering.size(); ++step) {
    const std::size_t actual = index_of(dm, ordering[step]);
    if (actual >= dm.size() || used[actual]) return step;
    if (step >= seed_count) {
      if (exhaustive_pick(dm, prefix, used, aggregation, pick) != actual) return step;
    }
    used[actual] = 1;
    prefix.push_back(actual);
  }
  if (ordering.size() != dm.size()) return ordering.size();
  return std::nullopt;
}

std::vector<std::string> reference_greedy(const DistanceMatrix& dm,
                                          std::span<const std::size_t> query,
                                          Aggregation aggregation, Pick pick) {
  std::vector<std::size_t> prefix(query.begin(), query.end());
  std::vector<char> used(dm.size(), 0);
  for (std::size_t q : prefix) used[q] = 1;
  while (prefix.size() < dm.size()) {
    const std::size_t next = exhaustive_pick(dm, prefix, used, aggregation, pick);
    used[next] = 1;
    prefix.push_back(next);
  }
  std::vector<std::string> out;
  for (std::size_t i : prefix) out.push_back(dm.ids()[i]);
  return out;
}

BruteForceMatching brute_force_matching(std::span<const Prediction> preds,
                                        std::span<const ObjectLabel> gt, double threshold) {
  BruteForceMatching best;
  std::vector<char> gt_used(gt.size(), 0);
  std::function<void(std::size_t, std::size_t, double)> recurse = [&](std::size_t p,
                                                                      std::size_t count,
                                                                      double total) {
    if (p == preds.size()) {
      if (count > best.max_count ||
          (count == best.max_count && total > best.max_total_iou_at_max_count)) {
        best.max_count = count;
        best.max_total_iou_at_max_count = total;
      }
      return;
    }
    recurse(p + 1, count, total);  // leave prediction p unmatched
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (gt_used[g] || preds[p].class_name != gt[g].class_name) continue;
      // Direct area computation, independent of annoloop::iou.
      const auto& a = preds[p].bbox;
      const auto& b = gt[g].bbox;
      const double w = std::max(0.0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
      const double h = std::max(0.0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
      const double inter = w * h;
      const double v = inter / ((a.xmax - a.xmin) * (a.ymax - a.ymin) +
                                (b.xmax - b.xmin) * (b.ymax - b.ymin) - inter);
      if (!(v >= threshold)) continue;
      gt_used[g] = 1;
      recurse(p + 1, count + 1, total + v);
      gt_used[g] = 0;
    }
  };
  recurse(0, 0, 0.0);
  return best;
}

std::uint64_t spreadsheet_wb(std::uint64_t b1n, std::uint64_t a, std::uint64_t r) {
  std::uint64_t corrections = 0;
  corrections += a;
  corrections += r;
  return corrections + b1n;
}

long double spreadsheet_wt(std::uint64_t b1n, std::uint64_t a, std::uint64_t r, long double t) {
  // Column-by-column: manual B_1 time, addition time, removal time at half price.
  const long double manual = static_cast<long double>(b1n) * t;
  const long double added = static_cast<long double>(a) * t;
  const long double removed = static_cast<long double>(r) * (t / 2.0L);
  return manual + added + removed;
}

BBox random_box(std::mt19937_64& rng, double w, double h) {
  const double bw = uniform(rng, 0.05 * w, 0.5 * w);
  const double bh = uniform(rng, 0.05 * h, 0.5 * h);
  const double x = uniform(rng, 0.0, w - bw);
  const double y = uniform(rng, 0.0, h - bh);
  return {x, y, x + bw, y + bh};
}

FeatureMatrix random_features(std::mt19937_64& rng, std::size_t n, std::size_t dim, double scale,
                              bool integer_grid) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("r" + std::to_string(i));
    std::vector<double> row(dim);
    for (auto& v : row) {
      v = integer_grid ? std::round(uniform(rng, -scale, scale)) : uniform(rng, -scale, scale);
    }
    rows.push_back(std::move(row));
  }
  return FeatureMatrix(std::move(ids), std::move(rows));
}

}  // namespace annoloop::testing
