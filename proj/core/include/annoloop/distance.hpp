#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "annoloop/types.hpp"

namespace annoloop {

/// Dense symmetric N x N matrix of Euclidean feature distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  /// `values` is row-major N*N; throws DataError if the invariants
  /// (zero diagonal, symmetry, non-negative finite entries) do not hold.
  DistanceMatrix(std::vector<std::string> ids, std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_[i * ids_.size() + j];
  }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * ids_.size(), ids_.size()};
  }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

/// d[i][j] = ||x_i - x_j||_2, optionally after L2-normalizing every row.
/// Each entry is summed in dimension order, so the result is bit-identical
/// for any thread count (0 = auto).
DistanceMatrix pairwise_euclidean(const FeatureMatrix& features, bool normalize = false,
                                  unsigned threads = 1);

// Binary cache, all integers little-endian:
//   "DMAT1" | u64 N | N x (u64 byte length, UTF-8 id) | upper triangle
//   (diagonal excluded) as row-major f64.
void write_distance_cache(std::ostream& out, const DistanceMatrix& dm);
DistanceMatrix read_distance_cache(std::istream& in);
void save_distance_cache(const std::filesystem::path& path, const DistanceMatrix& dm);
DistanceMatrix load_distance_cache(const std::filesystem::path& path);

}  // namespace annoloop
