#include "annoloop/distance.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "annoloop/error.hpp"
#include "annoloop/parallel.hpp"

namespace annoloop {
namespace {

constexpr char kMagic[5] = {'D', 'M', 'A', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(v >> (8 * k));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw DataError("truncated distance cache");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
  return v;
}

}  // namespace

DistanceMatrix::DistanceMatrix(std::vector<std::string> ids, std::vector<double> values)
    : ids_(std::move(ids)), values_(std::move(values)) {
  const std::size_t n = ids_.size();
  if (values_.size() != n * n) throw DataError("distance matrix has wrong number of entries");
  for (std::size_t i = 0; i < n; ++i) {
    if ((*this)(i, i) != 0.0) throw DataError("distance matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (*this)(i, j);
      if (!std::isfinite(d) || d < 0.0 || d != (*this)(j, i)) {
        throw DataError("distance matrix must be symmetric, finite and non-negative");
      }
    }
  }
}

DistanceMatrix pairwise_euclidean(const FeatureMatrix& features, bool normalize, unsigned threads) {
  const std::size_t n = features.rows();
  const std::size_t dim = features.dim();
  if (n == 0) throw DataError("pairwise distances need at least one feature row");

  std::vector<double> rows(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = features.row(i);
    double scale = 1.0;
    if (normalize) {
      double sq = 0.0;
      for (double v : r) sq += v * v;
      if (sq == 0.0) throw DataError("zero-norm feature row \"" + features.ids()[i] + "\"");
      scale = 1.0 / std::sqrt(sq);
    }
    for (std::size_t k = 0; k < dim; ++k) rows[i * dim + k] = normalize ? r[k] * scale : r[k];
  }

  std::vector<double> d(n * n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    const double* a = rows.data() + i * dim;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* b = rows.data() + j * dim;
      double sum = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
      }
      const double dist = std::sqrt(sum);
      d[i * n + j] = dist;
      d[j * n + i] = dist;
    }
  });
  return DistanceMatrix(features.ids(), std::move(d));
}

void write_distance_cache(std::ostream& out, const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  out.write(kMagic, sizeof kMagic);
  put_u64(out, n);
  for (const auto& id : dm.ids()) {
    put_u64(out, id.size());
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) put_u64(out, std::bit_cast<std::uint64_t>(dm(i, j)));
  }
  if (!out) throw DataError("failed writing distance cache");
}

DistanceMatrix read_distance_cache(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw DataError("not a DMAT1 distance cache");
  }
  const std::uint64_t n = get_u64(in);
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t len = get_u64(in);
    std::string id(len, '\0');
    if (!in.read(id.data(), static_cast<std::streamsize>(len))) {
      throw DataError("truncated distance cache");
    }
    ids.push_back(std::move(id));
  }
  std::vector<double> values(n * n, 0.0);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = i + 1; j < n; ++j) {
      const double v = std::bit_cast<double>(get_u64(in));
      values[i * n + j] = v;
      values[j * n + i] = v;
    }
  }
  return DistanceMatrix(std::move(ids), std::move(values));
}

void save_distance_cache(const std::filesystem::path& path, const DistanceMatrix& dm) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_distance_cache(out, dm);
}

DistanceMatrix load_distance_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_distance_cache(in);
}

}  // namespace annoloop
