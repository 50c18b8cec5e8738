#include "cli/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "annoloop/error.hpp"
#include "annoloop/random.hpp"

namespace annoloop::cli {
namespace {

double normal(std::mt19937_64& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string image_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%05zu", i);
  return buf;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.clusters == 0 || spec.images_per_cluster == 0 || spec.dim == 0) {
    throw ConfigError("synthetic data needs clusters, images and dimensions");
  }
  if (spec.min_objects > spec.max_objects || spec.max_objects > 4) {
    throw ConfigError("object count range must satisfy min <= max <= 4");
  }
  std::mt19937_64 rng(splitmix64(spec.seed));
  const std::size_t n = spec.clusters * spec.images_per_cluster;

  std::vector<ImageRecord> images;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> cluster_of;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % spec.clusters;
    ImageRecord img;
    img.id = image_id(i);
    img.seq = static_cast<std::int64_t>(i);
    img.width = spec.width;
    img.height = spec.height;

    const std::size_t count =
        spec.min_objects + uniform_below(rng, spec.max_objects - spec.min_objects + 1);
    // One object per image quadrant keeps boxes disjoint.
    for (std::size_t k = 0; k < count; ++k) {
      const double qw = spec.width / 2.0;
      const double qh = spec.height / 2.0;
      const double ox = (k % 2) * qw;
      const double oy = (k / 2) * qh;
      const double w = qw * (0.3 + 0.6 * uniform01(rng));
      const double h = qh * (0.3 + 0.6 * uniform01(rng));
      const double x = ox + (qw - w) * uniform01(rng);
      const double y = oy + (qh - h) * uniform01(rng);
      std::size_t cls = c;
      if (spec.clusters > 1 && !(uniform01(rng) < spec.majority)) {
        cls = (c + 1 + uniform_below(rng, spec.clusters - 1)) % spec.clusters;
      }
      img.objects.push_back({"class_" + std::to_string(cls), BBox{x, y, x + w, y + h}});
    }

    std::vector<double> row(spec.dim);
    for (std::size_t d = 0; d < spec.dim; ++d) {
      const double centre = d == 0 ? spec.separation * static_cast<double>(c) : 0.0;
      row[d] = centre + spec.spread * normal(rng);
    }
    ids.push_back(img.id);
    rows.push_back(std::move(row));
    cluster_of.push_back(c);
    images.push_back(std::move(img));
  }
  return {Dataset(std::move(images)), FeatureMatrix(std::move(ids), std::move(rows)),
          std::move(cluster_of)};
}

}  // namespace annoloop::cli
