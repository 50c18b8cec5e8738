#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "annoloop/types.hpp"

namespace annoloop::cli {

/// Gaussian feature clusters, one dominant object class per cluster.
struct SyntheticSpec {
  std::size_t clusters = 2;
  std::size_t images_per_cluster = 100;
  std::size_t dim = 2;
  double separation = 20.0;  ///< distance between neighbouring cluster centres
  double spread = 1.0;       ///< per-axis standard deviation within a cluster
  std::size_t min_objects = 1;
  std::size_t max_objects = 3;
  double majority = 0.9;  ///< probability an object takes its cluster's class
  int width = 640;
  int height = 480;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset dataset;
  FeatureMatrix features;
  std::vector<std::size_t> cluster_of;  ///< per image, in dataset order
};

/// Image i belongs to cluster i % clusters; ids are "img_00000", ... and
/// classes "class_0", ... Objects never overlap each other.
SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace annoloop::cli
