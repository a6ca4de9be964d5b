#pragma once

#include <cstdint>
#include <vector>

#include "gdfl/types.hpp"

namespace gdfl {

struct Dataset {
  uint32_t num_features = 0;
  uint32_t num_classes = 0;
  std::vector<double> features;  // row-major [size() x num_features]
  std::vector<uint32_t> labels;

  size_t size() const { return labels.size(); }
  const double* row(size_t i) const { return features.data() + i * num_features; }
};

/// Gaussian class blobs: class means uniform in [-3,3]^d, isotropic sigma 0.7,
/// samples split evenly across classes with the remainder going to the lowest
/// class indices. Deterministic in seed.
Dataset generate_dataset(uint32_t classes, uint32_t features, size_t total_samples,
                         uint64_t seed);

/// Deterministic train/test split; test gets floor(size * test_fraction) rows.
struct DatasetSplit {
  Dataset train;
  Dataset test;
};
DatasetSplit split_dataset(const Dataset& data, double test_fraction, uint64_t seed);

struct Partition {
  std::vector<std::vector<uint32_t>> node_indices;  // disjoint indices into the dataset
  uint32_t moved_for_repair = 0;  // samples moved so no node ends up empty
};

Partition partition_dataset(const Dataset& data, uint32_t k, const PartitionSpec& spec,
                            uint64_t seed);

}  // namespace gdfl
