#include "gdfl/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gdfl/error.hpp"
#include "gdfl/rng.hpp"

namespace gdfl {

namespace {
constexpr double kBlobSigma = 0.7;
}

Dataset generate_dataset(uint32_t classes, uint32_t features, size_t total_samples,
                         uint64_t seed) {
  if (classes < 2) fail(ErrorKind::InvalidArgs, "generate_dataset: classes must be >= 2");
  if (features < 2) fail(ErrorKind::InvalidArgs, "generate_dataset: features must be >= 2");
  if (total_samples < classes)
    fail(ErrorKind::InvalidArgs, "generate_dataset: need at least one sample per class");

  Rng rng(mix_seed(seed, 0xd474u));

  std::vector<double> means(static_cast<size_t>(classes) * features);
  for (auto& m : means) m = rng.uniform(-3.0, 3.0);

  // even split, remainder to the lowest class indices
  const size_t base = total_samples / classes;
  const size_t remainder = total_samples % classes;

  Dataset data;
  data.num_features = features;
  data.num_classes = classes;
  data.features.reserve(total_samples * features);
  data.labels.reserve(total_samples);

  for (uint32_t c = 0; c < classes; ++c) {
    const size_t count = base + (c < remainder ? 1 : 0);
    const double* mean = means.data() + static_cast<size_t>(c) * features;
    for (size_t s = 0; s < count; ++s) {
      for (uint32_t d = 0; d < features; ++d)
        data.features.push_back(mean[d] + kBlobSigma * rng.normal());
      data.labels.push_back(c);
    }
  }
  return data;
}

DatasetSplit split_dataset(const Dataset& data, double test_fraction, uint64_t seed) {
  if (!(test_fraction >= 0.0) || test_fraction >= 1.0)
    fail(ErrorKind::InvalidArgs, "split_dataset: test_fraction must be in [0, 1)");

  const size_t n = data.size();
  std::vector<uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(mix_seed(seed, 0x59117u));
  rng.shuffle(perm);

  const size_t test_count = static_cast<size_t>(static_cast<double>(n) * test_fraction);
  std::vector<uint32_t> test_idx(perm.begin(), perm.begin() + test_count);
  std::vector<uint32_t> train_idx(perm.begin() + test_count, perm.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  auto take = [&](const std::vector<uint32_t>& idx) {
    Dataset out;
    out.num_features = data.num_features;
    out.num_classes = data.num_classes;
    out.features.reserve(idx.size() * data.num_features);
    out.labels.reserve(idx.size());
    for (uint32_t i : idx) {
      const double* r = data.row(i);
      out.features.insert(out.features.end(), r, r + data.num_features);
      out.labels.push_back(data.labels[i]);
    }
    return out;
  };

  return {take(train_idx), take(test_idx)};
}

Partition partition_dataset(const Dataset& data, uint32_t k, const PartitionSpec& spec,
                            uint64_t seed) {
  if (k < 2) fail(ErrorKind::InvalidArgs, "partition: need at least 2 nodes");
  const size_t n = data.size();
  if (n == 0) fail(ErrorKind::InvalidArgs, "partition: dataset is empty");
  if (n < k) fail(ErrorKind::InvalidArgs, "partition: fewer samples than nodes");

  Rng rng(mix_seed(seed, 0x9a47u));
  Partition part;
  part.node_indices.assign(k, {});

  switch (spec.kind) {
    case PartitionKind::Iid: {
      std::vector<uint32_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0u);
      rng.shuffle(perm);
      const size_t base = n / k;
      const size_t remainder = n % k;
      size_t offset = 0;
      for (uint32_t node = 0; node < k; ++node) {
        const size_t count = base + (node < remainder ? 1 : 0);
        part.node_indices[node].assign(perm.begin() + offset, perm.begin() + offset + count);
        offset += count;
      }
      break;
    }

    case PartitionKind::Dirichlet: {
      if (!(spec.alpha > 0.0))
        fail(ErrorKind::InvalidArgs, "partition: dirichlet alpha must be positive");
      // per class: proportions ~ Dir(alpha), samples assigned multinomially
      for (uint32_t c = 0; c < data.num_classes; ++c) {
        const auto proportions = rng.dirichlet(spec.alpha, k);
        std::vector<double> cumulative(k);
        double acc = 0.0;
        for (uint32_t node = 0; node < k; ++node) {
          acc += proportions[node];
          cumulative[node] = acc;
        }
        cumulative[k - 1] = 1.0;
        for (uint32_t i = 0; i < n; ++i) {
          if (data.labels[i] != c) continue;
          const double u = rng.uniform();
          const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
          const auto node = static_cast<uint32_t>(it - cumulative.begin());
          part.node_indices[std::min(node, k - 1)].push_back(i);
        }
      }
      // no node may end up empty: move one sample from the largest shard
      for (uint32_t node = 0; node < k; ++node) {
        if (!part.node_indices[node].empty()) continue;
        uint32_t largest = 0;
        for (uint32_t other = 1; other < k; ++other)
          if (part.node_indices[other].size() > part.node_indices[largest].size())
            largest = other;
        if (part.node_indices[largest].size() <= 1)
          fail(ErrorKind::InvalidArgs, "partition: not enough samples to cover all nodes");
        part.node_indices[node].push_back(part.node_indices[largest].back());
        part.node_indices[largest].pop_back();
        ++part.moved_for_repair;
      }
      for (auto& list : part.node_indices) std::sort(list.begin(), list.end());
      break;
    }
  }

  return part;
}

}  // namespace gdfl
