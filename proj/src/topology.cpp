#include "gdfl/topology.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gdfl/error.hpp"
#include "gdfl/rng.hpp"

namespace gdfl {

namespace {

// union-find over node ids
class DisjointSet {
 public:
  explicit DisjointSet(uint32_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }
  uint32_t find(uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<uint32_t> parent_;
};

void sort_adjacency(Topology& t) {
  for (auto& list : t.adjacency) std::sort(list.begin(), list.end());
}

}  // namespace

uint64_t Topology::edge_count() const {
  uint64_t degree_sum = 0;
  for (const auto& list : adjacency) degree_sum += list.size();
  return degree_sum / 2;
}

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto& list = adjacency[a];
  return std::binary_search(list.begin(), list.end(), b);
}

Topology Topology::from_edges(uint32_t k, const std::vector<std::pair<NodeId, NodeId>>& edges,
                              TopologyKind kind) {
  if (k < 2) fail(ErrorKind::InvalidSpec, "topology requires at least 2 nodes");
  Topology t;
  t.k = k;
  t.kind = kind;
  t.adjacency.assign(k, {});
  for (const auto& [a, b] : edges) {
    if (a == b) fail(ErrorKind::InvalidSpec, "self-loop edge rejected");
    if (a >= k || b >= k) fail(ErrorKind::InvalidSpec, "edge endpoint out of range");
    if (!std::count(t.adjacency[a].begin(), t.adjacency[a].end(), b)) {
      t.adjacency[a].push_back(b);
      t.adjacency[b].push_back(a);
    }
  }
  sort_adjacency(t);
  return t;
}

Topology build_topology(const TopologySpec& spec, uint32_t k, uint64_t seed) {
  if (k < 2) fail(ErrorKind::InvalidSpec, "topology requires at least 2 nodes");

  Topology t;
  t.k = k;
  t.kind = spec.kind;
  t.adjacency.assign(k, {});

  switch (spec.kind) {
    case TopologyKind::FullyConnected:
      for (NodeId i = 0; i < k; ++i)
        for (NodeId j = i + 1; j < k; ++j) {
          t.adjacency[i].push_back(j);
          t.adjacency[j].push_back(i);
        }
      break;

    case TopologyKind::Ring:
      if (k == 2) {
        t.adjacency[0].push_back(1);
        t.adjacency[1].push_back(0);
      } else {
        for (NodeId i = 0; i < k; ++i) {
          const NodeId next = (i + 1) % k;
          t.adjacency[i].push_back(next);
          t.adjacency[next].push_back(i);
        }
      }
      break;

    case TopologyKind::ErdosRenyi: {
      if (!(spec.p > 0.0) || spec.p > 1.0)
        fail(ErrorKind::InvalidSpec, "erdos_renyi p must be in (0, 1], got " +
                                         std::to_string(spec.p));
      Rng rng(mix_seed(seed, 0x7067u));
      DisjointSet components(k);
      for (NodeId i = 0; i < k; ++i)
        for (NodeId j = i + 1; j < k; ++j)
          if (rng.uniform() < spec.p) {
            t.adjacency[i].push_back(j);
            t.adjacency[j].push_back(i);
            components.unite(i, j);
          }
      // reconnect a disconnected sample with chain edges (i, i+1), lowest first
      for (NodeId i = 0; i + 1 < k; ++i)
        if (components.find(i) != components.find(i + 1)) {
          components.unite(i, i + 1);
          t.adjacency[i].push_back(i + 1);
          t.adjacency[i + 1].push_back(i);
          ++t.repair_edges_added;
        }
      break;
    }
  }

  sort_adjacency(t);
  return t;
}

uint64_t directed_exchanges_per_round(const Topology& t) { return 2 * t.edge_count(); }

}  // namespace gdfl
