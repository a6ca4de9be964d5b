#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gdfl/types.hpp"

namespace gdfl {

/// Immutable undirected neighbor map. Adjacency lists are sorted ascending so
/// every downstream iteration order is deterministic.
struct Topology {
  uint32_t k = 0;
  TopologyKind kind = TopologyKind::FullyConnected;
  std::vector<std::vector<NodeId>> adjacency;
  uint32_t repair_edges_added = 0;  // chain edges added to reconnect an ER sample

  uint64_t edge_count() const;
  const std::vector<NodeId>& neighbors(NodeId id) const { return adjacency[id]; }
  bool adjacent(NodeId a, NodeId b) const;

  /// Build from an explicit edge list (test/report helper). Validates no
  /// self-loops and symmetrizes.
  static Topology from_edges(uint32_t k, const std::vector<std::pair<NodeId, NodeId>>& edges,
                             TopologyKind kind = TopologyKind::ErdosRenyi);
};

/// FullyConnected: every pair adjacent. Ring: i ~ (i+-1) mod k. ErdosRenyi:
/// each unordered pair kept with probability p; disconnected samples are
/// repaired by adding the minimal set of chain edges (i, i+1), recorded in
/// repair_edges_added.
Topology build_topology(const TopologySpec& spec, uint32_t k, uint64_t seed);

/// 2 x edge_count: each edge carries one model in each direction per round.
uint64_t directed_exchanges_per_round(const Topology& t);

}  // namespace gdfl
