#pragma once

#include <span>
#include <vector>

#include "gdfl/topology.hpp"

namespace gdfl {

struct VoteTally {
  NodeId node = 0;
  uint32_t positive_votes = 0;
  uint32_t neighbor_count = 0;
  bool retained = false;  // positive_votes >= neighbor_count / 2
};

/// Every node votes on each of its neighbors: j earns a positive vote from i
/// iff CI_j <= CI_i (ties count positive). `ci` is indexed by NodeId and must
/// cover every node with a finite value.
std::vector<uint32_t> cast_votes(const Topology& topology, std::span<const double> ci);

struct SelectionResult {
  std::vector<NodeId> training_set;  // retained, train next round
  std::vector<NodeId> bridge_set;    // excluded, relay only
  std::vector<VoteTally> tallies;
};

SelectionResult select_participants(const Topology& topology, std::span<const double> ci);

}  // namespace gdfl
