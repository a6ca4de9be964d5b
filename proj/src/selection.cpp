#include "gdfl/selection.hpp"

#include <cmath>
#include <string>

#include "gdfl/error.hpp"

namespace gdfl {

std::vector<uint32_t> cast_votes(const Topology& topology, std::span<const double> ci) {
  if (ci.size() != topology.k)
    fail(ErrorKind::MissingReport, "carbon intensity reported for " +
                                       std::to_string(ci.size()) + " of " +
                                       std::to_string(topology.k) + " nodes");
  for (size_t i = 0; i < ci.size(); ++i)
    if (!std::isfinite(ci[i]))
      fail(ErrorKind::MissingReport,
           "node " + std::to_string(i) + " reported a non-finite carbon intensity");

  std::vector<uint32_t> votes(topology.k, 0);
  for (NodeId voter = 0; voter < topology.k; ++voter)
    for (NodeId peer : topology.neighbors(voter))
      if (ci[peer] <= ci[voter]) ++votes[peer];  // ties count positive
  return votes;
}

SelectionResult select_participants(const Topology& topology, std::span<const double> ci) {
  const auto votes = cast_votes(topology, ci);

  SelectionResult result;
  result.tallies.reserve(topology.k);
  for (NodeId node = 0; node < topology.k; ++node) {
    VoteTally tally;
    tally.node = node;
    tally.positive_votes = votes[node];
    tally.neighbor_count = static_cast<uint32_t>(topology.neighbors(node).size());
    // real-valued majority: 1 of 2 neighbors is enough
    tally.retained =
        static_cast<double>(tally.positive_votes) >= static_cast<double>(tally.neighbor_count) / 2.0;
    result.tallies.push_back(tally);
    if (tally.retained)
      result.training_set.push_back(node);
    else
      result.bridge_set.push_back(node);
  }
  return result;
}

}  // namespace gdfl
