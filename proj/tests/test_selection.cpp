#include <doctest.h>

#include <algorithm>
#include <vector>

#include "gdfl/error.hpp"
#include "gdfl/rng.hpp"
#include "gdfl/selection.hpp"

using namespace gdfl;

namespace {

Topology line5() { return Topology::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}); }

}  // namespace

TEST_CASE("homogeneous intensity: everyone gets a full tally and is retained") {
  const auto t = build_topology({TopologyKind::FullyConnected}, 6, 0);
  const std::vector<double> ci(6, 120.0);
  const auto votes = cast_votes(t, ci);
  for (NodeId i = 0; i < 6; ++i) CHECK(votes[i] == 5);

  const auto sel = select_participants(t, ci);
  CHECK(sel.training_set.size() == 6);
  CHECK(sel.bridge_set.empty());
}

TEST_CASE("five-node line with CI 150/180/220/260/140") {
  const auto t = line5();
  const std::vector<double> ci{150, 180, 220, 260, 140};

  const auto sel = select_participants(t, ci);
  REQUIRE(sel.tallies.size() == 5);

  const uint32_t expected_votes[5] = {1, 1, 1, 0, 1};
  const uint32_t expected_neighbors[5] = {1, 2, 2, 2, 1};
  const bool expected_retained[5] = {true, true, true, false, true};
  for (NodeId i = 0; i < 5; ++i) {
    CHECK(sel.tallies[i].positive_votes == expected_votes[i]);
    CHECK(sel.tallies[i].neighbor_count == expected_neighbors[i]);
    CHECK(sel.tallies[i].retained == expected_retained[i]);
  }
  CHECK(sel.training_set == (std::vector<NodeId>{0, 1, 2, 4}));
  CHECK(sel.bridge_set == std::vector<NodeId>{3});
}

TEST_CASE("two nodes: the more efficient one collects the vote") {
  const auto t = build_topology({TopologyKind::Ring}, 2, 0);
  const auto votes = cast_votes(t, std::vector<double>{10.0, 20.0});
  CHECK(votes[0] == 1);
  CHECK(votes[1] == 0);
}

TEST_CASE("ring of four with strictly increasing intensity") {
  const auto t = build_topology({TopologyKind::Ring}, 4, 0);
  const std::vector<double> ci{1, 2, 3, 4};
  // all 8 directed votes enumerated by hand:
  //   votes for 0: from 1 (1<=2) and from 3 (1<=4) -> 2
  //   votes for 1: from 0 (2<=1 no), from 2 (2<=3) -> 1
  //   votes for 2: from 1 (3<=2 no), from 3 (3<=4) -> 1
  //   votes for 3: from 2 (4<=3 no), from 0 (4<=1 no) -> 0
  const auto votes = cast_votes(t, ci);
  CHECK(votes == (std::vector<uint32_t>{2, 1, 1, 0}));

  const auto sel = select_participants(t, ci);
  CHECK(sel.training_set == (std::vector<NodeId>{0, 1, 2}));
  CHECK(sel.bridge_set == std::vector<NodeId>{3});
}

TEST_CASE("missing or non-finite reports are rejected") {
  const auto t = line5();
  CHECK_THROWS_AS((void)cast_votes(t, std::vector<double>{1, 2, 3}), Error);
  try {
    (void)cast_votes(t, std::vector<double>{1, 2, 3});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingReport);
  }
  const std::vector<double> with_nan{1, 2, std::nan(""), 4, 5};
  CHECK_THROWS_AS((void)cast_votes(t, with_nan), Error);
}

TEST_CASE("vote conservation: at most one vote per directed edge") {
  Rng rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    const uint32_t k = 3 + static_cast<uint32_t>(rng.below(10));
    const auto t = build_topology({TopologyKind::ErdosRenyi, 0.6}, k, rng.next_u64());
    std::vector<double> ci(k);
    for (auto& v : ci) v = 50.0 + 400.0 * rng.uniform();

    const auto votes = cast_votes(t, ci);
    uint64_t total = 0;
    for (uint32_t v : votes) total += v;
    CHECK(total <= directed_exchanges_per_round(t));

    const std::vector<double> equal(k, 100.0);
    const auto equal_votes = cast_votes(t, equal);
    uint64_t equal_total = 0;
    for (uint32_t v : equal_votes) equal_total += v;
    CHECK(equal_total == directed_exchanges_per_round(t));
  }
}

TEST_CASE("lowering a node's intensity never hurts it") {
  Rng rng(707);
  for (int trial = 0; trial < 30; ++trial) {
    const uint32_t k = 4 + static_cast<uint32_t>(rng.below(8));
    const auto t = build_topology({TopologyKind::ErdosRenyi, 0.5}, k, rng.next_u64());
    std::vector<double> ci(k);
    for (auto& v : ci) v = 50.0 + 400.0 * rng.uniform();

    const NodeId target = static_cast<NodeId>(rng.below(k));
    const auto before = select_participants(t, ci);

    std::vector<double> lowered = ci;
    lowered[target] *= 0.5;
    const auto after = select_participants(t, lowered);

    CHECK(after.tallies[target].positive_votes >= before.tallies[target].positive_votes);
    const bool was_training =
        std::count(before.training_set.begin(), before.training_set.end(), target) > 0;
    const bool is_training =
        std::count(after.training_set.begin(), after.training_set.end(), target) > 0;
    if (was_training) CHECK(is_training);
  }
}

TEST_CASE("tallies are local: non-neighbor intensities do not matter") {
  const auto t = line5();
  const std::vector<double> ci{150, 180, 220, 260, 140};
  const auto base = select_participants(t, ci);

  // node 4 is two hops from node 2's neighborhood {1, 2, 3}
  std::vector<double> perturbed = ci;
  perturbed[4] = 9999.0;
  const auto moved = select_participants(t, perturbed);
  CHECK(moved.tallies[2].positive_votes == base.tallies[2].positive_votes);
  CHECK(moved.tallies[0].positive_votes == base.tallies[0].positive_votes);
}
