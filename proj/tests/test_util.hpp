#pragma once

// shared builders for engine-level tests and the acceptance suite

#include <string>
#include <vector>

#include "gdfl/types.hpp"

namespace gdfl::test {

inline NodeProfile make_node(NodeId id, double grid_ci = 217.422, double renewable = 0.0,
                             MediumKind medium = MediumKind::WiredElectrical,
                             bool with_gpu = false) {
  NodeProfile node;
  node.id = id;
  node.hardware.pue = 1.0;
  node.hardware.tdp_watts = 200.0;
  node.hardware.cpu_utilization_train = 1.0;
  node.hardware.cpu_utilization_agg = 0.5;
  if (with_gpu) node.hardware.gpu = GpuProfile{70.0};
  node.region = {"ES", grid_ci, renewable};
  node.medium = ingest_medium(medium);
  node.compute_speed = 5000.0;
  node.agg_speed = 2.0e7;
  return node;
}

inline ScenarioConfig make_config(uint32_t k, uint32_t rounds = 3, uint64_t seed = 42) {
  ScenarioConfig cfg;
  for (NodeId i = 0; i < k; ++i) cfg.nodes.push_back(make_node(i));
  cfg.topology.kind = TopologyKind::FullyConnected;
  cfg.rounds = rounds;
  cfg.local_epochs = 3;
  cfg.data.classes = 4;
  cfg.data.features = 8;
  cfg.data.samples_per_node = 200;
  cfg.data.partition.kind = PartitionKind::Iid;
  cfg.model.hidden_sizes = {16};
  cfg.model.learning_rate = 0.05;
  cfg.aggregation.kind = AggregationKind::FedAvg;
  cfg.selection = SelectionKind::None;
  cfg.clock = ClockMode::Modeled;
  cfg.seed = seed;
  return cfg;
}

inline std::string scenario_path(const std::string& name) {
  return std::string(GDFL_SCENARIO_DIR) + "/" + name;
}

}  // namespace gdfl::test
