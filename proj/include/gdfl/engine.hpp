#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gdfl/aggregation.hpp"
#include "gdfl/carbon.hpp"
#include "gdfl/config.hpp"
#include "gdfl/dataset.hpp"
#include "gdfl/energy.hpp"
#include "gdfl/model.hpp"
#include "gdfl/selection.hpp"
#include "gdfl/topology.hpp"

namespace gdfl {

struct RoundPlan {
  uint32_t round = 1;
  std::vector<NodeId> trainers;  // nodes that run local training this round
  AggregationSpec aggregation;
  SelectionKind selection = SelectionKind::None;
};

struct ModeledDurations {
  double train_s = 0.0;
  double agg_s = 0.0;
};

/// Deterministic phase durations from declared throughput.
ModeledDurations modeled_durations(const NodeProfile& profile, uint64_t samples_processed,
                                   uint64_t params_aggregated);

/// True when the best (minimum) validation loss has not improved by more than
/// min_delta for the last `patience` consecutive rounds.
bool early_stop_check(std::span<const double> loss_history, uint32_t patience,
                      double min_delta);

struct RoundMetrics {
  uint32_t round = 0;
  double val_f1 = 0.0;   // mean over the round's trainers, held-out split
  double val_loss = 0.0;
};

struct RelayEvent {
  uint32_t round = 0;
  NodeId origin = 0;  // node whose model was forwarded
  NodeId via = 0;     // bridge that forwarded it
  NodeId to = 0;
};

struct RoundOutput {
  std::vector<PhaseObservation> observations;  // 3 per node
  std::vector<EnergyRecord> energy;
  std::vector<EmissionRecord> emission;
  RoundMetrics metrics;
  std::vector<VoteTally> tallies;       // GreenSN only
  std::vector<RelayEvent> relays;
  std::vector<NodeId> next_trainers;
};

struct RunMetadata {
  std::string scenario_fingerprint;
  std::string content_digest;  // over ledger rows + round metrics
  uint32_t rounds_executed = 0;
  bool stopped_early = false;
  uint32_t er_repair_edges = 0;
  std::vector<std::pair<std::string, std::string>> decision_flags;
};

struct RunResult {
  ScenarioConfig config;
  Topology topology;
  std::vector<PhaseObservation> observations;
  std::vector<EnergyRecord> energy;
  std::vector<EmissionRecord> emission;
  std::vector<RoundMetrics> metrics;
  std::vector<std::vector<VoteTally>> tallies;          // per executed round
  std::vector<std::vector<NodeId>> trainers_per_round;  // per executed round
  std::vector<RelayEvent> relay_log;
  std::vector<ModelParams> final_models;
  RunMetadata meta;
};

/// Drives the per-round lifecycle: local training, neighbor exchange,
/// aggregation, accounting, optional voting for the next round's trainers.
class Engine {
 public:
  explicit Engine(const ScenarioConfig& config);
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  const Topology& topology() const;
  const Dataset& test_split() const;
  std::span<const uint32_t> shard(NodeId node) const;
  const std::vector<NodeId>& current_trainers() const;

  RoundPlan plan_for_round(uint32_t round) const;
  RoundOutput run_round(const RoundPlan& plan);

  /// Full loop with early stopping; equivalent to run_scenario.
  RunResult run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult run_scenario(const ScenarioConfig& config);

}  // namespace gdfl
