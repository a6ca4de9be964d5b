#include "gdfl/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "gdfl/error.hpp"
#include "gdfl/ledger.hpp"
#include "gdfl/rng.hpp"

namespace gdfl {

ModeledDurations modeled_durations(const NodeProfile& profile, uint64_t samples_processed,
                                   uint64_t params_aggregated) {
  ModeledDurations d;
  d.train_s = static_cast<double>(samples_processed) / profile.compute_speed;
  d.agg_s = static_cast<double>(params_aggregated) / profile.agg_speed;
  return d;
}

bool early_stop_check(std::span<const double> loss_history, uint32_t patience,
                      double min_delta) {
  if (patience < 1) fail(ErrorKind::InvalidArgs, "early stopping patience must be >= 1");
  if (!(min_delta >= 0.0)) fail(ErrorKind::InvalidArgs, "min_delta must be >= 0");
  if (loss_history.size() < static_cast<size_t>(patience) + 1) return false;

  double best = loss_history.front();
  uint32_t stale_rounds = 0;
  for (size_t i = 1; i < loss_history.size(); ++i) {
    if (loss_history[i] < best - min_delta)
      stale_rounds = 0;
    else
      ++stale_rounds;
    best = std::min(best, loss_history[i]);
  }
  return stale_rounds >= patience;
}

namespace {

// stream tags for seed derivation
enum : uint64_t {
  kStreamTopology = 1,
  kStreamData = 2,
  kStreamSplit = 3,
  kStreamPartition = 4,
  kStreamInit = 5,
  kStreamTrain = 6,
};

struct Message {
  NodeId origin;  // node whose model this is
  NodeId from;    // link sender (origin, or a forwarding bridge)
  uint8_t hop;    // 0 = fresh broadcast, 1 = bridge forward
};

}  // namespace

struct Engine::Impl {
  ScenarioConfig cfg;
  Topology topo;
  Dataset train_data;
  Dataset test_data;
  Partition part;
  std::vector<ModelParams> models;
  std::vector<NodeId> trainers;             // for the next round to run
  std::vector<double> prev_round_emissions; // per node, gCO2 of the previous round
  std::vector<double> effective_ci;         // static per run
  uint32_t rounds_done = 0;

  explicit Impl(const ScenarioConfig& config) : cfg(config) {
    if (cfg.k() < 2) fail(ErrorKind::Config, "a federation needs at least 2 nodes");

    topo = build_topology(cfg.topology, cfg.k(), mix_seed(cfg.seed, kStreamTopology));

    if (cfg.aggregation.kind == AggregationKind::Krum) {
      for (NodeId i = 0; i < cfg.k(); ++i) {
        const size_t m = topo.neighbors(i).size() + 1;
        if (m < 2 * static_cast<size_t>(cfg.aggregation.krum_f) + 3)
          fail(ErrorKind::Config,
               "krum needs |N_i|+1 >= 2f+3 at every node; node " + std::to_string(i) +
                   " has " + std::to_string(m) + " candidates");
      }
    }

    const size_t total = static_cast<size_t>(cfg.data.samples_per_node) * cfg.k();
    const Dataset full = generate_dataset(cfg.data.classes, cfg.data.features, total,
                                          mix_seed(cfg.seed, kStreamData));
    auto split = split_dataset(full, 0.2, mix_seed(cfg.seed, kStreamSplit));
    train_data = std::move(split.train);
    test_data = std::move(split.test);

    part = partition_dataset(train_data, cfg.k(), cfg.data.partition,
                             mix_seed(cfg.seed, kStreamPartition));

    const auto shapes = mlp_shapes(cfg.data.features, cfg.model.hidden_sizes,
                                   cfg.data.classes);
    const ModelParams initial = init_params(shapes, mix_seed(cfg.seed, kStreamInit));
    models.assign(cfg.k(), initial);

    trainers.resize(cfg.k());
    std::iota(trainers.begin(), trainers.end(), NodeId{0});
    prev_round_emissions.assign(cfg.k(), 0.0);

    effective_ci.reserve(cfg.k());
    for (const auto& node : cfg.nodes)
      effective_ci.push_back(effective_carbon_intensity(node.region));
  }

  bool is_trainer(const RoundPlan& plan, NodeId node) const {
    return std::binary_search(plan.trainers.begin(), plan.trainers.end(), node);
  }

  RoundOutput run_round(const RoundPlan& plan) {
    const uint32_t round = plan.round;
    const uint32_t k = cfg.k();
    const bool measured = cfg.clock == ClockMode::Measured;

    RoundOutput out;

    // --- training ---------------------------------------------------------
    std::vector<PhaseObservation> train_obs(k);
    for (NodeId node = 0; node < k; ++node) {
      PhaseObservation obs;
      obs.node = node;
      obs.round = round;
      obs.phase = Phase::Training;
      if (is_trainer(plan, node)) {
        auto outcome = train_local(models[node], train_data, part.node_indices[node],
                                   cfg.local_epochs, cfg.model.learning_rate,
                                   mix_seed(cfg.seed, kStreamTrain, round, node));
        models[node] = std::move(outcome.params);
        obs.duration_s = measured
                             ? outcome.wall_seconds
                             : modeled_durations(cfg.nodes[node], outcome.samples_processed, 0)
                                   .train_s;
      }
      train_obs[node] = obs;
    }

    // snapshot of what each trainer broadcasts this round
    const std::vector<ModelParams> broadcast = models;

    // --- exchange ---------------------------------------------------------
    std::vector<uint64_t> bytes_sent(k, 0), bytes_recv(k, 0);
    std::vector<std::vector<Message>> inbox(k);
    std::vector<uint64_t> wire_size(k, 0);
    for (NodeId node : plan.trainers)
      wire_size[node] = serialize_model(broadcast[node]).size();

    for (NodeId node : plan.trainers)
      for (NodeId peer : topo.neighbors(node)) {
        bytes_sent[node] += wire_size[node];
        bytes_recv[peer] += wire_size[node];
        inbox[peer].push_back({node, node, 0});
      }

    // bridges forward fresh models to their other neighbors (one hop only)
    for (NodeId node = 0; node < k; ++node) {
      if (is_trainer(plan, node)) continue;
      auto received = inbox[node];
      std::sort(received.begin(), received.end(),
                [](const Message& a, const Message& b) { return a.origin < b.origin; });
      for (const auto& msg : received) {
        if (msg.hop != 0) continue;
        for (NodeId peer : topo.neighbors(node)) {
          if (peer == msg.from) continue;
          bytes_sent[node] += wire_size[msg.origin];
          bytes_recv[peer] += wire_size[msg.origin];
          inbox[peer].push_back({msg.origin, node, 1});
          out.relays.push_back({round, msg.origin, node, peer});
        }
      }
    }

    std::vector<PhaseObservation> comm_obs(k);
    for (NodeId node = 0; node < k; ++node) {
      PhaseObservation obs;
      obs.node = node;
      obs.round = round;
      obs.phase = Phase::Communication;
      obs.bytes_sent = bytes_sent[node];
      obs.bytes_recv = bytes_recv[node];
      comm_obs[node] = obs;
    }

    // --- aggregation ------------------------------------------------------
    std::vector<PhaseObservation> agg_obs(k);
    for (NodeId node = 0; node < k; ++node) {
      PhaseObservation obs;
      obs.node = node;
      obs.round = round;
      obs.phase = Phase::Aggregation;

      if (is_trainer(plan, node)) {
        // fresh candidate models, one per origin, ascending id
        std::vector<NeighborUpdate> received;
        std::vector<bool> seen(k, false);
        auto sorted = inbox[node];
        std::sort(sorted.begin(), sorted.end(),
                  [](const Message& a, const Message& b) { return a.origin < b.origin; });
        for (const auto& msg : sorted) {
          if (msg.origin == node || seen[msg.origin]) continue;
          seen[msg.origin] = true;
          NeighborUpdate u;
          u.from = msg.origin;
          u.model = broadcast[msg.origin];
          u.sample_count = part.node_indices[msg.origin].size();
          u.reported_emissions = prev_round_emissions[msg.origin];
          received.push_back(std::move(u));
        }

        NeighborUpdate own;
        own.from = node;
        own.model = broadcast[node];
        own.sample_count = part.node_indices[node].size();
        own.reported_emissions = prev_round_emissions[node];

        const size_t params = own.model.param_count();
        const auto agg_start = std::chrono::steady_clock::now();
        uint64_t work = 0;
        switch (plan.aggregation.kind) {
          case AggregationKind::FedAvg:
            models[node] = fedavg(own, received);
            work = averaging_work(received.size() + 1, params);
            break;
          case AggregationKind::Krum:
            models[node] = krum(own, received, plan.aggregation.krum_f);
            work = krum_work(received.size() + 1, params);
            break;
          case AggregationKind::GreenSA: {
            double thresh = plan.aggregation.c_thresh.value_or(0.0);
            if (plan.aggregation.percentile && !received.empty()) {
              std::vector<double> reports;
              reports.reserve(received.size());
              for (const auto& u : received) reports.push_back(u.reported_emissions);
              thresh = percentile_threshold(reports, *plan.aggregation.percentile);
            }
            auto result = green_sa(own, received, thresh);
            models[node] = std::move(result.model);
            work = averaging_work(result.selected.size() + 1, params);
            break;
          }
        }
        obs.duration_s = measured
                             ? std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - agg_start)
                                   .count()
                             : modeled_durations(cfg.nodes[node], 0, work).agg_s;
      }
      agg_obs[node] = obs;
    }

    // --- accounting, (node, round, phase) order ----------------------------
    std::vector<double> round_emissions(k, 0.0);
    for (NodeId node = 0; node < k; ++node) {
      for (const auto* obs : {&train_obs[node], &comm_obs[node], &agg_obs[node]}) {
        out.observations.push_back(*obs);
        EnergyRecord energy = energy_for(*obs, cfg.nodes[node]);
        EmissionRecord emission = emissions(energy, cfg.nodes[node].region);
        round_emissions[node] += emission.grams_co2;
        out.energy.push_back(energy);
        out.emission.push_back(emission);
      }
    }
    prev_round_emissions = round_emissions;

    // --- validation metrics over the round's trainers ----------------------
    double f1_sum = 0.0;
    double loss_sum = 0.0;
    for (NodeId node : plan.trainers) {
      const auto eval = evaluate(models[node], test_data);
      f1_sum += eval.macro_f1;
      loss_sum += eval.loss;
    }
    out.metrics.round = round;
    out.metrics.val_f1 = f1_sum / static_cast<double>(plan.trainers.size());
    out.metrics.val_loss = loss_sum / static_cast<double>(plan.trainers.size());

    // --- next round's trainers ---------------------------------------------
    if (plan.selection == SelectionKind::GreenSN) {
      auto selection = select_participants(topo, effective_ci);
      out.tallies = std::move(selection.tallies);
      out.next_trainers = std::move(selection.training_set);
    } else {
      out.next_trainers.resize(k);
      std::iota(out.next_trainers.begin(), out.next_trainers.end(), NodeId{0});
    }

    trainers = out.next_trainers;
    ++rounds_done;
    return out;
  }
};

Engine::Engine(const ScenarioConfig& config) : impl_(std::make_unique<Impl>(config)) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

const Topology& Engine::topology() const { return impl_->topo; }
const Dataset& Engine::test_split() const { return impl_->test_data; }

std::span<const uint32_t> Engine::shard(NodeId node) const {
  return impl_->part.node_indices[node];
}

const std::vector<NodeId>& Engine::current_trainers() const { return impl_->trainers; }

RoundPlan Engine::plan_for_round(uint32_t round) const {
  RoundPlan plan;
  plan.round = round;
  plan.trainers = impl_->trainers;
  plan.aggregation = impl_->cfg.aggregation;
  plan.selection = impl_->cfg.selection;
  return plan;
}

RoundOutput Engine::run_round(const RoundPlan& plan) { return impl_->run_round(plan); }

RunResult Engine::run() {
  const auto& cfg = impl_->cfg;

  RunResult result;
  result.config = cfg;
  result.topology = impl_->topo;
  result.meta.scenario_fingerprint = scenario_fingerprint(cfg);
  result.meta.er_repair_edges = impl_->topo.repair_edges_added;

  std::vector<double> loss_history;
  for (uint32_t round = 1; round <= cfg.rounds; ++round) {
    const RoundPlan plan = plan_for_round(round);
    result.trainers_per_round.push_back(plan.trainers);

    RoundOutput out = run_round(plan);
    result.observations.insert(result.observations.end(), out.observations.begin(),
                               out.observations.end());
    result.energy.insert(result.energy.end(), out.energy.begin(), out.energy.end());
    result.emission.insert(result.emission.end(), out.emission.begin(), out.emission.end());
    result.metrics.push_back(out.metrics);
    result.tallies.push_back(std::move(out.tallies));
    result.relay_log.insert(result.relay_log.end(), out.relays.begin(), out.relays.end());

    result.meta.rounds_executed = round;
    loss_history.push_back(out.metrics.val_loss);
    if (cfg.early_stopping &&
        early_stop_check(loss_history, cfg.early_stopping->patience,
                         cfg.early_stopping->min_delta)) {
      result.meta.stopped_early = true;
      break;
    }
  }

  result.final_models = impl_->models;

  auto& flags = result.meta.decision_flags;
  flags.emplace_back("greensa_weights", "sample_count_renormalized");
  flags.emplace_back("greensa_emission_report", "previous_round_total");
  flags.emplace_back("greensn_vote_tie", "positive");
  flags.emplace_back("greensn_bridge_aggregates", "false");
  flags.emplace_back("greensn_stale_models_excluded", "true");
  flags.emplace_back("greensn_relay", "flood_depth_1");
  flags.emplace_back("validation_metric_nodes", "round_trainers");
  flags.emplace_back("beta_source", "profile_constant");
  flags.emplace_back("clock", cfg.clock == ClockMode::Measured ? "measured" : "modeled");
  flags.emplace_back("learning_rate", format_double(cfg.model.learning_rate));
  if (cfg.topology.kind == TopologyKind::ErdosRenyi)
    flags.emplace_back("er_repair_chain_edges",
                       std::to_string(impl_->topo.repair_edges_added));
  if (cfg.aggregation.kind == AggregationKind::GreenSA && cfg.aggregation.percentile)
    flags.emplace_back("greensa_percentile_scope", "per_node_received_reports");
  if (cfg.selection == SelectionKind::GreenSN &&
      cfg.aggregation.kind == AggregationKind::GreenSA)
    flags.emplace_back("sa_sn_combination", "experimental");

  const RunLedger ledger = build_ledger(result);
  result.meta.content_digest = ledger.content_digest;
  return result;
}

RunResult run_scenario(const ScenarioConfig& config) { return Engine(config).run(); }

}  // namespace gdfl
