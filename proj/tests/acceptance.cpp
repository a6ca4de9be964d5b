// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits non-zero if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "gdfl/config.hpp"
#include "gdfl/engine.hpp"
#include "gdfl/error.hpp"
#include "gdfl/ledger.hpp"
#include "gdfl/rng.hpp"
#include "test_util.hpp"

using namespace gdfl;
using gdfl::test::make_config;
using gdfl::test::make_node;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void require(bool condition, const std::string& what) {
  if (!condition) throw std::runtime_error(what);
}

void criterion(int number, const std::string& title, const std::function<void()>& body) {
  try {
    g_notes.clear();
    body();
    std::printf("[PASS] %2d. %s\n", number, title.c_str());
  } catch (const std::exception& e) {
    ++g_failures;
    std::printf("[FAIL] %2d. %s\n        %s\n", number, title.c_str(), e.what());
  }
  for (const auto& note : g_notes) std::printf("        %s\n", note.c_str());
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

ScenarioConfig replica_config() {
  return load_scenario(gdfl::test::scenario_path("paper_10node_fc.json"));
}

struct CommRow {
  NodeId node;
  uint32_t round;
  uint64_t bytes_sent;
  uint64_t bytes_recv;
};

std::vector<CommRow> comm_rows(const RunResult& result) {
  std::vector<CommRow> rows;
  for (const auto& obs : result.observations)
    if (obs.phase == Phase::Communication)
      rows.push_back({obs.node, obs.round, obs.bytes_sent, obs.bytes_recv});
  std::sort(rows.begin(), rows.end(), [](const CommRow& a, const CommRow& b) {
    if (a.node != b.node) return a.node < b.node;
    return a.round < b.round;
  });
  return rows;
}

// ---------------------------------------------------------------------------

void criterion_1_medium_constants() {
  const struct {
    MediumKind kind;
    double e_byte;
  } media[] = {{MediumKind::WiredElectrical, 8.0e-11},
               {MediumKind::OpticalFiber, 3.52e-14},
               {MediumKind::Mobile4G5G, 3.33e-8},
               {MediumKind::WiFi, 5.51e-4}};

  std::vector<std::vector<CommRow>> rows_per_medium;
  std::vector<double> comm_joules;
  for (const auto& medium : media) {
    auto cfg = replica_config();
    for (auto& node : cfg.nodes) node.medium = ingest_medium(medium.kind);
    const auto result = run_scenario(cfg);
    rows_per_medium.push_back(comm_rows(result));
    comm_joules.push_back(total_energy(result.energy).comm_joules);
  }

  // identical integer byte streams across all four runs
  for (size_t m = 1; m < 4; ++m) {
    require(rows_per_medium[m].size() == rows_per_medium[0].size(),
            "row count differs across media");
    for (size_t i = 0; i < rows_per_medium[0].size(); ++i) {
      require(rows_per_medium[m][i].bytes_sent == rows_per_medium[0][i].bytes_sent &&
                  rows_per_medium[m][i].bytes_recv == rows_per_medium[0][i].bytes_recv,
              "byte counts differ across media");
    }
  }

  // energy is the byte stream folded against E_byte: bit-exact, tolerance zero
  for (size_t m = 0; m < 4; ++m) {
    double expected = 0.0;
    for (const auto& row : rows_per_medium[m])
      expected += static_cast<double>(row.bytes_sent + row.bytes_recv) * media[m].e_byte;
    require(comm_joules[m] == expected,
            "comm energy is not exactly linear in the per-byte constant");
  }

  for (size_t m = 1; m < 4; ++m) {
    const double measured = comm_joules[m] / comm_joules[0];
    const double expected = media[m].e_byte / media[0].e_byte;
    require(rel_diff(measured, expected) < 1e-12, "cross-medium ratio off");
  }
  char note[160];
  std::snprintf(note, sizeof note,
                "wired:optical:mobile:wifi = %.6g : %.6g : %.6g : %.6g J", comm_joules[0],
                comm_joules[1], comm_joules[2], comm_joules[3]);
  g_notes.emplace_back(note);
}

void criterion_2_exchange_counts() {
  const auto fc = build_topology({TopologyKind::FullyConnected}, 10, 1);
  require(directed_exchanges_per_round(fc) == 90, "fully connected k=10 must give 90");

  const auto ring = build_topology({TopologyKind::Ring}, 10, 1);
  require(directed_exchanges_per_round(ring) == 20, "ring k=10 must give 20");

  double sum = 0.0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s)
    sum += static_cast<double>(
        directed_exchanges_per_round(build_topology({TopologyKind::ErdosRenyi, 0.5}, 10, s)));
  const double mean = sum / seeds;
  require(std::abs(mean - 45.0) <= 4.5, "ER mean exchange count outside 10% of 45");
  char note[80];
  std::snprintf(note, sizeof note, "ER mean over %d seeds: %.2f", seeds, mean);
  g_notes.emplace_back(note);
}

void criterion_3_geography() {
  auto es_cfg = replica_config();
  auto ch_cfg = es_cfg;
  for (auto& node : ch_cfg.nodes) node.region = {"CH", 41.279, 0.0};

  const auto es = run_scenario(es_cfg);
  const auto ch = run_scenario(ch_cfg);

  require(es.energy.size() == ch.energy.size(), "energy ledgers differ in size");
  for (size_t i = 0; i < es.energy.size(); ++i) {
    const auto& a = es.energy[i];
    const auto& b = ch.energy[i];
    require(a.node == b.node && a.round == b.round && a.phase == b.phase &&
                a.cpu_joules == b.cpu_joules && a.gpu_joules == b.gpu_joules &&
                a.comm_joules == b.comm_joules && a.total_joules == b.total_joules,
            "energy ledgers are not bit-identical across regions");
  }

  const double total_es = total_emissions(es.emission, 10).total;
  const double total_ch = total_emissions(ch.emission, 10).total;
  const double ratio = total_ch / total_es;
  require(rel_diff(ratio, 41.279 / 217.422) <= 1e-9, "emission ratio off CH/ES intensity");
  char note[80];
  std::snprintf(note, sizeof note, "CH/ES emission ratio %.9f", ratio);
  g_notes.emplace_back(note);
}

void criterion_4_renewable_ratio() {
  auto base_cfg = replica_config();
  auto green_cfg = base_cfg;
  for (auto& node : green_cfg.nodes) node.region.renewable_ratio = 0.5;

  const auto base = run_scenario(base_cfg);
  const auto green = run_scenario(green_cfg);

  const auto base_energy = total_energy(base.energy);
  const auto green_energy = total_energy(green.energy);
  require(base_energy.total_kwh == green_energy.total_kwh,
          "energy must not depend on the renewable ratio");

  const double base_total = total_emissions(base.emission, 10).total;
  const double green_total = total_emissions(green.emission, 10).total;
  require(rel_diff(green_total, 0.5 * base_total) <= 1e-12,
          "renewable ratio 0.5 must halve emissions exactly");
}

void criterion_5_sn_worked_example() {
  const auto line = Topology::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const std::vector<double> ci{150, 180, 220, 260, 140};
  const auto sel = select_participants(line, ci);

  const uint32_t votes[5] = {1, 1, 1, 0, 1};
  const uint32_t neighbors[5] = {1, 2, 2, 2, 1};
  for (NodeId i = 0; i < 5; ++i) {
    require(sel.tallies[i].positive_votes == votes[i], "vote tally mismatch");
    require(sel.tallies[i].neighbor_count == neighbors[i], "neighbor count mismatch");
  }
  require(sel.training_set == (std::vector<NodeId>{0, 1, 2, 4}),
          "training set must be {A,B,C,E}");
  require(sel.bridge_set == std::vector<NodeId>{3}, "bridge set must be {D}");
}

void criterion_6_krum_oracle() {
  Rng rng(8080);
  auto random_model = [&rng]() {
    ModelParams m;
    m.layer_shapes = {{3, 2, 2}};
    m.values.resize(8);
    for (auto& v : m.values) v = static_cast<float>(rng.uniform(-2.0, 2.0));
    return m;
  };

  int agreements = 0;
  const int cases = 500;
  for (int trial = 0; trial < cases; ++trial) {
    const size_t m = 3 + rng.below(5);
    const uint32_t max_f = static_cast<uint32_t>((m - 3) / 2);
    const uint32_t f = max_f == 0 ? 0 : static_cast<uint32_t>(rng.below(max_f + 1));

    std::vector<NeighborUpdate> all;
    for (size_t i = 0; i < m; ++i)
      all.push_back({static_cast<NodeId>(i), random_model(), 1 + rng.below(50), 0.0});

    // exhaustive scorer, written independently of the library implementation
    size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < m; ++i) {
      std::vector<double> dists;
      for (size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        double d2 = 0.0;
        for (size_t v = 0; v < 8; ++v) {
          const double diff = static_cast<double>(all[i].model.values[v]) -
                              static_cast<double>(all[j].model.values[v]);
          d2 += diff * diff;
        }
        dists.push_back(d2);
      }
      std::sort(dists.begin(), dists.end());
      double score = 0.0;
      for (size_t j = 0; j < m - f - 2; ++j) score += dists[j];
      if (score < best_score) {
        best_score = score;
        best = i;
      }
    }

    const std::vector<NeighborUpdate> received(all.begin() + 1, all.end());
    const auto chosen = krum(all.front(), received, f);
    if (chosen == all[best].model) ++agreements;
  }
  require(agreements == cases, "krum disagreed with the exhaustive scorer");
  char note[64];
  std::snprintf(note, sizeof note, "%d/%d agreement", agreements, cases);
  g_notes.emplace_back(note);
}

void criterion_7_training_dominance() {
  const auto result = run_scenario(replica_config());
  for (uint32_t round = 1; round <= result.meta.rounds_executed; ++round) {
    double train = 0.0, comm = 0.0, agg = 0.0;
    for (const auto& rec : result.energy) {
      if (rec.round != round) continue;
      switch (rec.phase) {
        case Phase::Training: train += rec.total_joules; break;
        case Phase::Communication: comm += rec.total_joules; break;
        case Phase::Aggregation: agg += rec.total_joules; break;
      }
    }
    require(train > 100.0 * comm, "training must exceed communication by 100x");
    require(train > agg, "training must exceed aggregation");
  }
}

void criterion_8_federation_scaling() {
  std::vector<double> per_node;
  for (uint32_t k : {5u, 10u, 15u, 20u}) {
    const auto result = run_scenario(make_config(k, 20, 42));
    per_node.push_back(total_energy(result.energy).train_joules / k);
  }
  for (size_t i = 1; i < per_node.size(); ++i)
    require(rel_diff(per_node[i], per_node[0]) <= 1e-9,
            "training energy must scale linearly with K");
  char note[96];
  std::snprintf(note, sizeof note, "train J per node at K=5..20: %.6f / %.6f / %.6f / %.6f",
                per_node[0], per_node[1], per_node[2], per_node[3]);
  g_notes.emplace_back(note);
}

void criterion_9_aggregation_cost_order() {
  auto base = make_config(10, 20, 42);
  for (NodeId i = 0; i < 10; ++i)
    base.nodes[i].region.grid_carbon_intensity = 100.0 + 60.0 * i;

  auto sa_cfg = base;
  sa_cfg.aggregation.kind = AggregationKind::GreenSA;
  sa_cfg.aggregation.percentile = 75.0;
  auto krum_cfg = base;
  krum_cfg.aggregation.kind = AggregationKind::Krum;
  krum_cfg.aggregation.krum_f = 1;

  const double fedavg_agg = total_energy(run_scenario(base).energy).agg_joules;
  const double sa_agg = total_energy(run_scenario(sa_cfg).energy).agg_joules;
  const double krum_agg = total_energy(run_scenario(krum_cfg).energy).agg_joules;

  require(sa_agg <= fedavg_agg, "green_sa aggregation energy must not exceed fedavg");
  require(fedavg_agg < krum_agg, "krum aggregation energy must exceed fedavg");
  char note[96];
  std::snprintf(note, sizeof note, "agg J: green_sa %.4f <= fedavg %.4f < krum %.4f", sa_agg,
                fedavg_agg, krum_agg);
  g_notes.emplace_back(note);
}

void criterion_10_model_quality() {
  double fed_sum = 0.0, sa_sum = 0.0, sn_sum = 0.0;
  const int seeds = 5;
  for (int s = 0; s < seeds; ++s) {
    const uint64_t seed = 100 + s;
    auto fed_cfg = make_config(10, 20, seed);

    auto sa_cfg = fed_cfg;
    sa_cfg.aggregation.kind = AggregationKind::GreenSA;
    sa_cfg.aggregation.percentile = 75.0;

    auto sn_cfg = fed_cfg;
    sn_cfg.selection = SelectionKind::GreenSN;
    for (NodeId i = 7; i < 10; ++i)
      sn_cfg.nodes[i].region.grid_carbon_intensity = 650.0;  // these become bridges

    fed_sum += run_scenario(fed_cfg).metrics.back().val_f1;
    sa_sum += run_scenario(sa_cfg).metrics.back().val_f1;
    sn_sum += run_scenario(sn_cfg).metrics.back().val_f1;
  }
  const double fed = fed_sum / seeds;
  const double sa = sa_sum / seeds;
  const double sn = sn_sum / seeds;
  require(std::abs(sa - fed) <= 0.05, "green_sa final F1 degraded beyond 0.05");
  require(std::abs(sn - fed) <= 0.05, "green_sn final F1 degraded beyond 0.05");
  char note[96];
  std::snprintf(note, sizeof note, "mean F1 over %d seeds: fedavg %.4f, sa %.4f, sn %.4f",
                seeds, fed, sa, sn);
  g_notes.emplace_back(note);
}

void criterion_11_early_stopping() {
  const auto cfg = load_scenario(gdfl::test::scenario_path("early_stop_5node.json"));
  auto full_cfg = cfg;
  full_cfg.early_stopping.reset();

  const auto stopped = run_scenario(cfg);
  const auto full = run_scenario(full_cfg);

  require(stopped.meta.stopped_early, "scenario must trigger early stopping");
  require(full.meta.rounds_executed == 20, "baseline must run all 20 rounds");

  const double early_energy = total_energy(stopped.energy).total_kwh;
  const double full_energy = total_energy(full.energy).total_kwh;
  const double reduction = 1.0 - early_energy / full_energy;
  require(reduction >= 0.40, "early stopping must cut at least 40% of the energy");

  const double f1_drop = full.metrics.back().val_f1 - stopped.metrics.back().val_f1;
  require(std::abs(f1_drop) < 0.02, "early stopping must not cost 0.02 F1");
  char note[120];
  std::snprintf(note, sizeof note,
                "stopped at round %u/20, energy reduction %.1f%%, F1 drop %.4f",
                stopped.meta.rounds_executed, 100.0 * reduction, f1_drop);
  g_notes.emplace_back(note);
}

void criterion_12_accounting_identities() {
  const auto result = run_scenario(replica_config());

  // phase decomposition
  const auto totals = total_energy(result.energy);
  const double phase_sum = totals.train_kwh + totals.comm_kwh + totals.agg_kwh;
  require(rel_diff(totals.total_kwh, phase_sum) <= 1e-12, "phase decomposition violated");
  double naive = 0.0;
  for (const auto& rec : result.energy) naive += rec.total_joules;
  require(rel_diff(totals.total_kwh, naive / kJoulesPerKwh) <= 1e-12,
          "fold disagrees with the naive total");

  // node-sum decomposition of emissions
  const auto emissions_totals = total_emissions(result.emission, 10);
  double node_sum = 0.0;
  for (double g : emissions_totals.per_node) node_sum += g;
  require(rel_diff(emissions_totals.total, node_sum) <= 1e-12,
          "node-sum decomposition violated");

  // gradient finite differences, rel err < 1e-3
  Rng rng(4242);
  for (int trial = 0; trial < 5; ++trial) {
    const auto data = generate_dataset(3, 4, 10, rng.next_u64());
    const auto params = init_params(mlp_shapes(4, {5}, 3), rng.next_u64());
    std::vector<uint32_t> batch(data.size());
    std::iota(batch.begin(), batch.end(), 0u);

    std::vector<double> analytic;
    batch_gradient(params, data, batch, analytic);

    ModelParams probe = params;
    for (size_t i = 0; i < params.values.size(); ++i) {
      const double x = static_cast<double>(params.values[i]);
      const double h = 1e-5;
      const auto hi = static_cast<float>(x + h);
      const auto lo = static_cast<float>(x - h);
      auto loss_at = [&](float value) {
        probe.values[i] = value;
        double total = 0.0;
        for (uint32_t idx : batch) total += sample_loss(probe, data.row(idx), data.labels[idx]);
        return total / static_cast<double>(batch.size());
      };
      const double fd = (loss_at(hi) - loss_at(lo)) /
                        (static_cast<double>(hi) - static_cast<double>(lo));
      probe.values[i] = params.values[i];
      const double scale = std::max({std::abs(analytic[i]), std::abs(fd), 1e-4});
      require(std::abs(analytic[i] - fd) / scale < 1e-3, "gradient check failed");
    }
  }

  // determinism
  const auto again = run_scenario(replica_config());
  require(result.meta.content_digest == again.meta.content_digest,
          "same config and seed must give the same ledger fingerprint");
  g_notes.emplace_back("ledger digest " + result.meta.content_digest);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n----------------\n");
  criterion(1, "communication energy in exact Table-of-media ratios (tolerance 0)",
            criterion_1_medium_constants);
  criterion(2, "directed exchange counts: FC 90, ring 20, ER within 10% of 45",
            criterion_2_exchange_counts);
  criterion(3, "geography changes emissions only; ratio = CI ratio to 1e-9",
            criterion_3_geography);
  criterion(4, "renewable ratio 0.5 halves emissions exactly, energy unchanged",
            criterion_4_renewable_ratio);
  criterion(5, "voting worked example: tallies 1/1,1/2,1/2,0/2,1/1, set {A,B,C,E}",
            criterion_5_sn_worked_example);
  criterion(6, "krum equals the exhaustive scorer on 500 cases (m <= 7)",
            criterion_6_krum_oracle);
  criterion(7, "training dominates: > 100x communication and > aggregation, every round",
            criterion_7_training_dominance);
  criterion(8, "training energy proportional to federation size within 1e-9",
            criterion_8_federation_scaling);
  criterion(9, "aggregation energy ordering: green_sa <= fedavg < krum",
            criterion_9_aggregation_cost_order);
  criterion(10, "green_sa / green_sn final F1 within 0.05 of fedavg over 5 seeds",
            criterion_10_model_quality);
  criterion(11, "early stopping saves >= 40% energy at < 0.02 F1 cost",
            criterion_11_early_stopping);
  criterion(12, "accounting identities, gradient suite, ledger determinism",
            criterion_12_accounting_identities);

  if (g_failures == 0)
    std::printf("----------------\nall criteria passed\n");
  else
    std::printf("----------------\n%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
