#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gdfl {

/// Node index, dense 0..k-1 within a federation.
using NodeId = uint32_t;

struct GpuProfile {
  double power_watts = 0.0;  // measured draw, not TDP

  bool operator==(const GpuProfile&) const = default;
};

struct HardwareProfile {
  double pue = 1.0;  // >= 1
  double tdp_watts = 0.0;
  std::optional<GpuProfile> gpu;
  double cpu_utilization_train = 1.0;  // in [0,1]
  double cpu_utilization_agg = 1.0;    // in [0,1]

  bool operator==(const HardwareProfile&) const = default;
};

struct RegionProfile {
  std::string name;
  double grid_carbon_intensity = 0.0;  // gCO2/kWh
  double renewable_ratio = 0.0;        // in [0,1], renewable share counts as zero-carbon

  bool operator==(const RegionProfile&) const = default;
};

enum class MediumKind { WiredElectrical, OpticalFiber, Mobile4G5G, WiFi, Custom };

struct CommMedium {
  MediumKind kind = MediumKind::WiredElectrical;
  double energy_per_byte = 0.0;  // J/byte, > 0

  bool operator==(const CommMedium&) const = default;
};

/// Built-in per-byte energy constants:
///   wired 8e-11, optical 3.52e-14, mobile 3.33e-8, wifi 5.51e-4 J/byte.
CommMedium ingest_medium(MediumKind kind);
MediumKind parse_medium_kind(const std::string& name);  // UnknownMedium on bad name
const char* medium_name(MediumKind kind);

struct NodeProfile {
  NodeId id = 0;
  HardwareProfile hardware;
  RegionProfile region;
  CommMedium medium;
  double compute_speed = 0.0;  // samples/s under the modeled clock
  double agg_speed = 0.0;      // parameter values/s under the modeled clock

  bool operator==(const NodeProfile&) const = default;
};

enum class TopologyKind { FullyConnected, ErdosRenyi, Ring };

struct TopologySpec {
  TopologyKind kind = TopologyKind::FullyConnected;
  double p = 0.5;  // ErdosRenyi edge probability, in (0,1]

  bool operator==(const TopologySpec&) const = default;
};

enum class PartitionKind { Iid, Dirichlet };

struct PartitionSpec {
  PartitionKind kind = PartitionKind::Iid;
  double alpha = 0.1;  // Dirichlet concentration, > 0

  bool operator==(const PartitionSpec&) const = default;
};

struct DataSpec {
  uint32_t classes = 2;
  uint32_t features = 2;
  uint32_t samples_per_node = 0;
  PartitionSpec partition;

  bool operator==(const DataSpec&) const = default;
};

struct ModelSpec {
  std::vector<uint32_t> hidden_sizes;
  double learning_rate = 0.05;

  bool operator==(const ModelSpec&) const = default;
};

enum class AggregationKind { FedAvg, Krum, GreenSA };

struct AggregationSpec {
  AggregationKind kind = AggregationKind::FedAvg;
  uint32_t krum_f = 0;
  // GreenSA threshold: exactly one of the two is set.
  std::optional<double> c_thresh;    // fixed gCO2 threshold, > 0
  std::optional<double> percentile;  // per-round nearest-rank percentile, in (0,100)

  bool operator==(const AggregationSpec&) const = default;
};

enum class SelectionKind { None, GreenSN };
enum class ClockMode { Modeled, Measured };

struct EarlyStoppingSpec {
  uint32_t patience = 1;
  double min_delta = 0.0;

  bool operator==(const EarlyStoppingSpec&) const = default;
};

struct ScenarioConfig {
  std::vector<NodeProfile> nodes;  // index == NodeId
  TopologySpec topology;
  uint32_t rounds = 1;
  uint32_t local_epochs = 1;
  DataSpec data;
  ModelSpec model;
  AggregationSpec aggregation;
  SelectionKind selection = SelectionKind::None;
  ClockMode clock = ClockMode::Modeled;
  std::optional<EarlyStoppingSpec> early_stopping;
  uint64_t seed = 0;

  uint32_t k() const { return static_cast<uint32_t>(nodes.size()); }

  bool operator==(const ScenarioConfig&) const = default;
};

}  // namespace gdfl
