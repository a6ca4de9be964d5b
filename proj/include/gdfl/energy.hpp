#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gdfl/types.hpp"

namespace gdfl {

enum class Phase : uint8_t { Training = 0, Communication = 1, Aggregation = 2 };

const char* phase_name(Phase phase);
Phase parse_phase(const std::string& name);

/// One (node, round, phase) measurement. Byte counts are zero outside the
/// communication phase; zero durations mark skipped phases.
struct PhaseObservation {
  NodeId node = 0;
  uint32_t round = 0;
  Phase phase = Phase::Training;
  double duration_s = 0.0;
  uint64_t bytes_sent = 0;
  uint64_t bytes_recv = 0;
};

constexpr double kJoulesPerKwh = 3.6e6;

struct CpuGpuJoules {
  double cpu_joules = 0.0;
  double gpu_joules = 0.0;
};

/// cpu = PUE * TDP * util_train * T; gpu = declared draw * T when present.
CpuGpuJoules training_energy(const HardwareProfile& hw, double duration_s);

/// Same formula with the aggregation utilization.
CpuGpuJoules aggregation_energy(const HardwareProfile& hw, double duration_s);

/// (sent + received bytes) * energy per byte.
double communication_energy(const CommMedium& medium, uint64_t bytes_sent,
                            uint64_t bytes_recv);

struct EnergyRecord {
  NodeId node = 0;
  uint32_t round = 0;
  Phase phase = Phase::Training;
  double cpu_joules = 0.0;
  double gpu_joules = 0.0;
  double comm_joules = 0.0;
  double total_joules = 0.0;  // exact component sum
};

EnergyRecord energy_for(const PhaseObservation& obs, const NodeProfile& profile);

struct EnergyTotals {
  double train_joules = 0.0;
  double comm_joules = 0.0;
  double agg_joules = 0.0;
  double train_kwh = 0.0;
  double comm_kwh = 0.0;
  double agg_kwh = 0.0;
  double total_kwh = 0.0;  // sum of the three phase totals
};

/// Folds in fixed (node, round, phase) order for deterministic reports.
EnergyTotals total_energy(std::span<const EnergyRecord> records);

}  // namespace gdfl
