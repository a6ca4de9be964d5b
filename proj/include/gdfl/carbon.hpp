#pragma once

#include <array>
#include <span>
#include <vector>

#include "gdfl/energy.hpp"

namespace gdfl {

struct EmissionRecord {
  NodeId node = 0;
  uint32_t round = 0;
  Phase phase = Phase::Training;
  double grams_co2 = 0.0;
  double effective_ci = 0.0;  // gCO2/kWh applied to this record
};

/// grid intensity * (1 - renewable ratio); the renewable share counts as zero.
double effective_carbon_intensity(const RegionProfile& region);

/// grams = (total joules / 3.6e6) * effective intensity.
EmissionRecord emissions(const EnergyRecord& record, const RegionProfile& region);

struct EmissionTotals {
  std::vector<double> per_node;          // indexed by NodeId
  std::array<double, 3> per_phase{};     // indexed by Phase
  double total = 0.0;
};

/// Deterministic (node, round, phase) fold, same convention as total_energy.
EmissionTotals total_emissions(std::span<const EmissionRecord> records, uint32_t k);

}  // namespace gdfl
