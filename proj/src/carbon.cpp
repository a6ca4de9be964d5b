#include "gdfl/carbon.hpp"

#include <algorithm>
#include <numeric>

namespace gdfl {

double effective_carbon_intensity(const RegionProfile& region) {
  return region.grid_carbon_intensity * (1.0 - region.renewable_ratio);
}

EmissionRecord emissions(const EnergyRecord& record, const RegionProfile& region) {
  EmissionRecord e;
  e.node = record.node;
  e.round = record.round;
  e.phase = record.phase;
  e.effective_ci = effective_carbon_intensity(region);
  e.grams_co2 = (record.total_joules / kJoulesPerKwh) * e.effective_ci;
  return e;
}

EmissionTotals total_emissions(std::span<const EmissionRecord> records, uint32_t k) {
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto& ra = records[a];
    const auto& rb = records[b];
    if (ra.node != rb.node) return ra.node < rb.node;
    if (ra.round != rb.round) return ra.round < rb.round;
    return ra.phase < rb.phase;
  });

  EmissionTotals t;
  t.per_node.assign(k, 0.0);
  for (size_t i : order) {
    const auto& rec = records[i];
    t.per_node[rec.node] += rec.grams_co2;
    t.per_phase[static_cast<size_t>(rec.phase)] += rec.grams_co2;
    t.total += rec.grams_co2;
  }
  return t;
}

}  // namespace gdfl
