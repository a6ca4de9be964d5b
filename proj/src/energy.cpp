#include "gdfl/energy.hpp"

#include <algorithm>
#include <numeric>

#include "gdfl/error.hpp"

namespace gdfl {

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::Training: return "training";
    case Phase::Communication: return "communication";
    case Phase::Aggregation: return "aggregation";
  }
  return "unknown";
}

Phase parse_phase(const std::string& name) {
  if (name == "training") return Phase::Training;
  if (name == "communication") return Phase::Communication;
  if (name == "aggregation") return Phase::Aggregation;
  fail(ErrorKind::Parse, "unknown phase: " + name);
}

CpuGpuJoules training_energy(const HardwareProfile& hw, double duration_s) {
  CpuGpuJoules e;
  e.cpu_joules = hw.pue * hw.tdp_watts * hw.cpu_utilization_train * duration_s;
  e.gpu_joules = hw.gpu ? hw.gpu->power_watts * duration_s : 0.0;
  return e;
}

CpuGpuJoules aggregation_energy(const HardwareProfile& hw, double duration_s) {
  CpuGpuJoules e;
  e.cpu_joules = hw.pue * hw.tdp_watts * hw.cpu_utilization_agg * duration_s;
  e.gpu_joules = hw.gpu ? hw.gpu->power_watts * duration_s : 0.0;
  return e;
}

double communication_energy(const CommMedium& medium, uint64_t bytes_sent,
                            uint64_t bytes_recv) {
  return static_cast<double>(bytes_sent + bytes_recv) * medium.energy_per_byte;
}

EnergyRecord energy_for(const PhaseObservation& obs, const NodeProfile& profile) {
  EnergyRecord rec;
  rec.node = obs.node;
  rec.round = obs.round;
  rec.phase = obs.phase;
  switch (obs.phase) {
    case Phase::Training: {
      const auto e = training_energy(profile.hardware, obs.duration_s);
      rec.cpu_joules = e.cpu_joules;
      rec.gpu_joules = e.gpu_joules;
      break;
    }
    case Phase::Aggregation: {
      const auto e = aggregation_energy(profile.hardware, obs.duration_s);
      rec.cpu_joules = e.cpu_joules;
      rec.gpu_joules = e.gpu_joules;
      break;
    }
    case Phase::Communication:
      rec.comm_joules = communication_energy(profile.medium, obs.bytes_sent, obs.bytes_recv);
      break;
  }
  rec.total_joules = rec.cpu_joules + rec.gpu_joules + rec.comm_joules;
  return rec;
}

EnergyTotals total_energy(std::span<const EnergyRecord> records) {
  // fixed fold order: node, then round, then phase
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const auto& ra = records[a];
    const auto& rb = records[b];
    if (ra.node != rb.node) return ra.node < rb.node;
    if (ra.round != rb.round) return ra.round < rb.round;
    return ra.phase < rb.phase;
  });

  EnergyTotals t;
  for (size_t i : order) {
    const auto& rec = records[i];
    switch (rec.phase) {
      case Phase::Training: t.train_joules += rec.total_joules; break;
      case Phase::Communication: t.comm_joules += rec.total_joules; break;
      case Phase::Aggregation: t.agg_joules += rec.total_joules; break;
    }
  }
  t.train_kwh = t.train_joules / kJoulesPerKwh;
  t.comm_kwh = t.comm_joules / kJoulesPerKwh;
  t.agg_kwh = t.agg_joules / kJoulesPerKwh;
  t.total_kwh = t.train_kwh + t.comm_kwh + t.agg_kwh;
  return t;
}

}  // namespace gdfl
