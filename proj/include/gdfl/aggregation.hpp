#pragma once

#include <span>
#include <vector>

#include "gdfl/model.hpp"

namespace gdfl {

/// A model received from a peer (or the node's own contribution) together with
/// its training weight and the sender's previous-round emissions report.
struct NeighborUpdate {
  NodeId from = 0;
  ModelParams model;
  uint64_t sample_count = 1;
  double reported_emissions = 0.0;  // gCO2, taken at face value
};

/// Sample-count-weighted mean over {own} + received, ascending NodeId order.
ModelParams fedavg(const NeighborUpdate& own, std::span<const NeighborUpdate> received);

/// Selects the candidate whose summed squared distance to its m-f-2 nearest
/// peers is minimal; ties break to the lowest NodeId. Requires m >= 2f+3.
ModelParams krum(const NeighborUpdate& own, std::span<const NeighborUpdate> received,
                 uint32_t f);

struct GreenSaResult {
  ModelParams model;
  std::vector<NodeId> selected;  // neighbors admitted by the threshold
};

/// Emission-threshold aggregation: neighbors reporting at most c_thresh are
/// averaged together with the node's own update; everyone else is dropped.
/// With an empty admitted set the own model passes through unchanged.
GreenSaResult green_sa(const NeighborUpdate& own, std::span<const NeighborUpdate> received,
                       double c_thresh);

/// Nearest-rank percentile: sort ascending, take index ceil(q/100 * n) - 1.
double percentile_threshold(std::span<const double> emissions, double q);

/// Modeled aggregation workload in parameter values touched: averaging reads
/// each candidate once; krum reads both sides of every candidate pair.
uint64_t averaging_work(size_t models, size_t params);
uint64_t krum_work(size_t models, size_t params);

}  // namespace gdfl
