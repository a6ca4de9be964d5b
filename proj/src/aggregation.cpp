#include "gdfl/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gdfl/error.hpp"

namespace gdfl {

namespace {

void check_shapes(const NeighborUpdate& own, std::span<const NeighborUpdate> received) {
  for (const auto& u : received)
    if (!u.model.same_shape(own.model))
      fail(ErrorKind::ShapeMismatch,
           "update from node " + std::to_string(u.from) + " has a different architecture");
}

/// Sample-count-weighted mean over candidates, ascending NodeId. Weights are
/// integer counts accumulated exactly in double and normalized by the final
/// division, so effective weights sum to 1 by construction.
ModelParams weighted_mean(std::vector<const NeighborUpdate*> candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const NeighborUpdate* a, const NeighborUpdate* b) { return a->from < b->from; });

  const ModelParams& first = candidates.front()->model;
  double total_weight = 0.0;
  for (const auto* c : candidates) total_weight += static_cast<double>(c->sample_count);

  std::vector<double> acc(first.param_count(), 0.0);
  for (const auto* c : candidates) {
    const double w = static_cast<double>(c->sample_count);
    for (size_t i = 0; i < acc.size(); ++i)
      acc[i] += w * static_cast<double>(c->model.values[i]);
  }

  ModelParams out;
  out.layer_shapes = first.layer_shapes;
  out.values.resize(acc.size());
  for (size_t i = 0; i < acc.size(); ++i)
    out.values[i] = static_cast<float>(acc[i] / total_weight);
  return out;
}

double squared_distance(const ModelParams& a, const ModelParams& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = static_cast<double>(a.values[i]) - static_cast<double>(b.values[i]);
    sum += d * d;
  }
  return sum;
}

}  // namespace

ModelParams fedavg(const NeighborUpdate& own, std::span<const NeighborUpdate> received) {
  check_shapes(own, received);
  if (received.empty()) return own.model;
  std::vector<const NeighborUpdate*> candidates;
  candidates.reserve(received.size() + 1);
  candidates.push_back(&own);
  for (const auto& u : received) candidates.push_back(&u);
  return weighted_mean(std::move(candidates));
}

ModelParams krum(const NeighborUpdate& own, std::span<const NeighborUpdate> received,
                 uint32_t f) {
  check_shapes(own, received);
  const size_t m = received.size() + 1;
  if (m < 2 * static_cast<size_t>(f) + 3)
    fail(ErrorKind::TooFewUpdates, "krum needs at least 2f+3 = " +
                                       std::to_string(2 * f + 3) + " candidates, got " +
                                       std::to_string(m));

  std::vector<const NeighborUpdate*> candidates;
  candidates.reserve(m);
  candidates.push_back(&own);
  for (const auto& u : received) candidates.push_back(&u);
  std::sort(candidates.begin(), candidates.end(),
            [](const NeighborUpdate* a, const NeighborUpdate* b) { return a->from < b->from; });

  std::vector<double> dist(m * m, 0.0);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      const double d = squared_distance(candidates[i]->model, candidates[j]->model);
      dist[i * m + j] = d;
      dist[j * m + i] = d;
    }

  const size_t closest = m - f - 2;  // peers contributing to each score
  size_t best = 0;
  double best_score = 0.0;
  std::vector<double> row;
  for (size_t i = 0; i < m; ++i) {
    row.clear();
    for (size_t j = 0; j < m; ++j)
      if (j != i) row.push_back(dist[i * m + j]);
    std::sort(row.begin(), row.end());
    double score = 0.0;
    for (size_t j = 0; j < closest; ++j) score += row[j];
    if (i == 0 || score < best_score) {
      best = i;
      best_score = score;
    }
  }
  // ties already resolve to the lowest NodeId: candidates are id-sorted and
  // only a strictly smaller score replaces the incumbent
  return candidates[best]->model;
}

GreenSaResult green_sa(const NeighborUpdate& own, std::span<const NeighborUpdate> received,
                       double c_thresh) {
  check_shapes(own, received);

  GreenSaResult result;
  std::vector<const NeighborUpdate*> candidates;
  candidates.reserve(received.size() + 1);
  candidates.push_back(&own);
  for (const auto& u : received)
    if (u.reported_emissions <= c_thresh) {
      candidates.push_back(&u);
      result.selected.push_back(u.from);
    }
  std::sort(result.selected.begin(), result.selected.end());

  result.model = candidates.size() == 1 ? own.model : weighted_mean(std::move(candidates));
  return result;
}

double percentile_threshold(std::span<const double> emissions, double q) {
  if (emissions.empty()) fail(ErrorKind::EmptyInput, "percentile of an empty list");
  if (!(q > 0.0) || !(q < 100.0))
    fail(ErrorKind::InvalidArgs, "percentile q must be in (0, 100)");
  std::vector<double> sorted(emissions.begin(), emissions.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const auto rank = static_cast<size_t>(std::ceil(q / 100.0 * n));
  return sorted[rank == 0 ? 0 : rank - 1];
}

uint64_t averaging_work(size_t models, size_t params) {
  return static_cast<uint64_t>(models) * params;
}

uint64_t krum_work(size_t models, size_t params) {
  // every unordered candidate pair reads both parameter vectors
  return static_cast<uint64_t>(models) * (models - 1) * params;
}

}  // namespace gdfl
