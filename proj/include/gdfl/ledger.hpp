#pragma once

#include <string>
#include <vector>

#include "gdfl/engine.hpp"

namespace gdfl {

/// One exported row: PhaseObservation joined with its energy and emission
/// records. Rows are kept sorted by (node, round, phase).
struct LedgerRow {
  NodeId node = 0;
  uint32_t round = 0;
  Phase phase = Phase::Training;
  double duration_s = 0.0;
  uint64_t bytes_sent = 0;
  uint64_t bytes_recv = 0;
  double cpu_j = 0.0;
  double gpu_j = 0.0;
  double comm_j = 0.0;
  double total_j = 0.0;
  double energy_kwh = 0.0;
  double effective_ci = 0.0;
  double gco2 = 0.0;

  bool operator==(const LedgerRow&) const = default;
};

struct RunLedger {
  std::string scenario_fingerprint;
  std::string content_digest;
  uint32_t k = 0;
  uint32_t rounds_executed = 0;
  bool stopped_early = false;
  bool has_metadata = false;  // false when rebuilt from a bare CSV
  std::vector<LedgerRow> rows;
  std::vector<RoundMetrics> metrics;
  std::vector<std::vector<VoteTally>> tallies;
  std::vector<std::vector<NodeId>> adjacency;
  std::vector<std::pair<std::string, std::string>> decision_flags;
  uint64_t relay_events = 0;
};

enum class ExportFormat { Csv, Json };
ExportFormat parse_export_format(const std::string& name);

RunLedger build_ledger(const RunResult& result);

/// CSV: the documented column set only. JSON: rows plus metadata, metrics and
/// tallies. Floats render at 17 significant digits so export -> import ->
/// export is byte-identical.
void export_ledger(const RunLedger& ledger, ExportFormat format, const std::string& path);
std::string ledger_to_json(const RunLedger& ledger);
std::string ledger_to_csv(const RunLedger& ledger);

/// Re-imports either export format (sniffed from content). CSV imports carry
/// rows only; metadata-dependent fields are recomputed where possible.
RunLedger import_ledger(const std::string& path);
RunLedger parse_ledger_csv(const std::string& text);
RunLedger parse_ledger_json(const std::string& text);

/// Hex FNV-1a 64 over the canonical row/metric rendering; platform-stable for
/// identical ledgers and independent of export format.
std::string ledger_content_digest(const RunLedger& ledger);

struct PhaseSummary {
  double kwh = 0.0;
  double gco2 = 0.0;
};

struct Summary {
  std::string scenario_fingerprint;
  std::string content_digest;
  uint32_t k = 0;
  uint32_t rounds_executed = 0;
  bool stopped_early = false;
  PhaseSummary train;
  PhaseSummary communication;
  PhaseSummary aggregation;
  PhaseSummary total;
  uint64_t comm_bytes = 0;   // total bytes sent across the run
  double final_f1 = -1.0;    // < 0 when unknown (bare CSV import)
  double final_loss = -1.0;
};

/// Totals come from the accounting folds (total_energy / total_emissions), so
/// summaries and module-level totals can never disagree.
Summary summarize(const RunLedger& ledger);
std::string summary_to_json(const Summary& summary);

/// 17-significant-digit rendering used across exports and digests.
std::string format_double(double value);

}  // namespace gdfl
