#include "gdfl/ledger.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gdfl/error.hpp"

namespace gdfl {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ExportFormat parse_export_format(const std::string& name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "json") return ExportFormat::Json;
  fail(ErrorKind::InvalidArgs, "unknown export format: " + name + " (expected csv or json)");
}

namespace {

constexpr const char* kCsvHeader =
    "node,round,phase,duration_s,bytes_sent,bytes_recv,cpu_j,gpu_j,comm_j,total_j,"
    "energy_kwh,effective_ci,gco2";

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

void append_row_csv(std::string& out, const LedgerRow& row) {
  out += std::to_string(row.node);
  out += ',';
  out += std::to_string(row.round);
  out += ',';
  out += phase_name(row.phase);
  out += ',';
  out += format_double(row.duration_s);
  out += ',';
  out += std::to_string(row.bytes_sent);
  out += ',';
  out += std::to_string(row.bytes_recv);
  out += ',';
  out += format_double(row.cpu_j);
  out += ',';
  out += format_double(row.gpu_j);
  out += ',';
  out += format_double(row.comm_j);
  out += ',';
  out += format_double(row.total_j);
  out += ',';
  out += format_double(row.energy_kwh);
  out += ',';
  out += format_double(row.effective_ci);
  out += ',';
  out += format_double(row.gco2);
  out += '\n';
}

}  // namespace

// rows only: CSV exports carry no metrics, and the digest must be invariant
// to the export format
std::string ledger_content_digest(const RunLedger& ledger) {
  std::string body;
  for (const auto& row : ledger.rows) append_row_csv(body, row);
  return to_hex(fnv1a64(body));
}

RunLedger build_ledger(const RunResult& result) {
  RunLedger ledger;
  ledger.scenario_fingerprint = result.meta.scenario_fingerprint;
  ledger.k = result.config.k();
  ledger.rounds_executed = result.meta.rounds_executed;
  ledger.stopped_early = result.meta.stopped_early;
  ledger.has_metadata = true;
  ledger.metrics = result.metrics;
  ledger.tallies = result.tallies;
  ledger.adjacency = result.topology.adjacency;
  ledger.decision_flags = result.meta.decision_flags;
  // stable key order so JSON re-export after import is byte-identical
  std::sort(ledger.decision_flags.begin(), ledger.decision_flags.end());
  ledger.relay_events = result.relay_log.size();

  // observation / energy / emission streams line up 1:1:1 by construction
  if (result.energy.size() != result.observations.size() ||
      result.emission.size() != result.observations.size())
    fail(ErrorKind::Config, "run result streams are misaligned");

  ledger.rows.reserve(result.observations.size());
  for (size_t i = 0; i < result.observations.size(); ++i) {
    const auto& obs = result.observations[i];
    const auto& energy = result.energy[i];
    const auto& emission = result.emission[i];
    LedgerRow row;
    row.node = obs.node;
    row.round = obs.round;
    row.phase = obs.phase;
    row.duration_s = obs.duration_s;
    row.bytes_sent = obs.bytes_sent;
    row.bytes_recv = obs.bytes_recv;
    row.cpu_j = energy.cpu_joules;
    row.gpu_j = energy.gpu_joules;
    row.comm_j = energy.comm_joules;
    row.total_j = energy.total_joules;
    row.energy_kwh = energy.total_joules / kJoulesPerKwh;
    row.effective_ci = emission.effective_ci;
    row.gco2 = emission.grams_co2;
    ledger.rows.push_back(row);
  }

  std::sort(ledger.rows.begin(), ledger.rows.end(), [](const LedgerRow& a, const LedgerRow& b) {
    if (a.node != b.node) return a.node < b.node;
    if (a.round != b.round) return a.round < b.round;
    return a.phase < b.phase;
  });

  ledger.content_digest = ledger_content_digest(ledger);
  return ledger;
}

std::string ledger_to_csv(const RunLedger& ledger) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& row : ledger.rows) append_row_csv(out, row);
  return out;
}

namespace {

void append_tally_json(std::string& out, const VoteTally& tally) {
  out += "{\"node\":" + std::to_string(tally.node);
  out += ",\"positive_votes\":" + std::to_string(tally.positive_votes);
  out += ",\"neighbor_count\":" + std::to_string(tally.neighbor_count);
  out += ",\"retained\":";
  out += tally.retained ? "true}" : "false}";
}

}  // namespace

std::string ledger_to_json(const RunLedger& ledger) {
  std::string out = "{\"schema\":1,\"kind\":\"gdfl_ledger\"";

  out += ",\"metadata\":{";
  out += "\"scenario_fingerprint\":" + json(ledger.scenario_fingerprint).dump();
  out += ",\"content_digest\":" + json(ledger.content_digest).dump();
  out += ",\"k\":" + std::to_string(ledger.k);
  out += ",\"rounds_executed\":" + std::to_string(ledger.rounds_executed);
  out += ",\"stopped_early\":";
  out += ledger.stopped_early ? "true" : "false";
  out += ",\"relay_events\":" + std::to_string(ledger.relay_events);
  out += ",\"decision_flags\":{";
  for (size_t i = 0; i < ledger.decision_flags.size(); ++i) {
    if (i) out += ",";
    out += json(ledger.decision_flags[i].first).dump() + ":" +
           json(ledger.decision_flags[i].second).dump();
  }
  out += "},\"adjacency\":[";
  for (size_t i = 0; i < ledger.adjacency.size(); ++i) {
    if (i) out += ",";
    out += "[";
    for (size_t j = 0; j < ledger.adjacency[i].size(); ++j) {
      if (j) out += ",";
      out += std::to_string(ledger.adjacency[i][j]);
    }
    out += "]";
  }
  out += "]}";

  out += ",\"round_metrics\":[";
  for (size_t i = 0; i < ledger.metrics.size(); ++i) {
    if (i) out += ",";
    out += "{\"round\":" + std::to_string(ledger.metrics[i].round);
    out += ",\"val_f1\":" + format_double(ledger.metrics[i].val_f1);
    out += ",\"val_loss\":" + format_double(ledger.metrics[i].val_loss) + "}";
  }
  out += "]";

  out += ",\"tallies\":[";
  for (size_t r = 0; r < ledger.tallies.size(); ++r) {
    if (r) out += ",";
    out += "[";
    for (size_t i = 0; i < ledger.tallies[r].size(); ++i) {
      if (i) out += ",";
      append_tally_json(out, ledger.tallies[r][i]);
    }
    out += "]";
  }
  out += "]";

  out += ",\"rows\":[";
  for (size_t i = 0; i < ledger.rows.size(); ++i) {
    const auto& row = ledger.rows[i];
    if (i) out += ",";
    out += "{\"node\":" + std::to_string(row.node);
    out += ",\"round\":" + std::to_string(row.round);
    out += ",\"phase\":\"" + std::string(phase_name(row.phase)) + "\"";
    out += ",\"duration_s\":" + format_double(row.duration_s);
    out += ",\"bytes_sent\":" + std::to_string(row.bytes_sent);
    out += ",\"bytes_recv\":" + std::to_string(row.bytes_recv);
    out += ",\"cpu_j\":" + format_double(row.cpu_j);
    out += ",\"gpu_j\":" + format_double(row.gpu_j);
    out += ",\"comm_j\":" + format_double(row.comm_j);
    out += ",\"total_j\":" + format_double(row.total_j);
    out += ",\"energy_kwh\":" + format_double(row.energy_kwh);
    out += ",\"effective_ci\":" + format_double(row.effective_ci);
    out += ",\"gco2\":" + format_double(row.gco2) + "}";
  }
  out += "]}";
  return out;
}

void export_ledger(const RunLedger& ledger, ExportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << (format == ExportFormat::Csv ? ledger_to_csv(ledger) : ledger_to_json(ledger));
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_double_exact(const std::string& text, const std::string& context) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, context + ": bad number '" + text + "'");
  }
}

uint64_t parse_u64(const std::string& text, const std::string& context) {
  try {
    size_t used = 0;
    const uint64_t v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, context + ": bad integer '" + text + "'");
  }
}

void finish_from_rows(RunLedger& ledger) {
  uint32_t max_node = 0;
  uint32_t max_round = 0;
  for (const auto& row : ledger.rows) {
    max_node = std::max(max_node, row.node);
    max_round = std::max(max_round, row.round);
  }
  if (!ledger.rows.empty()) {
    ledger.k = max_node + 1;
    ledger.rounds_executed = max_round;
  }
}

}  // namespace

RunLedger parse_ledger_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Parse, "ledger CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) fail(ErrorKind::Parse, "ledger CSV header mismatch");

  RunLedger ledger;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_line(line);
    const std::string where = "ledger row " + std::to_string(line_no);
    if (f.size() != 13) fail(ErrorKind::Parse, where + ": expected 13 fields");
    LedgerRow row;
    row.node = static_cast<NodeId>(parse_u64(f[0], where));
    row.round = static_cast<uint32_t>(parse_u64(f[1], where));
    row.phase = parse_phase(f[2]);
    row.duration_s = parse_double_exact(f[3], where);
    row.bytes_sent = parse_u64(f[4], where);
    row.bytes_recv = parse_u64(f[5], where);
    row.cpu_j = parse_double_exact(f[6], where);
    row.gpu_j = parse_double_exact(f[7], where);
    row.comm_j = parse_double_exact(f[8], where);
    row.total_j = parse_double_exact(f[9], where);
    row.energy_kwh = parse_double_exact(f[10], where);
    row.effective_ci = parse_double_exact(f[11], where);
    row.gco2 = parse_double_exact(f[12], where);
    ledger.rows.push_back(row);
  }

  finish_from_rows(ledger);
  ledger.has_metadata = false;
  ledger.content_digest = ledger_content_digest(ledger);
  return ledger;
}

RunLedger parse_ledger_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("ledger is not valid JSON: ") + e.what());
  }
  if (!root.is_object() || root.value("kind", "") != "gdfl_ledger")
    fail(ErrorKind::Parse, "not a gdfl ledger document");

  RunLedger ledger;
  ledger.has_metadata = true;

  const auto& meta = root.at("metadata");
  ledger.scenario_fingerprint = meta.value("scenario_fingerprint", "");
  ledger.k = meta.value("k", 0u);
  ledger.rounds_executed = meta.value("rounds_executed", 0u);
  ledger.stopped_early = meta.value("stopped_early", false);
  ledger.relay_events = meta.value("relay_events", uint64_t{0});
  if (meta.contains("decision_flags"))
    for (const auto& [key, value] : meta["decision_flags"].items())
      ledger.decision_flags.emplace_back(key, value.get<std::string>());
  if (meta.contains("adjacency"))
    for (const auto& list : meta["adjacency"])
      ledger.adjacency.push_back(list.get<std::vector<NodeId>>());

  for (const auto& m : root.value("round_metrics", json::array())) {
    RoundMetrics metric;
    metric.round = m.at("round").get<uint32_t>();
    metric.val_f1 = m.at("val_f1").get<double>();
    metric.val_loss = m.at("val_loss").get<double>();
    ledger.metrics.push_back(metric);
  }

  for (const auto& round_tallies : root.value("tallies", json::array())) {
    std::vector<VoteTally> tallies;
    for (const auto& t : round_tallies) {
      VoteTally tally;
      tally.node = t.at("node").get<NodeId>();
      tally.positive_votes = t.at("positive_votes").get<uint32_t>();
      tally.neighbor_count = t.at("neighbor_count").get<uint32_t>();
      tally.retained = t.at("retained").get<bool>();
      tallies.push_back(tally);
    }
    ledger.tallies.push_back(std::move(tallies));
  }

  for (const auto& r : root.value("rows", json::array())) {
    LedgerRow row;
    row.node = r.at("node").get<NodeId>();
    row.round = r.at("round").get<uint32_t>();
    row.phase = parse_phase(r.at("phase").get<std::string>());
    row.duration_s = r.at("duration_s").get<double>();
    row.bytes_sent = r.at("bytes_sent").get<uint64_t>();
    row.bytes_recv = r.at("bytes_recv").get<uint64_t>();
    row.cpu_j = r.at("cpu_j").get<double>();
    row.gpu_j = r.at("gpu_j").get<double>();
    row.comm_j = r.at("comm_j").get<double>();
    row.total_j = r.at("total_j").get<double>();
    row.energy_kwh = r.at("energy_kwh").get<double>();
    row.effective_ci = r.at("effective_ci").get<double>();
    row.gco2 = r.at("gco2").get<double>();
    ledger.rows.push_back(row);
  }

  ledger.content_digest = ledger_content_digest(ledger);
  const std::string recorded = meta.value("content_digest", "");
  if (!recorded.empty() && recorded != ledger.content_digest)
    fail(ErrorKind::Validation, "ledger content digest mismatch: file says " + recorded +
                                    ", rows hash to " + ledger.content_digest);
  return ledger;
}

RunLedger import_ledger(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_ledger_json(text);
  return parse_ledger_csv(text);
}

Summary summarize(const RunLedger& ledger) {
  // rebuild the accounting records so totals come from the module folds
  std::vector<EnergyRecord> energy;
  std::vector<EmissionRecord> emission;
  energy.reserve(ledger.rows.size());
  emission.reserve(ledger.rows.size());
  uint64_t comm_bytes = 0;
  for (const auto& row : ledger.rows) {
    EnergyRecord e;
    e.node = row.node;
    e.round = row.round;
    e.phase = row.phase;
    e.cpu_joules = row.cpu_j;
    e.gpu_joules = row.gpu_j;
    e.comm_joules = row.comm_j;
    e.total_joules = row.total_j;
    energy.push_back(e);
    EmissionRecord em;
    em.node = row.node;
    em.round = row.round;
    em.phase = row.phase;
    em.grams_co2 = row.gco2;
    em.effective_ci = row.effective_ci;
    emission.push_back(em);
    comm_bytes += row.bytes_sent;
  }

  const EnergyTotals et = total_energy(energy);
  const EmissionTotals ct = total_emissions(emission, std::max(ledger.k, 1u));

  Summary s;
  s.scenario_fingerprint = ledger.scenario_fingerprint;
  s.content_digest = ledger.content_digest;
  s.k = ledger.k;
  s.rounds_executed = ledger.rounds_executed;
  s.stopped_early = ledger.stopped_early;
  s.train = {et.train_kwh, ct.per_phase[0]};
  s.communication = {et.comm_kwh, ct.per_phase[1]};
  s.aggregation = {et.agg_kwh, ct.per_phase[2]};
  s.total = {et.total_kwh, ct.total};
  s.comm_bytes = comm_bytes;
  if (!ledger.metrics.empty()) {
    s.final_f1 = ledger.metrics.back().val_f1;
    s.final_loss = ledger.metrics.back().val_loss;
  }
  return s;
}

std::string summary_to_json(const Summary& s) {
  std::string out = "{\"scenario_fingerprint\":" + json(s.scenario_fingerprint).dump();
  out += ",\"content_digest\":" + json(s.content_digest).dump();
  out += ",\"k\":" + std::to_string(s.k);
  out += ",\"rounds_executed\":" + std::to_string(s.rounds_executed);
  out += ",\"stopped_early\":";
  out += s.stopped_early ? "true" : "false";
  const auto phase = [&](const char* name, const PhaseSummary& p) {
    return std::string(",\"") + name + "\":{\"kwh\":" + format_double(p.kwh) +
           ",\"gco2\":" + format_double(p.gco2) + "}";
  };
  out += phase("train", s.train);
  out += phase("communication", s.communication);
  out += phase("aggregation", s.aggregation);
  out += phase("total", s.total);
  out += ",\"comm_bytes\":" + std::to_string(s.comm_bytes);
  out += ",\"final_f1\":" + format_double(s.final_f1);
  out += ",\"final_loss\":" + format_double(s.final_loss);
  out += "}";
  return out;
}

}  // namespace gdfl
