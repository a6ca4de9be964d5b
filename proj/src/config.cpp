#include "gdfl/config.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gdfl/error.hpp"
#include "gdfl/ledger.hpp"

namespace gdfl {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::Schema, path + ": " + what);
}

[[noreturn]] void validation_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::Validation, path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing field");
  return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) schema_error(path + "." + key, "expected a number");
  return v.get<double>();
}

uint64_t require_uint(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_unsigned()) schema_error(path + "." + key, "expected a non-negative integer");
  return v.get<uint64_t>();
}

uint32_t require_u32(const json& obj, const std::string& key, const std::string& path) {
  const uint64_t v = require_uint(obj, key, path);
  if (v > UINT32_MAX) validation_error(path + "." + key, "value out of range");
  return static_cast<uint32_t>(v);
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) schema_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

HardwareProfile parse_hardware(const json& j, const std::string& path) {
  HardwareProfile hw;
  hw.pue = require_number(j, "pue", path);
  if (!(hw.pue >= 1.0)) validation_error(path + ".pue", "PUE must be >= 1");
  hw.tdp_watts = require_number(j, "tdp_watts", path);
  if (!(hw.tdp_watts > 0.0)) validation_error(path + ".tdp_watts", "TDP must be > 0");
  if (j.contains("gpu_power_watts") && !j["gpu_power_watts"].is_null()) {
    if (!j["gpu_power_watts"].is_number())
      schema_error(path + ".gpu_power_watts", "expected a number");
    GpuProfile gpu{j["gpu_power_watts"].get<double>()};
    if (!(gpu.power_watts > 0.0))
      validation_error(path + ".gpu_power_watts", "GPU power must be > 0 when present");
    hw.gpu = gpu;
  }
  hw.cpu_utilization_train = require_number(j, "util_train", path);
  if (hw.cpu_utilization_train < 0.0 || hw.cpu_utilization_train > 1.0)
    validation_error(path + ".util_train", "utilization must be in [0, 1]");
  hw.cpu_utilization_agg = require_number(j, "util_agg", path);
  if (hw.cpu_utilization_agg < 0.0 || hw.cpu_utilization_agg > 1.0)
    validation_error(path + ".util_agg", "utilization must be in [0, 1]");
  return hw;
}

RegionProfile parse_region(const json& j, const std::string& path) {
  RegionProfile region;
  region.name = require_string(j, "name", path);
  region.grid_carbon_intensity = require_number(j, "grid_carbon_intensity", path);
  if (!(region.grid_carbon_intensity >= 0.0))
    validation_error(path + ".grid_carbon_intensity", "carbon intensity must be >= 0");
  region.renewable_ratio = require_number(j, "renewable_ratio", path);
  if (region.renewable_ratio < 0.0 || region.renewable_ratio > 1.0)
    validation_error(path + ".renewable_ratio", "renewable ratio must be in [0, 1], got " +
                                                    format_double(region.renewable_ratio));
  return region;
}

CommMedium parse_medium(const json& j, const std::string& path) {
  const std::string kind = require_string(j, "kind", path);
  MediumKind mk;
  try {
    mk = parse_medium_kind(kind);
  } catch (const Error& e) {
    fail(e.kind(), path + ".kind: " + e.what());
  }
  if (mk == MediumKind::Custom) {
    CommMedium medium{mk, require_number(j, "energy_per_byte", path)};
    if (!(medium.energy_per_byte > 0.0))
      validation_error(path + ".energy_per_byte", "energy per byte must be > 0");
    return medium;
  }
  if (j.contains("energy_per_byte"))
    validation_error(path + ".energy_per_byte",
                     "built-in media carry fixed constants; use kind=custom to override");
  return ingest_medium(mk);
}

NodeProfile parse_node(const json& j, NodeId id, const std::string& path) {
  NodeProfile node;
  node.id = id;
  node.hardware = parse_hardware(require(j, "hardware", path), path + ".hardware");
  node.region = parse_region(require(j, "region", path), path + ".region");
  node.medium = parse_medium(require(j, "medium", path), path + ".medium");
  node.compute_speed = require_number(j, "compute_speed", path);
  if (!(node.compute_speed > 0.0))
    validation_error(path + ".compute_speed", "compute speed must be > 0");
  node.agg_speed = require_number(j, "agg_speed", path);
  if (!(node.agg_speed > 0.0)) validation_error(path + ".agg_speed", "agg speed must be > 0");
  return node;
}

TopologySpec parse_topology(const json& j, const std::string& path) {
  TopologySpec spec;
  const std::string kind = require_string(j, "kind", path);
  if (kind == "fully_connected") {
    spec.kind = TopologyKind::FullyConnected;
  } else if (kind == "ring") {
    spec.kind = TopologyKind::Ring;
  } else if (kind == "erdos_renyi") {
    spec.kind = TopologyKind::ErdosRenyi;
    spec.p = require_number(j, "p", path);
    if (!(spec.p > 0.0) || spec.p > 1.0)
      validation_error(path + ".p", "edge probability must be in (0, 1]");
  } else {
    schema_error(path + ".kind", "unknown topology kind: " + kind);
  }
  return spec;
}

PartitionSpec parse_partition(const json& j, const std::string& path) {
  PartitionSpec spec;
  const std::string kind = require_string(j, "kind", path);
  if (kind == "iid") {
    spec.kind = PartitionKind::Iid;
  } else if (kind == "dirichlet") {
    spec.kind = PartitionKind::Dirichlet;
    spec.alpha = require_number(j, "alpha", path);
    if (!(spec.alpha > 0.0)) validation_error(path + ".alpha", "alpha must be > 0");
  } else {
    schema_error(path + ".kind", "unknown partition kind: " + kind);
  }
  return spec;
}

AggregationSpec parse_aggregation(const json& j, const std::string& path) {
  AggregationSpec spec;
  const std::string kind = require_string(j, "kind", path);
  if (kind == "fedavg") {
    spec.kind = AggregationKind::FedAvg;
  } else if (kind == "krum") {
    spec.kind = AggregationKind::Krum;
    spec.krum_f = require_u32(j, "f", path);
  } else if (kind == "green_sa") {
    spec.kind = AggregationKind::GreenSA;
    const bool has_thresh = j.contains("c_thresh");
    const bool has_pct = j.contains("percentile");
    if (has_thresh == has_pct)
      schema_error(path, "green_sa needs exactly one of c_thresh or percentile");
    if (has_thresh) {
      spec.c_thresh = require_number(j, "c_thresh", path);
      if (!(*spec.c_thresh > 0.0)) validation_error(path + ".c_thresh", "threshold must be > 0");
    } else {
      spec.percentile = require_number(j, "percentile", path);
      if (!(*spec.percentile > 0.0) || !(*spec.percentile < 100.0))
        validation_error(path + ".percentile", "percentile must be in (0, 100)");
    }
  } else {
    schema_error(path + ".kind", "unknown aggregation kind: " + kind);
  }
  return spec;
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorKind::Schema, "scenario: expected a JSON object");

  const auto schema = require_uint(root, "schema", "scenario");
  if (schema != 1)
    fail(ErrorKind::Schema, "scenario.schema: unsupported version " + std::to_string(schema));

  ScenarioConfig cfg;
  cfg.seed = require_uint(root, "seed", "scenario");
  cfg.rounds = require_u32(root, "rounds", "scenario");
  if (cfg.rounds < 1) validation_error("scenario.rounds", "must run at least one round");
  cfg.local_epochs = require_u32(root, "local_epochs", "scenario");
  if (cfg.local_epochs < 1) validation_error("scenario.local_epochs", "must be >= 1");

  cfg.topology = parse_topology(require(root, "topology", "scenario"), "scenario.topology");

  {
    const auto& j = require(root, "data", "scenario");
    const std::string path = "scenario.data";
    cfg.data.classes = require_u32(j, "classes", path);
    if (cfg.data.classes < 2) validation_error(path + ".classes", "need at least 2 classes");
    cfg.data.features = require_u32(j, "features", path);
    if (cfg.data.features < 1) validation_error(path + ".features", "need at least 1 feature");
    cfg.data.samples_per_node = require_u32(j, "samples_per_node", path);
    if (cfg.data.samples_per_node < cfg.data.classes)
      validation_error(path + ".samples_per_node", "need at least one sample per class");
    cfg.data.partition = parse_partition(require(j, "partition", path), path + ".partition");
  }

  {
    const auto& j = require(root, "model", "scenario");
    const std::string path = "scenario.model";
    const auto& sizes = require(j, "hidden_sizes", path);
    if (!sizes.is_array()) schema_error(path + ".hidden_sizes", "expected an array");
    for (size_t i = 0; i < sizes.size(); ++i) {
      if (!sizes[i].is_number_unsigned() || sizes[i].get<uint64_t>() == 0 ||
          sizes[i].get<uint64_t>() > 65536)
        validation_error(path + ".hidden_sizes[" + std::to_string(i) + "]",
                         "hidden sizes must be positive integers (at most 65536)");
      cfg.model.hidden_sizes.push_back(sizes[i].get<uint32_t>());
    }
    if (j.contains("learning_rate")) {
      cfg.model.learning_rate = require_number(j, "learning_rate", path);
      if (!(cfg.model.learning_rate > 0.0))
        validation_error(path + ".learning_rate", "learning rate must be > 0");
    }
  }

  cfg.aggregation =
      parse_aggregation(require(root, "aggregation", "scenario"), "scenario.aggregation");

  {
    const auto& j = require(root, "selection", "scenario");
    const std::string kind = require_string(j, "kind", "scenario.selection");
    if (kind == "none") {
      cfg.selection = SelectionKind::None;
    } else if (kind == "green_sn") {
      cfg.selection = SelectionKind::GreenSN;
    } else {
      schema_error("scenario.selection.kind", "unknown selection kind: " + kind);
    }
  }

  if (root.contains("clock")) {
    const auto& v = root["clock"];
    if (!v.is_string()) schema_error("scenario.clock", "expected a string");
    const std::string clock = v.get<std::string>();
    if (clock == "modeled") {
      cfg.clock = ClockMode::Modeled;
    } else if (clock == "measured") {
      cfg.clock = ClockMode::Measured;
    } else {
      schema_error("scenario.clock", "unknown clock mode: " + clock);
    }
  }

  if (root.contains("early_stopping") && !root["early_stopping"].is_null()) {
    const auto& j = root["early_stopping"];
    const std::string path = "scenario.early_stopping";
    EarlyStoppingSpec es;
    es.patience = require_u32(j, "patience", path);
    if (es.patience < 1) validation_error(path + ".patience", "patience must be >= 1");
    es.min_delta = require_number(j, "min_delta", path);
    if (!(es.min_delta >= 0.0)) validation_error(path + ".min_delta", "min_delta must be >= 0");
    cfg.early_stopping = es;
  }

  {
    const auto& nodes = require(root, "nodes", "scenario");
    if (!nodes.is_array()) schema_error("scenario.nodes", "expected an array");
    if (nodes.size() < 2)
      validation_error("scenario.nodes", "a federation needs at least 2 nodes");
    for (size_t i = 0; i < nodes.size(); ++i)
      cfg.nodes.push_back(parse_node(nodes[i], static_cast<NodeId>(i),
                                     "scenario.nodes[" + std::to_string(i) + "]"));
  }

  if (cfg.aggregation.kind == AggregationKind::Krum &&
      cfg.k() < 2 * cfg.aggregation.krum_f + 3)
    validation_error("scenario.aggregation.f",
                     "krum needs K >= 2f+3 over every neighbor set; K = " +
                         std::to_string(cfg.k()));

  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario_json(read_file(path));
}

namespace {

void emit_node(std::string& out, const NodeProfile& node) {
  out += "{\"hardware\":{\"pue\":" + format_double(node.hardware.pue);
  out += ",\"tdp_watts\":" + format_double(node.hardware.tdp_watts);
  if (node.hardware.gpu)
    out += ",\"gpu_power_watts\":" + format_double(node.hardware.gpu->power_watts);
  out += ",\"util_train\":" + format_double(node.hardware.cpu_utilization_train);
  out += ",\"util_agg\":" + format_double(node.hardware.cpu_utilization_agg);
  out += "},\"region\":{\"name\":" + json(node.region.name).dump();
  out += ",\"grid_carbon_intensity\":" + format_double(node.region.grid_carbon_intensity);
  out += ",\"renewable_ratio\":" + format_double(node.region.renewable_ratio);
  out += "},\"medium\":{\"kind\":\"" + std::string(medium_name(node.medium.kind)) + "\"";
  if (node.medium.kind == MediumKind::Custom)
    out += ",\"energy_per_byte\":" + format_double(node.medium.energy_per_byte);
  out += "},\"compute_speed\":" + format_double(node.compute_speed);
  out += ",\"agg_speed\":" + format_double(node.agg_speed) + "}";
}

}  // namespace

std::string nodes_to_json(const std::vector<NodeProfile>& nodes) {
  std::string out = "[";
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (i) out += ",";
    emit_node(out, nodes[i]);
  }
  out += "]";
  return out;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  std::string out = "{\"schema\":1";
  out += ",\"seed\":" + std::to_string(cfg.seed);
  out += ",\"rounds\":" + std::to_string(cfg.rounds);
  out += ",\"local_epochs\":" + std::to_string(cfg.local_epochs);

  out += ",\"topology\":{\"kind\":\"";
  switch (cfg.topology.kind) {
    case TopologyKind::FullyConnected: out += "fully_connected\""; break;
    case TopologyKind::Ring: out += "ring\""; break;
    case TopologyKind::ErdosRenyi:
      out += "erdos_renyi\",\"p\":" + format_double(cfg.topology.p);
      break;
  }
  out += "}";

  out += ",\"data\":{\"classes\":" + std::to_string(cfg.data.classes);
  out += ",\"features\":" + std::to_string(cfg.data.features);
  out += ",\"samples_per_node\":" + std::to_string(cfg.data.samples_per_node);
  out += ",\"partition\":{\"kind\":\"";
  if (cfg.data.partition.kind == PartitionKind::Iid) {
    out += "iid\"";
  } else {
    out += "dirichlet\",\"alpha\":" + format_double(cfg.data.partition.alpha);
  }
  out += "}}";

  out += ",\"model\":{\"hidden_sizes\":[";
  for (size_t i = 0; i < cfg.model.hidden_sizes.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(cfg.model.hidden_sizes[i]);
  }
  out += "],\"learning_rate\":" + format_double(cfg.model.learning_rate) + "}";

  out += ",\"aggregation\":{\"kind\":\"";
  switch (cfg.aggregation.kind) {
    case AggregationKind::FedAvg: out += "fedavg\""; break;
    case AggregationKind::Krum:
      out += "krum\",\"f\":" + std::to_string(cfg.aggregation.krum_f);
      break;
    case AggregationKind::GreenSA:
      out += "green_sa\"";
      if (cfg.aggregation.c_thresh)
        out += ",\"c_thresh\":" + format_double(*cfg.aggregation.c_thresh);
      else
        out += ",\"percentile\":" + format_double(*cfg.aggregation.percentile);
      break;
  }
  out += "}";

  out += ",\"selection\":{\"kind\":\"";
  out += cfg.selection == SelectionKind::GreenSN ? "green_sn\"}" : "none\"}";
  out += ",\"clock\":\"";
  out += cfg.clock == ClockMode::Measured ? "measured\"" : "modeled\"";

  if (cfg.early_stopping) {
    out += ",\"early_stopping\":{\"patience\":" + std::to_string(cfg.early_stopping->patience);
    out += ",\"min_delta\":" + format_double(cfg.early_stopping->min_delta) + "}";
  }

  out += ",\"nodes\":[";
  for (size_t i = 0; i < cfg.nodes.size(); ++i) {
    if (i) out += ",";
    emit_node(out, cfg.nodes[i]);
  }
  out += "]}";
  return out;
}

namespace {

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

}  // namespace

std::string scenario_fingerprint(const ScenarioConfig& config) {
  return to_hex(fnv1a64(scenario_to_json(config)));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

double parse_csv_double(const std::string& text, const std::string& context) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::Validation, context + ": not a number: '" + text + "'");
  }
}

}  // namespace

std::map<NodeId, NodeProfile> load_profile_registry(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Parse, path + ": empty registry");

  static const std::vector<std::string> expected = {
      "node_id",  "pue",     "tdp_watts",       "gpu_power_watts",
      "util_train", "util_agg", "region",        "grid_ci",
      "renewable_ratio", "medium", "compute_speed", "agg_speed"};
  const auto header = split_csv_line(line);
  for (const auto& col : expected)
    if (std::find(header.begin(), header.end(), col) == header.end())
      fail(ErrorKind::MissingColumn, path + ": missing column '" + col + "'");
  std::vector<size_t> pos(expected.size());
  for (size_t i = 0; i < expected.size(); ++i)
    pos[i] = static_cast<size_t>(
        std::find(header.begin(), header.end(), expected[i]) - header.begin());

  std::map<NodeId, NodeProfile> registry;
  size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    const std::string where = path + " row " + std::to_string(row_number);
    if (fields.size() < header.size())
      fail(ErrorKind::Validation, where + ": expected " + std::to_string(header.size()) +
                                      " fields, got " + std::to_string(fields.size()));
    auto field = [&](size_t i) -> const std::string& { return fields[pos[i]]; };

    NodeProfile node;
    const double id_value = parse_csv_double(field(0), where + " node_id");
    if (id_value < 0 || id_value != std::floor(id_value))
      fail(ErrorKind::Validation, where + ": node_id must be a non-negative integer");
    node.id = static_cast<NodeId>(id_value);
    if (registry.count(node.id))
      fail(ErrorKind::DuplicateNode,
           where + ": duplicate node_id " + std::to_string(node.id));

    node.hardware.pue = parse_csv_double(field(1), where + " pue");
    node.hardware.tdp_watts = parse_csv_double(field(2), where + " tdp_watts");
    if (!field(3).empty()) {
      node.hardware.gpu = GpuProfile{parse_csv_double(field(3), where + " gpu_power_watts")};
    }
    node.hardware.cpu_utilization_train = parse_csv_double(field(4), where + " util_train");
    node.hardware.cpu_utilization_agg = parse_csv_double(field(5), where + " util_agg");
    node.region.name = field(6);
    node.region.grid_carbon_intensity = parse_csv_double(field(7), where + " grid_ci");
    node.region.renewable_ratio = parse_csv_double(field(8), where + " renewable_ratio");
    try {
      const MediumKind mk = parse_medium_kind(field(9));
      if (mk == MediumKind::Custom)
        fail(ErrorKind::Validation, "custom media need a scenario file, not a registry row");
      node.medium = ingest_medium(mk);
    } catch (const Error& e) {
      fail(e.kind(), where + ": " + e.what());
    }
    node.compute_speed = parse_csv_double(field(10), where + " compute_speed");
    node.agg_speed = parse_csv_double(field(11), where + " agg_speed");

    // same invariants as the scenario schema
    if (!(node.hardware.pue >= 1.0)) fail(ErrorKind::Validation, where + ": pue must be >= 1");
    if (!(node.hardware.tdp_watts > 0.0))
      fail(ErrorKind::Validation, where + ": tdp_watts must be > 0");
    if (node.hardware.gpu && !(node.hardware.gpu->power_watts > 0.0))
      fail(ErrorKind::Validation, where + ": gpu_power_watts must be > 0 when present");
    if (node.hardware.cpu_utilization_train < 0.0 || node.hardware.cpu_utilization_train > 1.0)
      fail(ErrorKind::Validation, where + ": util_train must be in [0, 1]");
    if (node.hardware.cpu_utilization_agg < 0.0 || node.hardware.cpu_utilization_agg > 1.0)
      fail(ErrorKind::Validation, where + ": util_agg must be in [0, 1]");
    if (!(node.region.grid_carbon_intensity >= 0.0))
      fail(ErrorKind::Validation, where + ": grid_ci must be >= 0");
    if (node.region.renewable_ratio < 0.0 || node.region.renewable_ratio > 1.0)
      fail(ErrorKind::Validation, where + ": renewable_ratio must be in [0, 1]");
    if (!(node.compute_speed > 0.0))
      fail(ErrorKind::Validation, where + ": compute_speed must be > 0");
    if (!(node.agg_speed > 0.0))
      fail(ErrorKind::Validation, where + ": agg_speed must be > 0");

    registry.emplace(node.id, node);
  }

  if (registry.empty()) fail(ErrorKind::Validation, path + ": registry has no rows");
  NodeId expected_id = 0;
  for (const auto& [id, _] : registry) {
    if (id != expected_id)
      fail(ErrorKind::Validation,
           path + ": node ids must be dense 0..K-1; missing id " +
               std::to_string(expected_id));
    ++expected_id;
  }
  return registry;
}

}  // namespace gdfl
