#include "gdfl.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "gdfl/config.hpp"
#include "gdfl/engine.hpp"
#include "gdfl/error.hpp"
#include "gdfl/ledger.hpp"

namespace {

thread_local std::string g_last_error = "no error";

gdfl_status status_for(gdfl::ErrorKind kind) {
  using gdfl::ErrorKind;
  switch (kind) {
    case ErrorKind::Parse:
      return GDFL_E_PARSE;
    case ErrorKind::Schema:
    case ErrorKind::MissingColumn:
      return GDFL_E_SCHEMA;
    case ErrorKind::Validation:
    case ErrorKind::UnknownMedium:
    case ErrorKind::DuplicateNode:
    case ErrorKind::InvalidSpec:
    case ErrorKind::Config:
      return GDFL_E_VALIDATION;
    case ErrorKind::Io:
      return GDFL_E_IO;
    case ErrorKind::Numeric:
      return GDFL_E_NUMERIC;
    case ErrorKind::InvalidArgs:
      return GDFL_E_ARG;
    default:
      return GDFL_E_RUNTIME;
  }
}

template <typename Fn>
gdfl_status guarded(Fn&& fn) {
  try {
    fn();
    return GDFL_OK;
  } catch (const gdfl::Error& e) {
    g_last_error = std::string(gdfl::to_string(e.kind())) + ": " + e.what();
    return status_for(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GDFL_E_RUNTIME;
  } catch (...) {
    g_last_error = "unknown failure";
    return GDFL_E_RUNTIME;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gdfl_status bad_arg(const char* what) {
  g_last_error = what;
  return GDFL_E_ARG;
}

}  // namespace

struct gdfl_scenario {
  gdfl::ScenarioConfig config;
};

struct gdfl_run {
  std::optional<gdfl::RunResult> result;  // absent for imported ledgers
  gdfl::RunLedger ledger;
};

extern "C" {

uint32_t gdfl_abi_version(void) { return 1; }

const char* gdfl_status_name(gdfl_status status) {
  switch (status) {
    case GDFL_OK: return "ok";
    case GDFL_E_PARSE: return "parse_error";
    case GDFL_E_SCHEMA: return "schema_error";
    case GDFL_E_VALIDATION: return "validation_error";
    case GDFL_E_IO: return "io_error";
    case GDFL_E_NUMERIC: return "numeric_error";
    case GDFL_E_RUNTIME: return "runtime_error";
    case GDFL_E_ARG: return "argument_error";
  }
  return "unknown";
}

const char* gdfl_last_error(void) { return g_last_error.c_str(); }

void gdfl_string_free(char* s) { std::free(s); }

gdfl_status gdfl_scenario_load_file(const char* path, gdfl_scenario** out) {
  if (!path || !out) return bad_arg("gdfl_scenario_load_file: null argument");
  return guarded([&] {
    auto scenario = std::make_unique<gdfl_scenario>();
    scenario->config = gdfl::load_scenario(path);
    *out = scenario.release();
  });
}

gdfl_status gdfl_scenario_load_json(const char* json_text, gdfl_scenario** out) {
  if (!json_text || !out) return bad_arg("gdfl_scenario_load_json: null argument");
  return guarded([&] {
    auto scenario = std::make_unique<gdfl_scenario>();
    scenario->config = gdfl::parse_scenario_json(json_text);
    *out = scenario.release();
  });
}

void gdfl_scenario_free(gdfl_scenario* scenario) { delete scenario; }

gdfl_status gdfl_scenario_to_json(const gdfl_scenario* scenario, char** out_json) {
  if (!scenario || !out_json) return bad_arg("gdfl_scenario_to_json: null argument");
  return guarded([&] { *out_json = dup_string(gdfl::scenario_to_json(scenario->config)); });
}

gdfl_status gdfl_scenario_fingerprint(const gdfl_scenario* scenario, char** out_hex) {
  if (!scenario || !out_hex) return bad_arg("gdfl_scenario_fingerprint: null argument");
  return guarded(
      [&] { *out_hex = dup_string(gdfl::scenario_fingerprint(scenario->config)); });
}

gdfl_status gdfl_profiles_csv_to_json(const char* path, char** out_json) {
  if (!path || !out_json) return bad_arg("gdfl_profiles_csv_to_json: null argument");
  return guarded([&] {
    const auto registry = gdfl::load_profile_registry(path);
    std::vector<gdfl::NodeProfile> nodes;
    nodes.reserve(registry.size());
    for (const auto& [id, node] : registry) nodes.push_back(node);
    *out_json = dup_string(gdfl::nodes_to_json(nodes));
  });
}

gdfl_status gdfl_run_scenario(const gdfl_scenario* scenario, gdfl_run** out) {
  if (!scenario || !out) return bad_arg("gdfl_run_scenario: null argument");
  return guarded([&] {
    auto run = std::make_unique<gdfl_run>();
    run->result = gdfl::run_scenario(scenario->config);
    run->ledger = gdfl::build_ledger(*run->result);
    *out = run.release();
  });
}

void gdfl_run_free(gdfl_run* run) { delete run; }

gdfl_status gdfl_run_export(const gdfl_run* run, const char* format, const char* path) {
  if (!run || !format || !path) return bad_arg("gdfl_run_export: null argument");
  return guarded(
      [&] { gdfl::export_ledger(run->ledger, gdfl::parse_export_format(format), path); });
}

gdfl_status gdfl_run_summary_json(const gdfl_run* run, char** out_json) {
  if (!run || !out_json) return bad_arg("gdfl_run_summary_json: null argument");
  return guarded(
      [&] { *out_json = dup_string(gdfl::summary_to_json(gdfl::summarize(run->ledger))); });
}

gdfl_status gdfl_run_fingerprint(const gdfl_run* run, char** out_hex) {
  if (!run || !out_hex) return bad_arg("gdfl_run_fingerprint: null argument");
  return guarded([&] {
    *out_hex =
        dup_string(run->ledger.scenario_fingerprint + ":" + run->ledger.content_digest);
  });
}

gdfl_status gdfl_run_adjacency_json(const gdfl_run* run, char** out_json) {
  if (!run || !out_json) return bad_arg("gdfl_run_adjacency_json: null argument");
  return guarded([&] {
    std::string out = "[";
    for (size_t i = 0; i < run->ledger.adjacency.size(); ++i) {
      if (i) out += ",";
      out += "[";
      for (size_t j = 0; j < run->ledger.adjacency[i].size(); ++j) {
        if (j) out += ",";
        out += std::to_string(run->ledger.adjacency[i][j]);
      }
      out += "]";
    }
    out += "]";
    *out_json = dup_string(out);
  });
}

gdfl_status gdfl_ledger_load(const char* path, gdfl_run** out) {
  if (!path || !out) return bad_arg("gdfl_ledger_load: null argument");
  return guarded([&] {
    auto run = std::make_unique<gdfl_run>();
    run->ledger = gdfl::import_ledger(path);
    *out = run.release();
  });
}

}  // extern "C"
