// gdfl command line front end. All core functionality goes through the C API
// in gdfl.h; this file only parses arguments, patches scenario JSON for
// sweeps, and renders tables.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gdfl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUsage = 64;

using nlohmann::json;

struct ScenarioHandle {
  gdfl_scenario* ptr = nullptr;
  ~ScenarioHandle() { gdfl_scenario_free(ptr); }
};

struct RunHandle {
  gdfl_run* ptr = nullptr;
  ~RunHandle() { gdfl_run_free(ptr); }
};

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { gdfl_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

int exit_code_for(gdfl_status status) {
  switch (status) {
    case GDFL_OK:
      return kExitOk;
    case GDFL_E_PARSE:
    case GDFL_E_SCHEMA:
    case GDFL_E_VALIDATION:
    case GDFL_E_ARG:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

int report_failure(gdfl_status status) {
  std::cerr << "error: " << gdfl_last_error() << "\n";
  return exit_code_for(status);
}

json summary_of(const gdfl_run* run) {
  OwnedString text;
  if (gdfl_run_summary_json(run, &text.ptr) != GDFL_OK) return json::object();
  return json::parse(text.str());
}

void print_summary_header() {
  std::printf("%-22s %5s %6s %12s %12s %12s %12s %12s %12s %12s %12s %8s\n", "run", "K",
              "rounds", "train_kwh", "train_gco2", "agg_kwh", "agg_gco2", "comm_kwh",
              "comm_gco2", "total_kwh", "total_gco2", "f1");
}

void print_summary_row(const std::string& full_label, const json& s) {
  // keep the tail; the leading directories are the least informative part
  const std::string label =
      full_label.size() > 22 ? ".." + full_label.substr(full_label.size() - 20) : full_label;
  const double f1 = s["final_f1"].get<double>();
  std::printf("%-22s %5u %6u %12.5g %12.5g %12.5g %12.5g %12.5g %12.5g %12.5g %12.5g ",
              label.c_str(), s["k"].get<unsigned>(), s["rounds_executed"].get<unsigned>(),
              s["train"]["kwh"].get<double>(), s["train"]["gco2"].get<double>(),
              s["aggregation"]["kwh"].get<double>(), s["aggregation"]["gco2"].get<double>(),
              s["communication"]["kwh"].get<double>(),
              s["communication"]["gco2"].get<double>(), s["total"]["kwh"].get<double>(),
              s["total"]["gco2"].get<double>());
  if (f1 >= 0.0)
    std::printf("%8.4f\n", f1);
  else
    std::printf("%8s\n", "-");
}

int cmd_validate(const std::string& scenario_path, bool adjacency) {
  ScenarioHandle scenario;
  const gdfl_status status = gdfl_scenario_load_file(scenario_path.c_str(), &scenario.ptr);
  if (status != GDFL_OK) return report_failure(status);

  OwnedString fingerprint;
  gdfl_scenario_fingerprint(scenario.ptr, &fingerprint.ptr);
  std::cout << "ok: " << scenario_path << " fingerprint=" << fingerprint.str() << "\n";

  if (adjacency) {
    RunHandle run;
    const gdfl_status rs = gdfl_run_scenario(scenario.ptr, &run.ptr);
    if (rs != GDFL_OK) return report_failure(rs);
    OwnedString adj;
    gdfl_run_adjacency_json(run.ptr, &adj.ptr);
    std::cout << adj.str() << "\n";
  }
  return kExitOk;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const std::string& format) {
  ScenarioHandle scenario;
  gdfl_status status = gdfl_scenario_load_file(scenario_path.c_str(), &scenario.ptr);
  if (status != GDFL_OK) return report_failure(status);

  RunHandle run;
  status = gdfl_run_scenario(scenario.ptr, &run.ptr);
  if (status != GDFL_OK) return report_failure(status);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::string ledger_path =
      (std::filesystem::path(out_dir) / ("ledger." + format)).string();
  status = gdfl_run_export(run.ptr, format.c_str(), ledger_path.c_str());
  if (status != GDFL_OK) return report_failure(status);

  OwnedString summary_text;
  status = gdfl_run_summary_json(run.ptr, &summary_text.ptr);
  if (status != GDFL_OK) return report_failure(status);
  const std::string summary_path =
      (std::filesystem::path(out_dir) / "summary.json").string();
  {
    std::ofstream out(summary_path, std::ios::binary);
    out << summary_text.str();
    if (!out) {
      std::cerr << "error: cannot write " << summary_path << "\n";
      return kExitRuntime;
    }
  }

  OwnedString fingerprint;
  gdfl_run_fingerprint(run.ptr, &fingerprint.ptr);
  std::cout << "wrote " << ledger_path << " and " << summary_path << "\n";
  std::cout << "fingerprint " << fingerprint.str() << "\n";
  print_summary_header();
  print_summary_row(std::filesystem::path(scenario_path).stem().string(),
                    summary_of(run.ptr));
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& ledger_paths, bool force, bool adjacency) {
  std::vector<json> summaries;
  std::vector<std::unique_ptr<RunHandle>> runs;
  for (const auto& path : ledger_paths) {
    auto run = std::make_unique<RunHandle>();
    const gdfl_status status = gdfl_ledger_load(path.c_str(), &run->ptr);
    if (status != GDFL_OK) return report_failure(status);
    summaries.push_back(summary_of(run->ptr));
    runs.push_back(std::move(run));
  }

  for (size_t i = 1; i < summaries.size(); ++i) {
    if (summaries[i]["k"] != summaries[0]["k"] ||
        summaries[i]["rounds_executed"] != summaries[0]["rounds_executed"]) {
      if (!force) {
        std::cerr << "error: " << ledger_paths[i]
                  << " has different K or round count; pass --force to compare anyway\n";
        return kExitValidation;
      }
    }
  }

  print_summary_header();
  for (size_t i = 0; i < summaries.size(); ++i)
    print_summary_row(ledger_paths[i], summaries[i]);

  if (adjacency) {
    OwnedString adj;
    gdfl_run_adjacency_json(runs[0]->ptr, &adj.ptr);
    std::cout << adj.str() << "\n";
  }
  return kExitOk;
}

// --- sweep --------------------------------------------------------------

json builtin_region(const std::string& value) {
  // name or name:ci[:renewable]
  if (value == "ES") return {{"name", "ES"}, {"grid_carbon_intensity", 217.422}, {"renewable_ratio", 0.0}};
  if (value == "CH") return {{"name", "CH"}, {"grid_carbon_intensity", 41.279}, {"renewable_ratio", 0.0}};
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() < 2) return json();
  json region = {{"name", parts[0]},
                 {"grid_carbon_intensity", std::stod(parts[1])},
                 {"renewable_ratio", parts.size() > 2 ? std::stod(parts[2]) : 0.0}};
  return region;
}

bool apply_variation(json& scenario, const std::string& key, const std::string& value) {
  if (key == "medium") {
    for (auto& node : scenario["nodes"]) node["medium"] = {{"kind", value}};
    return true;
  }
  if (key == "region") {
    const json region = builtin_region(value);
    if (region.is_null()) return false;
    for (auto& node : scenario["nodes"]) node["region"] = region;
    return true;
  }
  if (key == "renewable") {
    for (auto& node : scenario["nodes"])
      node["region"]["renewable_ratio"] = std::stod(value);
    return true;
  }
  if (key == "topology") {
    if (value == "full" || value == "fully_connected")
      scenario["topology"] = {{"kind", "fully_connected"}};
    else if (value == "ring")
      scenario["topology"] = {{"kind", "ring"}};
    else if (value == "er" || value == "erdos_renyi")
      scenario["topology"] = {{"kind", "erdos_renyi"}, {"p", 0.5}};
    else
      return false;
    return true;
  }
  if (key == "nodes") {
    const auto count = static_cast<size_t>(std::stoul(value));
    json nodes = json::array();
    for (size_t i = 0; i < count; ++i)
      nodes.push_back(scenario["nodes"][i % scenario["nodes"].size()]);
    scenario["nodes"] = nodes;
    return true;
  }
  if (key == "rounds") {
    scenario["rounds"] = std::stoul(value);
    return true;
  }
  return false;
}

int cmd_sweep(const std::string& scenario_path, const std::string& vary) {
  const auto eq = vary.find('=');
  if (eq == std::string::npos) {
    std::cerr << "error: --vary expects <param>=<v1,v2,...>\n";
    return kExitUsage;
  }
  const std::string key = vary.substr(0, eq);
  std::vector<std::string> values;
  std::stringstream ss(vary.substr(eq + 1));
  std::string value;
  while (std::getline(ss, value, ',')) values.push_back(value);
  if (values.empty()) {
    std::cerr << "error: --vary needs at least one value\n";
    return kExitUsage;
  }

  std::ifstream in(scenario_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << scenario_path << "\n";
    return kExitValidation;
  }
  json base;
  try {
    base = json::parse(in);
  } catch (const json::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  print_summary_header();
  for (const auto& v : values) {
    json variant = base;
    bool ok = false;
    try {
      ok = apply_variation(variant, key, v);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) {
      std::cerr << "error: unsupported sweep parameter or value '" << key << "=" << v
                << "' (supported: medium, region, renewable, topology, nodes, rounds)\n";
      return kExitUsage;
    }

    ScenarioHandle scenario;
    gdfl_status status = gdfl_scenario_load_json(variant.dump().c_str(), &scenario.ptr);
    if (status != GDFL_OK) return report_failure(status);
    RunHandle run;
    status = gdfl_run_scenario(scenario.ptr, &run.ptr);
    if (status != GDFL_OK) return report_failure(status);
    print_summary_row(key + "=" + v, summary_of(run.ptr));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic DFL energy / carbon simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "gdfl_out";
  std::string format = "csv";
  std::string vary;
  std::vector<std::string> ledger_paths;
  std::string compare_base;
  std::vector<std::string> compare_extra;
  bool force = false;
  bool adjacency = false;

  auto* run_cmd = app.add_subcommand("run", "execute a scenario and write its ledger");
  run_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (default gdfl_out)");
  run_cmd->add_option("--format", format, "ledger format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* validate_cmd = app.add_subcommand("validate", "check a scenario file");
  validate_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  validate_cmd->add_flag("--adjacency", adjacency, "also print the topology as JSON");

  auto* report_cmd = app.add_subcommand("report", "summarize exported ledgers");
  report_cmd->add_option("--ledger", compare_base, "ledger file (csv or json)")->required();
  report_cmd->add_option("--compare", compare_extra, "more ledgers to compare");
  report_cmd->add_flag("--force", force, "compare even if K or rounds differ");
  report_cmd->add_flag("--adjacency", adjacency, "print the first ledger's topology");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a one-dimensional parameter sweep");
  sweep_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  sweep_cmd->add_option("--vary", vary, "<param>=<v1,v2,...>")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(scenario_path, out_dir, format);
    if (validate_cmd->parsed()) return cmd_validate(scenario_path, adjacency);
    if (report_cmd->parsed()) {
      ledger_paths.push_back(compare_base);
      ledger_paths.insert(ledger_paths.end(), compare_extra.begin(), compare_extra.end());
      return cmd_report(ledger_paths, force, adjacency);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(scenario_path, vary);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
