#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ucpdil/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInvalid = 2;

int report_error(const std::string& kind, const std::string& message) {
  nlohmann::ordered_json err;
  err["error"] = {{"kind", kind}, {"message", message}};
  std::cout << err.dump(2) << '\n';
  return kExitInvalid;
}

std::vector<fs::path> bundled_scenarios() {
  std::vector<fs::path> out;
  const fs::path dir(UCPDIL_SCENARIO_DIR);
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void list_presets() {
  for (const auto& p : ucpdil::presets::catalog()) {
    std::cout << p.name << "\n  " << p.description << "\n  exercises:";
    for (size_t i = 0; i < p.exercises.size(); ++i) std::cout << (i ? "; " : " ") << p.exercises[i];
    std::cout << '\n';
  }
  std::cout << "\nbundled scenarios:\n";
  for (const auto& path : bundled_scenarios()) std::cout << "  " << path.stem().string() << '\n';
}

struct RunArgs {
  std::string scenario;
  std::string out = "out";
  std::optional<int> levels;
  std::optional<int> window;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> suites;
};

fs::path resolve_scenario(const std::string& arg) {
  fs::path p(arg);
  if (fs::exists(p)) return p;
  const fs::path bundled = fs::path(UCPDIL_SCENARIO_DIR) / (arg + ".json");
  if (fs::exists(bundled)) return bundled;
  return p;
}

int run(const RunArgs& args) {
  const fs::path path = resolve_scenario(args.scenario);
  std::ifstream in(path);
  if (!in) return report_error("InvalidInput", "cannot open scenario " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    return report_error("ParseError", e.what());
  }

  ucpdil::RunOutput out;
  try {
    if (args.seed && j.is_object()) j["seed"] = *args.seed;
    ucpdil::Scenario s = ucpdil::parse_scenario(j);
    if (args.levels) s.levels = *args.levels;
    if (args.window) s.window = *args.window;
    if (args.tol) s.tolerance = *args.tol;
    if (!args.suites.empty()) s.suites = args.suites;
    out = ucpdil::run_scenario(s);
  } catch (const ucpdil::Error& e) {
    return report_error(std::string(ucpdil::to_string(e.kind())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return report_error("InvalidInput", e.what());
  }

  std::error_code ec;
  fs::create_directories(args.out, ec);
  if (ec) return report_error("InvalidInput", "cannot create " + args.out + ": " + ec.message());
  std::ofstream(fs::path(args.out) / "report.json") << out.report.dump(2) << '\n';
  for (const auto& f : out.csv) std::ofstream(fs::path(args.out) / f.filename) << f.contents;

  for (const auto& suite : out.report["suites"]) {
    std::cout << (suite["pass"].get<bool>() ? "PASS " : "FAIL ") << suite["name"].get<std::string>() << '\n';
    for (const auto& p : suite["properties"]) {
      if (!p["pass"].get<bool>()) {
        std::cout << "  " << p["property"].get<std::string>() << ": residual "
                  << p["residual"].get<double>() << " > " << p["tolerance"].get<double>() << '\n';
      }
    }
  }
  return out.pass ? kExitPass : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stinespring and Nagy dilations of unital completely positive maps"};
  app.require_subcommand(1);

  RunArgs args;
  auto* run_cmd = app.add_subcommand("run", "run a scenario and write report.json and CSV files");
  run_cmd->add_option("--scenario", args.scenario, "scenario JSON path or bundled scenario name")->required();
  run_cmd->add_option("--out", args.out, "output directory");
  run_cmd->add_option("--levels", args.levels, "tower depth N");
  run_cmd->add_option("--window", args.window, "largest exact Vhat power K");
  run_cmd->add_option("--tol", args.tol, "override every property tolerance");
  run_cmd->add_option("--seed", args.seed, "random seed");
  run_cmd->add_option("--suite", args.suites, "suite to run (repeatable)");

  app.add_subcommand("list-presets", "list channel presets and bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (app.got_subcommand("list-presets")) {
    list_presets();
    return kExitPass;
  }
  return run(args);
}
