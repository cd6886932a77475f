#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucpdil/ergodic.hpp"

namespace ucpdil {

struct ObservablePair {
  Mat a;
  Mat b;
  std::string label;
};

struct Scenario {
  std::string name;
  nlohmann::json channel;
  std::string algebra = "full";  // full | diagonal | custom
  std::vector<Mat> algebra_basis;
  std::optional<Mat> density;    // empty: auto-invariant
  std::vector<std::string> suites;
  std::vector<ObservablePair> pairs;
  int levels = 4;
  int window = 3;
  int n_max = 400;
  int instances = 10;
  std::optional<double> tolerance;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s = {"stinespring", "tower", "nagy",
                                             "strings", "ergodic", "dilated"};
  return s;
}

/// Throws Error(InvalidInput) on schema violations.
Scenario parse_scenario(const nlohmann::json& j);
UcpMap build_channel(const nlohmann::json& spec, std::uint64_t default_seed);
/// Matrix literal: rows of numbers or [re, im] pairs, or one of the names
/// identity, pauli_x, pauli_y, pauli_z, unit:i,j.
Mat parse_matrix(const nlohmann::json& j, int d);

struct PropertyRow {
  std::string property;
  std::string anchor;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CsvFile {
  std::string filename;
  std::string contents;
};

struct RunOutput {
  nlohmann::ordered_json report;
  std::vector<CsvFile> csv;
  bool pass = true;
};

/// Executes the suites in declared order. Timing lives under
/// environment.timing so the rest of the report is reproducible.
RunOutput run_scenario(const Scenario& s);

std::string csv_from_report(const ErgodicReport& r);

}  // namespace ucpdil
