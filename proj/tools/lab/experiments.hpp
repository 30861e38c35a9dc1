#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace lab {

/// One verdict with the number it was decided on. `relation` reads as
/// "value <relation> threshold", e.g. "<=".
struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string relation;
  double threshold = 0.0;
  std::string detail;
};

struct Table {
  std::string name;     // file stem
  std::string csv;      // full file content, header first
  std::size_t rows = 0;
};

struct Report {
  nlohmann::json summary = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<Table> tables;
};

/// Runs the configured experiment. Library errors propagate; numeric
/// failures carry the seed and stream of the offending realization.
Report run_experiment(const Config& config, unsigned workers);

}  // namespace lab
