#pragma once

// Strict experiment configuration: every key is typed and range-checked,
// unknown keys are rejected, and defaults are written back so the normalized
// document fully describes a run.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "anderson/approx.hpp"
#include "anderson/gauge.hpp"
#include "anderson/interval.hpp"
#include "anderson/potential.hpp"

namespace lab {

using nlohmann::json;

/// Invalid configuration; `path` names the offending field.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

enum class Experiment {
  lyapunov, ids, wegner, minami, localization, blockmatch, khinchin, jarnik, nonlyap, propa
};

const std::vector<std::pair<Experiment, std::string_view>>& experiment_names();
std::string_view to_string(Experiment e);
/// One-line description for list-experiments.
std::string_view describe(Experiment e);

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 0;
  std::vector<double> values() const;
};

struct Config {
  Experiment experiment = Experiment::lyapunov;
  std::uint64_t master_seed = 0;
  unsigned workers = 0;
  std::size_t trials = 0;
  std::string output_dir;

  std::optional<anderson::PotentialDistribution> distribution;
  std::optional<anderson::Interval> interval;
  std::optional<anderson::ApproxSequence> alpha;
  std::optional<anderson::GaugeFunction> gauge;
  std::optional<GridSpec> energies;
  double grid_step = 0.0;  // ids / wegner

  // sizes
  std::size_t n = 0;        // chain length or box length
  std::size_t L = 0;        // block length
  unsigned m = 0;           // dyadic level
  std::size_t K = 0;        // series / khinchin horizon
  std::size_t k_lo = 0, k_hi = 0;
  std::size_t padding = 0;
  std::vector<std::size_t> checkpoints;
  std::vector<std::size_t> counting_L;

  double tau = 0.0;
  double decay_K = 0.0;
  double tol = 0.0;
  unsigned r = 0;
  std::size_t gamma_n = 0;       // chain length for the gamma_hat table
  std::size_t gamma_trials = 0;
  std::size_t gamma_points = 0;

  json normalized;  // the document with defaults filled in
};

/// Parses and validates a configuration document. Throws ConfigError.
Config parse_config(const json& doc);

/// Reads a file and parses it; a missing or malformed file is a ConfigError
/// with an empty path.
Config load_config(const std::string& path);

}  // namespace lab
