#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "anderson/errors.hpp"
#include "anderson/parallel.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"
#include "schema.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kNumeric = 3, kIo = 4 };

constexpr const char* kEnvOutput = "ANDERSON_LAB_OUTPUT_DIR";
constexpr const char* kEnvWorkers = "ANDERSON_LAB_WORKERS";

std::string input_hash(const lab::Config& c) { return lab::git_blob_sha1(c.normalized.dump()); }

unsigned workers_for(const lab::Config& c) {
  const char* env = std::getenv(kEnvWorkers);
  if (!env || !*env) return c.workers;
  std::size_t used = 0;
  unsigned long w = 0;
  try {
    w = std::stoul(env, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || env[used] != '\0' || w > 4096)
    throw lab::ConfigError(std::string("env:") + kEnvWorkers, "expected an integer in [0, 4096]");
  return static_cast<unsigned>(w);
}

fs::path output_dir_for(const lab::Config& c) {
  const char* env = std::getenv(kEnvOutput);
  return env && *env ? fs::path(env) : fs::path(c.output_dir);
}

json report_document(const lab::Config& c, const lab::Report& r) {
  json checks = json::array();
  bool pass = true;
  for (const auto& ch : r.checks) {
    pass = pass && ch.pass;
    checks.push_back({{"name", ch.name},
                      {"pass", ch.pass},
                      {"value", std::isfinite(ch.value) ? json(ch.value) : json(nullptr)},
                      {"relation", ch.relation},
                      {"threshold", ch.threshold},
                      {"detail", ch.detail}});
  }
  json tables = json::array();
  for (const auto& t : r.tables)
    tables.push_back({{"name", t.name},
                      {"file", t.name + ".csv"},
                      {"rows", t.rows},
                      {"sha1", lab::git_blob_sha1(t.csv)}});
  return {{"format", "anderson_lab.report.v1"},
          {"experiment", std::string(lab::to_string(c.experiment))},
          {"config", c.normalized},
          {"input_hash", input_hash(c)},
          {"pass", pass},
          {"checks", checks},
          {"summary", r.summary},
          {"tables", tables}};
}

int cmd_run(const std::string& path) {
  const auto config = lab::load_config(path);
  const unsigned workers = workers_for(config);
  const fs::path dir = output_dir_for(config);

  const auto t0 = std::chrono::steady_clock::now();
  const auto report = lab::run_experiment(config, workers);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const json doc = report_document(config, report);
  for (const auto& t : report.tables) lab::write_atomic(dir / (t.name + ".csv"), t.csv);
  lab::write_atomic(dir / "report.json", doc.dump(2) + "\n");
  const json timing{{"wall_seconds", wall},
                    {"workers", workers == 0 ? anderson::default_workers() : workers}};
  lab::write_atomic(dir / "timing.json", timing.dump(2) + "\n");

  std::cout << lab::to_string(config.experiment) << ": " << (doc["pass"].get<bool>() ? "PASS" : "FAIL")
            << "\n";
  for (const auto& ch : report.checks)
    std::cout << "  " << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << ch.value << ' '
              << ch.relation << ' ' << ch.threshold << "\n";
  std::cout << "  report: " << (dir / "report.json").string() << "  (" << wall << " s)\n";
  return kOk;
}

int cmd_validate(const std::string& path) {
  const auto config = lab::load_config(path);
  workers_for(config);
  std::cout << "ok: " << lab::to_string(config.experiment) << " " << input_hash(config) << "\n"
            << config.normalized.dump(2) << "\n";
  return kOk;
}

int guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const anderson::PreconditionError& e) {
    std::cerr << "config error: precondition: " << e.what() << "\n";
    return kConfig;
  } catch (const anderson::InvalidDistribution& e) {
    std::cerr << "config error: distribution: " << e.what() << "\n";
    return kConfig;
  } catch (const anderson::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << " (index " << e.index() << ")";
    if (e.has_origin()) std::cerr << " seed=" << e.seed() << " stream=" << e.stream();
    std::cerr << "\n";
    return kNumeric;
  } catch (const lab::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const anderson::Error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on the one-dimensional Anderson model"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "JSON config")->required();
  auto* validate = app.add_subcommand("validate", "check a config file and print it normalized");
  validate->add_option("config", config_path, "JSON config")->required();
  auto* schema = app.add_subcommand("schema", "print the config schema");
  auto* list = app.add_subcommand("list-experiments", "list experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*run) return guarded([&] { return cmd_run(config_path); });
  if (*validate) return guarded([&] { return cmd_validate(config_path); });
  if (*schema) {
    std::cout << lab::kConfigSchema;
    return kOk;
  }
  if (*list) {
    for (const auto& [e, name] : lab::experiment_names())
      std::cout << name << "\t" << lab::describe(e) << "\n";
    return kOk;
  }
  return kConfig;
}
