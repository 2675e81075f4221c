// histotest: command-line front end for the k-histogram tester.
//
//   histotest test     --n 1000 --k 5 --eps 0.25 --trials 60 --instance random-khist
//   histotest gen-hard --n 2048 --k 8 --eps 0.05 --out pair.json
//   histotest select-k --n 1000 --eps 0.25 --delta 0.1 --instance random-khist --k 4
//   histotest bench    --n 1000 --k 4 --sweep eps=0.4,0.3,0.2 --out bench.csv
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "histotest/harness.hpp"

namespace {

using histotest::ExperimentConfig;

// Flags that mirror config keys; values are applied through
// ExperimentConfig::set so the file and the command line share validation.
const char* const kValueKeys[] = {"n",      "k",      "eps",        "delta",      "trials",
                                  "seed",   "instance", "instance-file", "c-sieve", "c-test",
                                  "c-mass", "cheb-c", "cheb-big-c", "jobs",       "out",
                                  "json",   "sweep"};

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> values;
  bool refine = false;
  bool no_timing = false;
};

void add_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file (flags override it)");
  for (const char* key : kValueKeys) {
    cmd->add_option(std::string("--") + key, flags.values[key]);
  }
  cmd->add_flag("--refine", flags.refine, "select-k: linear refinement pass");
  cmd->add_flag("--no-timing", flags.no_timing, "write wall_ms = 0 for reproducible reports");
}

ExperimentConfig resolve(const CLI::App* cmd, const Flags& flags, histotest::Mode mode) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) config = histotest::load_config_file(flags.config_path);
  config.mode = mode;
  for (const char* key : kValueKeys) {
    if (cmd->count(std::string("--") + key) > 0) config.set(key, flags.values.at(key));
  }
  if (flags.refine) config.refine = true;
  if (flags.no_timing) config.timing = false;
  config.validate();
  return config;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int run(const ExperimentConfig& config) {
  std::ostringstream csv;
  switch (config.mode) {
    case histotest::Mode::Test:
    case histotest::Mode::SelectK: {
      const auto rows = histotest::run_experiment(config);
      histotest::write_csv(csv, rows);
      emit(config.out, csv.str());
      if (!config.json.empty()) emit(config.json, histotest::report_json(config, rows).dump(2));
      break;
    }
    case histotest::Mode::Bench: {
      const auto points = histotest::run_bench(config);
      histotest::write_bench_csv(csv, points);
      emit(config.out, csv.str());
      if (!config.json.empty()) emit(config.json, histotest::bench_json(config, points).dump(2));
      break;
    }
    case histotest::Mode::GenHard:
      emit(config.out, histotest::hard_pair_json(config).dump(2) + "\n");
      break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-histogram property tester"};
  app.require_subcommand(1);

  const std::pair<const char*, histotest::Mode> modes[] = {
      {"test", histotest::Mode::Test},
      {"gen-hard", histotest::Mode::GenHard},
      {"select-k", histotest::Mode::SelectK},
      {"bench", histotest::Mode::Bench}};
  std::map<std::string, Flags> flags;
  std::map<std::string, CLI::App*> commands;
  for (const auto& [name, mode] : modes) {
    commands[name] = app.add_subcommand(name);
    add_flags(commands[name], flags[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ExperimentConfig config;
  try {
    for (const auto& [name, mode] : modes) {
      if (commands[name]->parsed()) config = resolve(commands[name], flags[name], mode);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "histotest: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "histotest: " << e.what() << '\n';
    return 2;
  }

  try {
    return run(config);
  } catch (const std::exception& e) {
    std::cerr << "histotest: " << e.what() << '\n';
    return 2;
  }
}
