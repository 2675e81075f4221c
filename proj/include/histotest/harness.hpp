#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "histotest/dist_core.hpp"
#include "histotest/rng.hpp"
#include "histotest/tester.hpp"

namespace histotest {

inline constexpr int kReportSchemaVersion = 1;

enum class Mode { Test, GenHard, SelectK, Bench };
enum class InstanceKind { Uniform, RandomKHist, Zigzag, HardYes, HardNo, File };

const char* to_string(Mode mode) noexcept;
const char* to_string(InstanceKind kind) noexcept;

/// Every setting has a key usable both in a key=value config file and as a
/// `--key` flag. Keys: mode n k eps delta trials seed instance instance-file
/// c-sieve c-test c-mass cheb-c cheb-big-c refine jobs timing out json sweep.
struct ExperimentConfig {
  Mode mode = Mode::Test;
  std::size_t n = 1000;
  std::size_t k = 1;
  double eps = 0.25;
  double delta = 0.1;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  InstanceKind instance = InstanceKind::Uniform;
  std::string instance_file;
  double c_sieve = 40.0;
  double c_test = 2000.0;
  double c_mass = 100.0;
  double cheb_c = 2.0;
  double cheb_big_c = 40.0;
  bool refine = false;
  std::size_t jobs = 1;
  /// When false, wall_ms is written as 0 so reports are byte-reproducible.
  bool timing = true;
  std::string out;   // CSV path; empty means stdout
  std::string json;  // JSON report path; empty means none
  /// Bench only: "param=v1,v2,...".
  std::string sweep;

  /// Throws std::invalid_argument for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  /// Throws std::invalid_argument when a field is outside its range.
  void validate() const;
  [[nodiscard]] TesterConfig tester_config() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Applies a flat key=value file on top of `base`. Blank lines and lines
/// starting with '#' are skipped. Errors carry the line number.
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

struct LoadedPmf {
  Pmf pmf;
  double raw_total = 0.0;  // sum before normalization
};

/// One non-negative decimal per line. Errors carry the line number.
LoadedPmf load_pmf_file(const std::string& path);

struct Instance {
  Pmf pmf;
  std::size_t true_k = 0;          // 0 when unknown
  double true_distance = -1.0;     // distance (lower bound for zigzag); < 0 when unknown
};

/// Builds the configured instance for one trial; random families draw from `rng`.
Instance make_instance(const ExperimentConfig& config, RngStream& rng);

struct ReportRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string verdict;  // accept / reject; select-k writes "k=<K>"
  std::uint64_t samples_divide = 0;
  std::uint64_t samples_sieve = 0;
  std::uint64_t samples_mass = 0;
  std::uint64_t samples_test = 0;
  std::uint64_t samples_total = 0;
  double wall_ms = 0.0;
  std::size_t true_k = 0;
  double true_distance = -1.0;
  std::size_t iterations = 0;
  std::string reason;
};

/// `trials` independent runs with seeds seed ^ trial, in trial order.
/// Mode must be test or select-k.
std::vector<ReportRow> run_experiment(const ExperimentConfig& config);

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows);
nlohmann::json report_json(const ExperimentConfig& config, const std::vector<ReportRow>& rows);

struct BenchPoint {
  std::string param;
  std::string value;
  std::size_t trials = 0;
  double accept_rate = 0.0;
  double mean_samples_total = 0.0;
  double mean_wall_ms = 0.0;
  std::vector<ReportRow> rows;
};

/// Runs the test mode once per sweep value.
std::vector<BenchPoint> run_bench(const ExperimentConfig& config);
void write_bench_csv(std::ostream& os, const std::vector<BenchPoint>& points);
nlohmann::json bench_json(const ExperimentConfig& config, const std::vector<BenchPoint>& points);

/// gen-hard output: n, k, eps, H, H_prime, diagnostics.
nlohmann::json hard_pair_json(const ExperimentConfig& config);

}  // namespace histotest
