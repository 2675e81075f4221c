#include "histotest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "histotest/hard_instances.hpp"
#include "histotest/instances.hpp"
#include "histotest/model_select.hpp"

namespace histotest {

const char* to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::Test: return "test";
    case Mode::GenHard: return "gen-hard";
    case Mode::SelectK: return "select-k";
    case Mode::Bench: return "bench";
  }
  return "?";
}

const char* to_string(InstanceKind kind) noexcept {
  switch (kind) {
    case InstanceKind::Uniform: return "uniform";
    case InstanceKind::RandomKHist: return "random-khist";
    case InstanceKind::Zigzag: return "zigzag";
    case InstanceKind::HardYes: return "hard-yes";
    case InstanceKind::HardNo: return "hard-no";
    case InstanceKind::File: return "file";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("bad integer for " + key + ": '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("bad number for " + key + ": '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument("bad boolean for " + key + ": '" + text + "'");
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "mode") {
    if (value == "test") mode = Mode::Test;
    else if (value == "gen-hard") mode = Mode::GenHard;
    else if (value == "select-k") mode = Mode::SelectK;
    else if (value == "bench") mode = Mode::Bench;
    else throw std::invalid_argument("unknown mode '" + value + "'");
  } else if (key == "n") {
    n = parse_integer<std::size_t>(key, value);
  } else if (key == "k") {
    k = parse_integer<std::size_t>(key, value);
  } else if (key == "eps") {
    eps = parse_real(key, value);
  } else if (key == "delta") {
    delta = parse_real(key, value);
  } else if (key == "trials") {
    trials = parse_integer<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "instance") {
    if (value == "uniform") instance = InstanceKind::Uniform;
    else if (value == "random-khist") instance = InstanceKind::RandomKHist;
    else if (value == "zigzag") instance = InstanceKind::Zigzag;
    else if (value == "hard-yes") instance = InstanceKind::HardYes;
    else if (value == "hard-no") instance = InstanceKind::HardNo;
    else if (value == "file") instance = InstanceKind::File;
    else throw std::invalid_argument("unknown instance '" + value + "'");
  } else if (key == "instance-file") {
    instance_file = value;
  } else if (key == "c-sieve") {
    c_sieve = parse_real(key, value);
  } else if (key == "c-test") {
    c_test = parse_real(key, value);
  } else if (key == "c-mass") {
    c_mass = parse_real(key, value);
  } else if (key == "cheb-c") {
    cheb_c = parse_real(key, value);
  } else if (key == "cheb-big-c") {
    cheb_big_c = parse_real(key, value);
  } else if (key == "refine") {
    refine = parse_bool(key, value);
  } else if (key == "jobs") {
    jobs = parse_integer<std::size_t>(key, value);
  } else if (key == "timing") {
    timing = parse_bool(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "json") {
    json = value;
  } else if (key == "sweep") {
    sweep = value;
  } else {
    throw std::invalid_argument("unknown key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (k < 1 || k > n) throw std::invalid_argument("k must be in [1, n]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  for (double c : {c_sieve, c_test, c_mass, cheb_c, cheb_big_c}) {
    if (!(c > 0.0)) throw std::invalid_argument("constants must be positive");
  }
  if (instance == InstanceKind::File && instance_file.empty()) {
    throw std::invalid_argument("instance=file needs instance-file");
  }
  if (mode == Mode::GenHard && !(eps <= 0.1)) {
    throw std::invalid_argument("gen-hard needs eps <= 0.1");
  }
  if ((mode == Mode::GenHard || instance == InstanceKind::HardYes ||
       instance == InstanceKind::HardNo) &&
      k >= n) {
    throw std::invalid_argument("hard instances need k < n");
  }
  if (mode == Mode::Bench && sweep.find('=') == std::string::npos) {
    throw std::invalid_argument("bench needs sweep=param=v1,v2,...");
  }
}

TesterConfig ExperimentConfig::tester_config() const {
  TesterConfig t;
  t.sieve.sample_constant = c_sieve;
  t.tolerant.sample_constant = c_test;
  t.mass_constant = c_mass;
  return t;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"mode", to_string(mode)},
          {"n", n},
          {"k", k},
          {"eps", eps},
          {"delta", delta},
          {"trials", trials},
          {"seed", seed},
          {"instance", to_string(instance)},
          {"instance-file", instance_file},
          {"c-sieve", c_sieve},
          {"c-test", c_test},
          {"c-mass", c_mass},
          {"cheb-c", cheb_c},
          {"cheb-big-c", cheb_big_c},
          {"refine", refine},
          {"jobs", jobs},
          {"timing", timing},
          {"sweep", sweep}};
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(number) + ": expected key=value");
    }
    try {
      base.set(trim(text.substr(0, eq)), text.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return base;
}

LoadedPmf load_pmf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read pmf file " + path);
  std::vector<double> weights;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty()) continue;
    double v = 0.0;
    try {
      v = parse_real("entry", text);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(path + ":" + std::to_string(number) + ": not a number");
    }
    if (v < 0.0) {
      throw std::invalid_argument(path + ":" + std::to_string(number) + ": negative entry");
    }
    weights.push_back(v);
  }
  if (weights.empty()) throw std::invalid_argument(path + ": empty file");
  LoadedPmf out;
  out.raw_total = pairwise_sum(weights);
  if (!(out.raw_total > 0.0)) throw std::invalid_argument(path + ": total mass is zero");
  out.pmf = Pmf::normalized(std::move(weights));
  return out;
}

namespace {

// Fixed part of an instance, shared by all trials.
struct InstanceCache {
  Instance fixed;
  bool random = false;
};

InstanceCache prepare_instance(const ExperimentConfig& config) {
  InstanceCache cache;
  switch (config.instance) {
    case InstanceKind::Uniform:
      cache.fixed.pmf = Pmf::uniform(config.n);
      cache.fixed.true_k = 1;
      cache.fixed.true_distance = 0.0;
      break;
    case InstanceKind::Zigzag: {
      auto z = certified_zigzag(config.n, config.k, config.eps);
      cache.fixed.pmf = std::move(z.pmf);
      cache.fixed.true_k = z.blocks;
      cache.fixed.true_distance = z.certified_distance;
      break;
    }
    case InstanceKind::File: {
      cache.fixed.pmf = load_pmf_file(config.instance_file).pmf;
      cache.fixed.true_k = cache.fixed.pmf.piece_count();
      break;
    }
    default:
      cache.random = true;
  }
  return cache;
}

Instance random_instance(const ExperimentConfig& config, RngStream& rng) {
  Instance inst;
  switch (config.instance) {
    case InstanceKind::RandomKHist:
      inst.pmf = random_khistogram(config.n, config.k, rng);
      inst.true_k = config.k;
      inst.true_distance = 0.0;
      break;
    case InstanceKind::HardYes:
    case InstanceKind::HardNo: {
      const double weight = std::min(config.eps, 0.1);
      const auto pair = generate_hard_pair(config.n, config.k, weight, rng, config.cheb_c,
                                           config.cheb_big_c);
      const Measure& m = config.instance == InstanceKind::HardYes ? pair.h : pair.h_prime;
      inst.pmf = Pmf::normalized(std::vector<double>(m.values().begin(), m.values().end()));
      inst.true_k = inst.pmf.piece_count();
      if (config.instance == InstanceKind::HardYes && pair.diagnostics.h_is_khistogram) {
        inst.true_distance = 0.0;
      }
      break;
    }
    default:
      throw std::logic_error("not a random instance");
  }
  return inst;
}

ReportRow run_trial(const ExperimentConfig& config, const InstanceCache& cache,
                    std::size_t trial) {
  ReportRow row;
  row.trial = trial;
  row.seed = trial_seed(config.seed, trial);
  RngStream rng(row.seed);
  RngStream instance_rng = rng.fork();
  const Instance inst = cache.random ? random_instance(config, instance_rng) : cache.fixed;
  row.true_k = inst.true_k;
  row.true_distance = inst.true_distance;

  PmfSource source(inst.pmf);
  const auto start = std::chrono::steady_clock::now();
  if (config.mode == Mode::SelectK) {
    SelectConfig select;
    select.tester = config.tester_config();
    select.refine = config.refine;
    const SelectionResult result = select_k(source, config.eps, config.delta, rng, select);
    row.verdict = "k=" + std::to_string(result.selected);
    row.samples_total = result.total_samples;
    row.iterations = result.probes.size();
  } else {
    const TestVerdict result = test_histogram(source, config.k, config.eps, rng,
                                              config.tester_config());
    const auto& d = result.diagnostics;
    row.verdict = to_string(result.verdict);
    row.samples_divide = d.samples_divide;
    row.samples_sieve = d.samples_sieve;
    row.samples_mass = d.samples_mass;
    row.samples_test = d.samples_test;
    row.samples_total = d.samples_total;
    row.iterations = d.iterations;
    row.reason = d.reason;
    if (row.samples_total != source.samples_drawn()) {
      throw std::logic_error("sample tally mismatch");
    }
  }
  if (config.timing) {
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            start)
                      .count();
  }
  return row;
}

}  // namespace

Instance make_instance(const ExperimentConfig& config, RngStream& rng) {
  const InstanceCache cache = prepare_instance(config);
  return cache.random ? random_instance(config, rng) : cache.fixed;
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.mode != Mode::Test && config.mode != Mode::SelectK) {
    throw std::invalid_argument("run_experiment handles test and select-k modes");
  }
  std::vector<ReportRow> rows(config.trials);
  if (config.trials == 0) return rows;
  const InstanceCache cache = prepare_instance(config);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      try {
        rows[t] = run_trial(config, cache, t);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(config.jobs, config.trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "trial,seed,verdict,samples_divide,samples_sieve,samples_mass,samples_test,"
        "samples_total,wall_ms\n";
  for (const auto& r : rows) {
    os << r.trial << ',' << r.seed << ',' << r.verdict << ',' << r.samples_divide << ','
       << r.samples_sieve << ',' << r.samples_mass << ',' << r.samples_test << ','
       << r.samples_total << ',' << std::fixed << std::setprecision(3) << r.wall_ms << '\n';
    os.unsetf(std::ios::floatfield);
  }
}

namespace {

nlohmann::json row_json(const ReportRow& r) {
  nlohmann::json j = {{"trial", r.trial},
                      {"seed", r.seed},
                      {"verdict", r.verdict},
                      {"samples_divide", r.samples_divide},
                      {"samples_sieve", r.samples_sieve},
                      {"samples_mass", r.samples_mass},
                      {"samples_test", r.samples_test},
                      {"samples_total", r.samples_total},
                      {"wall_ms", r.wall_ms},
                      {"iterations", r.iterations},
                      {"reason", r.reason}};
  j["true_k"] = r.true_k == 0 ? nlohmann::json(nullptr) : nlohmann::json(r.true_k);
  j["true_distance"] =
      r.true_distance < 0.0 ? nlohmann::json(nullptr) : nlohmann::json(r.true_distance);
  return j;
}

}  // namespace

nlohmann::json report_json(const ExperimentConfig& config, const std::vector<ReportRow>& rows) {
  nlohmann::json out = {{"schema_version", kReportSchemaVersion}, {"config", config.to_json()}};
  out["rows"] = nlohmann::json::array();
  for (const auto& r : rows) out["rows"].push_back(row_json(r));
  return out;
}

std::vector<BenchPoint> run_bench(const ExperimentConfig& config) {
  config.validate();
  const auto eq = config.sweep.find('=');
  const std::string param = trim(config.sweep.substr(0, eq));
  std::vector<std::string> values;
  std::stringstream list(config.sweep.substr(eq + 1));
  for (std::string v; std::getline(list, v, ',');) {
    if (!trim(v).empty()) values.push_back(trim(v));
  }
  if (values.empty()) throw std::invalid_argument("sweep has no values");

  std::vector<BenchPoint> points;
  for (const auto& v : values) {
    ExperimentConfig point_config = config;
    point_config.mode = Mode::Test;
    point_config.sweep.clear();
    point_config.set(param, v);
    BenchPoint p;
    p.param = param;
    p.value = v;
    p.rows = run_experiment(point_config);
    p.trials = p.rows.size();
    for (const auto& r : p.rows) {
      p.accept_rate += r.verdict == "accept" ? 1.0 : 0.0;
      p.mean_samples_total += static_cast<double>(r.samples_total);
      p.mean_wall_ms += r.wall_ms;
    }
    if (p.trials > 0) {
      const double t = static_cast<double>(p.trials);
      p.accept_rate /= t;
      p.mean_samples_total /= t;
      p.mean_wall_ms /= t;
    }
    points.push_back(std::move(p));
  }
  return points;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchPoint>& points) {
  os << "sweep_param,sweep_value,trials,accept_rate,mean_samples_total,mean_wall_ms\n";
  for (const auto& p : points) {
    os << p.param << ',' << p.value << ',' << p.trials << ',' << std::setprecision(6)
       << p.accept_rate << ',' << std::fixed << std::setprecision(1) << p.mean_samples_total
       << ',' << std::setprecision(3) << p.mean_wall_ms << '\n';
    os.unsetf(std::ios::floatfield);
  }
}

nlohmann::json bench_json(const ExperimentConfig& config, const std::vector<BenchPoint>& points) {
  nlohmann::json out = {{"schema_version", kReportSchemaVersion}, {"config", config.to_json()}};
  out["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json jp = {{"param", p.param},
                         {"value", p.value},
                         {"trials", p.trials},
                         {"accept_rate", p.accept_rate},
                         {"mean_samples_total", p.mean_samples_total},
                         {"mean_wall_ms", p.mean_wall_ms}};
    jp["rows"] = nlohmann::json::array();
    for (const auto& r : p.rows) jp["rows"].push_back(row_json(r));
    out["points"].push_back(std::move(jp));
  }
  return out;
}

nlohmann::json hard_pair_json(const ExperimentConfig& config) {
  config.validate();
  RngStream rng(config.seed);
  const HardPair pair =
      generate_hard_pair(config.n, config.k, config.eps, rng, config.cheb_c, config.cheb_big_c);
  const auto& d = pair.diagnostics;
  const auto h = pair.h.values();
  const auto hp = pair.h_prime.values();
  return {{"n", config.n},
          {"k", config.k},
          {"eps", config.eps},
          {"H", std::vector<double>(h.begin(), h.end())},
          {"H_prime", std::vector<double>(hp.begin(), hp.end())},
          {"diagnostics",
           {{"degree", pair.pair.d},
            {"scale", pair.pair.scale},
            {"exceptional", d.exceptional},
            {"h_pieces", d.h_pieces},
            {"h_is_khistogram", d.h_is_khistogram},
            {"right_border_pairs", d.right_border_pairs},
            {"nu_h", d.nu_h},
            {"nu_h_prime", d.nu_h_prime},
            {"support_constant", d.support_constant},
            {"mean_constant", d.mean_constant}}}};
}

}  // namespace histotest
