#include "histotest/tester.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

#include "histotest/interval_estimator.hpp"

namespace histotest {

const char* to_string(Verdict verdict) noexcept {
  return verdict == Verdict::Accept ? "accept" : "reject";
}

TolerantTestResult tolerant_identity_test(SampleSource& source, const Measure& p_hat, double eps,
                                          RngStream& rng, const TolerantTestConfig& config) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0, 1)");
  if (config.repetitions == 0) throw std::invalid_argument("need at least one repetition");
  const std::size_t n = source.domain_size();
  if (p_hat.size() != n) throw std::invalid_argument("p_hat and sampler domains differ");

  const double nn = static_cast<double>(n);
  TolerantTestResult out;
  out.rate = std::ceil(config.sample_constant * std::sqrt(nn) / (eps * eps));
  out.threshold = config.threshold_fraction * out.rate * eps * eps;

  const double floor_level = eps / (50.0 * nn);
  std::vector<std::size_t> support;
  for (std::size_t i = 1; i <= n; ++i) {
    if (p_hat.at(i) >= floor_level) support.push_back(i);
  }
  out.support_size = support.size();

  const std::uint64_t before = source.samples_drawn();
  std::size_t accepts = 0;
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    double z = 0.0;
    if (!support.empty()) {
      std::poisson_distribution<std::uint64_t> poisson(out.rate);
      const std::uint64_t draws = poisson(rng);
      const CountVector counts = source.draw_counts(draws, rng);
      for (std::size_t i : support) {
        const double expected = out.rate * p_hat.at(i);
        const double observed = static_cast<double>(counts[i - 1]);
        const double diff = observed - expected;
        z += (diff * diff - observed) / expected;
      }
    }
    out.statistics.push_back(z);
    if (z <= out.threshold) ++accepts;
  }
  out.samples_used = source.samples_drawn() - before;
  out.verdict = 2 * accepts > config.repetitions ? Verdict::Accept : Verdict::Reject;
  return out;
}

namespace {

// Running l1 cost of the best constant for a growing multiset: two heaps
// split at the lower median.
class MedianCost {
 public:
  void push(double x) {
    if (lower_.empty() || x <= lower_.top()) {
      lower_.push(x);
      lower_sum_ += x;
    } else {
      upper_.push(x);
      upper_sum_ += x;
    }
    if (lower_.size() > upper_.size() + 1) {
      const double v = lower_.top();
      lower_.pop();
      lower_sum_ -= v;
      upper_.push(v);
      upper_sum_ += v;
    } else if (upper_.size() > lower_.size()) {
      const double v = upper_.top();
      upper_.pop();
      upper_sum_ -= v;
      lower_.push(v);
      lower_sum_ += v;
    }
  }

  [[nodiscard]] double cost() const {
    const double med = lower_.top();
    const double c = (upper_sum_ - med * static_cast<double>(upper_.size())) +
                     (med * static_cast<double>(lower_.size()) - lower_sum_);
    return std::max(0.0, c);
  }

 private:
  std::priority_queue<double> lower_;
  std::priority_queue<double, std::vector<double>, std::greater<>> upper_;
  double lower_sum_ = 0.0;
  double upper_sum_ = 0.0;
};

}  // namespace

double dp_distance_to_khistogram(const Measure& measure, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  const std::size_t n = measure.size();
  if (n == 0) return 0.0;
  const std::size_t pieces = std::min(k, n);
  const auto values = measure.values();

  // best[j][b]: min cost of covering [1, b] with exactly j pieces (j <= b).
  // Non-negative inputs have non-negative medians, so the level constraint is free.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(pieces + 1, std::vector<double>(n + 1, kInf));
  best[0][0] = 0.0;

  // Piece [a, b]: relax best[j][b] from best[j-1][a-1]. For a fixed a the
  // cost of [a, b] is built incrementally; a runs left to right so that
  // best[j-1][a-1] is final before use.
  for (std::size_t a = 1; a <= n; ++a) {
    MedianCost running;
    for (std::size_t b = a; b <= n; ++b) {
      running.push(values[b - 1]);
      const double c = running.cost();
      const std::size_t j_max = std::min(pieces, a);
      for (std::size_t j = 1; j <= j_max; ++j) {
        const double prev = best[j - 1][a - 1];
        if (prev + c < best[j][b]) best[j][b] = prev + c;
      }
    }
  }
  double answer = kInf;
  for (std::size_t j = 1; j <= pieces; ++j) answer = std::min(answer, best[j][n]);
  return answer;
}

LoopSchedule loop_schedule(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0, 1)");
  LoopSchedule s;
  const double rounds = 3.0 * std::ceil(std::log(1.0 / eps));
  s.rounds = std::max<std::size_t>(1, static_cast<std::size_t>(rounds));
  s.delta = 1.0 / (100.0 * static_cast<double>(s.rounds));
  s.sieve_eps = eps / (4.0 * std::sqrt(static_cast<double>(s.rounds)));
  return s;
}

namespace {

bool contains_cell(const std::vector<Interval>& sorted, const Interval& cell) {
  return std::binary_search(sorted.begin(), sorted.end(), cell,
                            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
}

}  // namespace

TestVerdict test_histogram(SampleSource& raw, std::size_t k, double eps, RngStream& rng,
                           const TesterConfig& config) {
  const std::size_t n = raw.domain_size();
  if (k < 1 || k > n) throw std::invalid_argument("k must be in [1, n]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0, 1)");

  UniformMixSource mixed(raw);
  TestVerdict result;
  TestDiagnostics& diag = result.diagnostics;
  diag.tested_eps = eps / 2.0;
  diag.schedule = loop_schedule(diag.tested_eps);
  const double e = diag.tested_eps;
  const double delta = diag.schedule.delta;
  const std::size_t buckets = config.bucket_factor * k;
  const std::size_t cap = config.iteration_cap_factor * diag.schedule.rounds;
  const std::uint64_t start = mixed.samples_drawn();

  auto finish = [&](Verdict v, std::string reason) {
    result.verdict = v;
    diag.reason = std::move(reason);
    diag.samples_total = mixed.samples_drawn() - start;
    return result;
  };

  std::vector<Interval> partition;        // I^(t), sorted
  std::vector<Interval> bad{Interval{1, n}};  // B^(t), sorted
  std::vector<double> p_bar(n, 0.0);
  diag.bad_history.push_back(bad);
  double r = 1.0;

  while (r > e / 8.0) {
    if (diag.iterations >= cap) return finish(Verdict::Reject, "non-convergence");
    ++diag.iterations;

    // Divide the bad region.
    std::uint64_t mark = mixed.samples_drawn();
    SubDivideOptions divide;
    divide.sample_constant = config.divide_constant;
    divide.expected_mass = std::max(r, e / 8.0);
    std::vector<IntervalPartition> pieces;
    try {
      pieces = approx_sub_divide(mixed, bad, buckets, delta, rng, divide);
    } catch (const std::runtime_error&) {
      diag.samples_divide += mixed.samples_drawn() - mark;
      return finish(Verdict::Reject, "bad region mass too small to divide");
    }
    diag.samples_divide += mixed.samples_drawn() - mark;

    std::vector<Interval> fresh;
    for (const auto& part : pieces) fresh.insert(fresh.end(), part.begin(), part.end());
    std::vector<Interval> merged;
    for (const auto& cell : partition) {
      if (!contains_cell(bad, cell)) merged.push_back(cell);
    }
    merged.insert(merged.end(), fresh.begin(), fresh.end());
    std::sort(merged.begin(), merged.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    partition = merged;
    const IntervalPartition current(merged);
    diag.partition_sizes.push_back(current.size());

    // Learn and sieve on the whole partition.
    mark = mixed.samples_drawn();
    const SieveOutcome sieve = learn_and_sieve(mixed, current, k, diag.schedule.sieve_eps, delta,
                                               rng, config.sieve);
    diag.samples_sieve += mixed.samples_drawn() - mark;
    if (sieve.verdict == SieveVerdict::Reject) return finish(Verdict::Reject, "sieve");

    std::vector<Interval> flagged;
    for (std::size_t j : sieve.bad_cells) flagged.push_back(current[j]);
    std::vector<Interval> next_bad;
    std::vector<Interval> good;
    for (const auto& cell : fresh) {
      if (contains_cell(flagged, cell)) {
        next_bad.push_back(cell);
      } else {
        good.push_back(cell);
      }
    }
    for (const auto& cell : good) {
      const std::size_t j = static_cast<std::size_t>(
          std::lower_bound(merged.begin(), merged.end(), cell,
                           [](const Interval& x, const Interval& y) { return x.lo < y.lo; }) -
          merged.begin());
      for (std::size_t i = cell.lo; i <= cell.hi; ++i) p_bar[i - 1] = sieve.learned.level(j);
    }
    diag.stitched.good_regions.push_back(std::move(good));
    bad = std::move(next_bad);
    diag.bad_history.push_back(bad);

    // Estimate the mass of the new bad region.
    mark = mixed.samples_drawn();
    const auto ell =
        static_cast<std::uint64_t>(std::ceil(config.mass_constant * std::log(1.0 / delta) / e));
    const CountVector counts = mixed.draw_counts(ell, rng);
    std::uint64_t hits = 0;
    for (const auto& cell : bad) {
      for (std::size_t i = cell.lo; i <= cell.hi; ++i) hits += counts[i - 1];
    }
    r = static_cast<double>(hits) / static_cast<double>(ell);
    diag.samples_mass += mixed.samples_drawn() - mark;
  }
  diag.final_bad_mass_estimate = r;

  for (const auto& cell : bad) {
    for (std::size_t i = cell.lo; i <= cell.hi; ++i) p_bar[i - 1] = 0.0;
  }
  diag.stitched.final_bad = bad;
  diag.stitched.values = Measure(std::move(p_bar));
  const Measure& stitched = diag.stitched.values;

  diag.dp_distance = dp_distance_to_khistogram(stitched, k);
  diag.normalization_slack = std::abs(1.0 - stitched.total());
  diag.dp_passed = diag.dp_distance + diag.normalization_slack <= e;
  if (!diag.dp_passed) return finish(Verdict::Reject, "distance check");

  const std::uint64_t mark = mixed.samples_drawn();
  diag.tolerant = tolerant_identity_test(mixed, stitched, e, rng, config.tolerant);
  diag.samples_test += mixed.samples_drawn() - mark;
  if (diag.tolerant.verdict == Verdict::Reject) return finish(Verdict::Reject, "identity test");
  return finish(Verdict::Accept, "");
}

}  // namespace histotest
