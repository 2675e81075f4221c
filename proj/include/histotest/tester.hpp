#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "histotest/dist_core.hpp"
#include "histotest/partition.hpp"
#include "histotest/sampler.hpp"
#include "histotest/sieve.hpp"

namespace histotest {

enum class Verdict { Accept, Reject };

const char* to_string(Verdict verdict) noexcept;

// ---------------------------------------------------------------------------
// Tolerant identity test
// ---------------------------------------------------------------------------

struct TolerantTestConfig {
  /// Poisson rate m = sample_constant * sqrt(n) / eps^2.
  double sample_constant = 2000.0;
  /// Accept a repetition iff Z <= threshold_fraction * m * eps^2.
  double threshold_fraction = 1.0 / 8.0;
  /// Majority vote over this many independent repetitions.
  std::size_t repetitions = 3;
};

struct TolerantTestResult {
  Verdict verdict = Verdict::Accept;
  std::vector<double> statistics;  // Z per repetition
  double rate = 0.0;               // m
  double threshold = 0.0;          // tau
  std::size_t support_size = 0;    // |A|
  std::uint64_t samples_used = 0;
};

/// Poissonized chi-square statistic on A = {i : p_hat(i) >= eps / (50 n)}:
///   Z = sum_{i in A} ((N_i - m p_hat_i)^2 - N_i) / (m p_hat_i),  N ~ counts of Poi(m) draws.
/// E[Z] = m * chi2_A(p || p_hat); each repetition accepts iff Z <= tau.
TolerantTestResult tolerant_identity_test(SampleSource& source, const Measure& p_hat, double eps,
                                          RngStream& rng, const TolerantTestConfig& config = {});

// ---------------------------------------------------------------------------
// Distance to k-piecewise-constant functions
// ---------------------------------------------------------------------------

/// min over non-negative g, piecewise constant on at most k intervals, of
/// ||measure - g||_1. Each piece's best level is the median of its entries.
/// O(n^2 (k + log n)) time, O(k n) memory. Throws std::invalid_argument for k < 1.
double dp_distance_to_khistogram(const Measure& measure, std::size_t k);

// ---------------------------------------------------------------------------
// Histogram tester
// ---------------------------------------------------------------------------

struct TesterConfig {
  SieveConfig sieve;
  TolerantTestConfig tolerant;
  /// l = ceil(mass_constant * ln(1/delta) / eps) samples per bad-mass estimate.
  double mass_constant = 100.0;
  /// Accepted samples per sub-divide: ceil(divide_constant * B ln(B / delta)).
  double divide_constant = 18.0;
  /// B = bucket_factor * k.
  std::size_t bucket_factor = 32;
  /// Give up (Reject) after iteration_cap_factor * T loop iterations.
  std::size_t iteration_cap_factor = 10;
};

/// Loop parameters derived from the accuracy used on the mixed target.
struct LoopSchedule {
  std::size_t rounds = 1;  // T = 3 ceil(ln(1/eps)), at least 1
  double delta = 0.01;     // 1 / (100 T)
  double sieve_eps = 0.0;  // eps / (4 sqrt(T))
};

LoopSchedule loop_schedule(double eps);

/// p_bar: the learned levels on every good region, zero on the final bad region.
struct StitchedMeasure {
  /// good_regions[j] holds the cells settled in loop iteration j + 1.
  std::vector<std::vector<Interval>> good_regions;
  std::vector<Interval> final_bad;
  Measure values;
};

struct TestDiagnostics {
  std::size_t iterations = 0;
  std::uint64_t samples_divide = 0;
  std::uint64_t samples_sieve = 0;
  std::uint64_t samples_mass = 0;
  std::uint64_t samples_test = 0;
  std::uint64_t samples_total = 0;
  double final_bad_mass_estimate = 1.0;  // r
  LoopSchedule schedule;
  double tested_eps = 0.0;  // eps on the mixed target
  /// bad_history[t] = B^(t); bad_history[0] = {[1, n]}.
  std::vector<std::vector<Interval>> bad_history;
  std::vector<std::size_t> partition_sizes;  // K per iteration
  double dp_distance = 0.0;                  // l1 to nearest k-piece function
  double normalization_slack = 0.0;          // |1 - ||p_bar||_1|
  bool dp_passed = false;
  TolerantTestResult tolerant;
  StitchedMeasure stitched;
  /// Empty on Accept; otherwise which stage rejected.
  std::string reason;
};

struct TestVerdict {
  Verdict verdict = Verdict::Reject;
  TestDiagnostics diagnostics;
};

/// Tests whether the distribution behind `raw` is a k-histogram or eps-far
/// from every k-histogram. Samples are routed through the uniform mixing
/// wrapper, and the mixed target is tested at accuracy eps/2.
///
/// The loop alternates sub-division of the current bad region (B = 32k),
/// learn-and-sieve on the merged partition at accuracy eps/(4 sqrt(T)), and
/// a sampled estimate r of the new bad region's mass, until r <= eps/8. The
/// stitched measure must then pass the k-piece distance check (l1 budget eps
/// plus normalization slack) and the tolerant identity test.
TestVerdict test_histogram(SampleSource& raw, std::size_t k, double eps, RngStream& rng,
                           const TesterConfig& config = {});

}  // namespace histotest
