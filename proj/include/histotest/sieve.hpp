#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "histotest/interval_estimator.hpp"
#include "histotest/partition.hpp"
#include "histotest/sampler.hpp"

namespace histotest {

enum class SieveVerdict { Ok, Reject };

struct SieveConfig {
  /// C in m = C (K / eps^2 + sqrt(K n) / eps) ceil(ln(n / delta)).
  double sample_constant = 40.0;
};

struct SieveOutcome {
  SieveVerdict verdict = SieveVerdict::Ok;
  /// Indices into the input partition of the flagged cells, ascending.
  std::vector<std::size_t> bad_cells;
  FlatMeasure learned;
  std::uint64_t samples_used = 0;
  std::uint64_t batch_size = 0;
  std::size_t batches = 0;
};

/// Per-half sample count m, raised to the batch count so every batch is non-empty.
std::uint64_t sieve_sample_size(std::size_t cells, std::size_t n, double eps, double delta,
                                const SieveConfig& config = {});

/// Flags cell I whenever some sub-interval Q of I has
///   phi(Q) / p_hat(Q) > 6 max(1, eps sqrt(n/K))   or
///   |phi(Q) - p_hat(Q)| > (1/2) sqrt(p_hat(Q) eps^2 / K).
/// Deterministic in its inputs; only sub-intervals of a single cell are considered.
std::vector<std::size_t> sieve_scan(const FlatMeasure& learned, const IntervalEstimator& check,
                                    double eps);

/// Draws 2m samples, learns a flattened measure from the first half, builds
/// an independent interval estimator from the second half (each with
/// failure budget delta/4), and sieves. Rejects when more than k cells are flagged.
SieveOutcome learn_and_sieve(SampleSource& source, const IntervalPartition& partition,
                             std::size_t k, double eps, double delta, RngStream& rng,
                             const SieveConfig& config = {});

}  // namespace histotest
