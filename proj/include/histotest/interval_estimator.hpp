#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "histotest/dist_core.hpp"
#include "histotest/partition.hpp"
#include "histotest/sampler.hpp"

namespace histotest {

/// Batch count ceil(6 ln(n / delta)), at least 1.
std::size_t estimator_batch_count(std::size_t n, double delta);

/// T equal-size batches of samples, each stored as prefix sums over [n] so
/// that the count of any interval in any batch is one subtraction.
class BatchedCounts {
 public:
  /// Splits `samples` into `batches` consecutive groups of
  /// floor(|samples| / batches); the remainder is dropped.
  /// Throws std::invalid_argument if |samples| < batches.
  static BatchedCounts from_samples(const SampleSet& samples, std::size_t n, std::size_t batches);
  /// One count vector per batch; every batch must hold the same total.
  static BatchedCounts from_batch_counts(std::span<const CountVector> batch_counts);

  [[nodiscard]] std::size_t domain_size() const noexcept { return n_; }
  [[nodiscard]] std::size_t batches() const noexcept { return batches_; }
  [[nodiscard]] std::uint64_t batch_size() const noexcept { return batch_size_; }

  /// Samples of batch t (0-based) falling in the interval.
  [[nodiscard]] std::uint64_t count(std::size_t t, const Interval& interval) const noexcept {
    const std::uint64_t* row = prefix_.data() + t * (n_ + 1);
    return row[interval.hi] - row[interval.lo - 1];
  }

 private:
  std::size_t n_ = 0;
  std::size_t batches_ = 0;
  std::uint64_t batch_size_ = 0;
  std::vector<std::uint64_t> prefix_;  // batches_ rows of n_ + 1 entries
};

/// Median-of-batches interval mass estimate:
///   estimate(I) = max(median_t count_t(I) / b, |I| / (2n)).
/// Answers any interval in O(T); nothing is precomputed per interval.
/// Even T uses the lower middle order statistic.
class IntervalEstimator {
 public:
  explicit IntervalEstimator(BatchedCounts counts) : counts_(std::move(counts)) {}

  [[nodiscard]] double estimate(const Interval& interval) const;
  /// The median batch count before the |I|/(2n) floor.
  [[nodiscard]] std::uint64_t median_count(const Interval& interval) const;

  [[nodiscard]] const BatchedCounts& counts() const noexcept { return counts_; }
  [[nodiscard]] std::size_t domain_size() const noexcept { return counts_.domain_size(); }

 private:
  BatchedCounts counts_;
};

/// Throws std::invalid_argument when |samples| < ceil(6 ln(n / delta)).
IntervalEstimator build_interval_estimator(const SampleSet& samples, std::size_t n, double delta);

/// Measure that is constant on each cell of a partition.
class FlatMeasure {
 public:
  FlatMeasure() = default;
  FlatMeasure(IntervalPartition partition, std::vector<double> levels);

  [[nodiscard]] const IntervalPartition& partition() const noexcept { return partition_; }
  [[nodiscard]] std::span<const double> levels() const noexcept { return levels_; }
  /// Per-element level of cell j.
  [[nodiscard]] double level(std::size_t j) const { return levels_.at(j); }
  /// Mass of a sub-interval of cell j.
  [[nodiscard]] double mass_in_cell(std::size_t j, const Interval& sub) const {
    return levels_[j] * static_cast<double>(sub.length());
  }
  [[nodiscard]] Measure to_measure() const;

 private:
  IntervalPartition partition_;
  std::vector<double> levels_;
};

/// Flattens the estimator over each cell: level(I_j) = estimate(I_j) / |I_j|.
/// Throws std::invalid_argument unless the partition covers [n].
FlatMeasure empirical_learning(const IntervalEstimator& estimator,
                               const IntervalPartition& partition);
FlatMeasure empirical_learning(const SampleSet& samples, const IntervalPartition& partition,
                               std::size_t n, double delta);

}  // namespace histotest
