#include "histotest/interval_estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace histotest {

std::size_t estimator_batch_count(std::size_t n, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
  const double t = std::ceil(6.0 * std::log(static_cast<double>(n) / delta));
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

BatchedCounts BatchedCounts::from_samples(const SampleSet& samples, std::size_t n,
                                          std::size_t batches) {
  if (n == 0 || batches == 0) throw std::invalid_argument("need n >= 1 and at least one batch");
  if (samples.size() < batches) {
    throw std::invalid_argument("need at least " + std::to_string(batches) + " samples, got " +
                                std::to_string(samples.size()));
  }
  BatchedCounts out;
  out.n_ = n;
  out.batches_ = batches;
  out.batch_size_ = samples.size() / batches;
  out.prefix_.assign(batches * (n + 1), 0);
  for (std::size_t t = 0; t < batches; ++t) {
    std::uint64_t* row = out.prefix_.data() + t * (n + 1);
    const std::size_t first = t * out.batch_size_;
    for (std::size_t s = first; s < first + out.batch_size_; ++s) {
      const std::size_t x = samples.draws[s];
      if (x < 1 || x > n) throw std::invalid_argument("sample outside [1, n]");
      ++row[x];
    }
    for (std::size_t i = 1; i <= n; ++i) row[i] += row[i - 1];
  }
  return out;
}

BatchedCounts BatchedCounts::from_batch_counts(std::span<const CountVector> batch_counts) {
  if (batch_counts.empty()) throw std::invalid_argument("need at least one batch");
  BatchedCounts out;
  out.n_ = batch_counts.front().size();
  if (out.n_ == 0) throw std::invalid_argument("need n >= 1");
  out.batches_ = batch_counts.size();
  out.prefix_.assign(out.batches_ * (out.n_ + 1), 0);
  for (std::size_t t = 0; t < out.batches_; ++t) {
    const auto& counts = batch_counts[t];
    if (counts.size() != out.n_) throw std::invalid_argument("batch domain sizes differ");
    std::uint64_t* row = out.prefix_.data() + t * (out.n_ + 1);
    for (std::size_t i = 1; i <= out.n_; ++i) row[i] = row[i - 1] + counts[i - 1];
    if (t == 0) {
      out.batch_size_ = row[out.n_];
    } else if (row[out.n_] != out.batch_size_) {
      throw std::invalid_argument("batches must have equal size");
    }
  }
  if (out.batch_size_ == 0) throw std::invalid_argument("batches must be non-empty");
  return out;
}

std::uint64_t IntervalEstimator::median_count(const Interval& interval) const {
  const std::size_t batches = counts_.batches();
  constexpr std::size_t kInline = 256;
  std::array<std::uint64_t, kInline> small{};
  std::vector<std::uint64_t> large;
  std::uint64_t* values = small.data();
  if (batches > kInline) {
    large.resize(batches);
    values = large.data();
  }
  for (std::size_t t = 0; t < batches; ++t) values[t] = counts_.count(t, interval);
  const std::size_t mid = (batches - 1) / 2;
  std::nth_element(values, values + mid, values + batches);
  return values[mid];
}

double IntervalEstimator::estimate(const Interval& interval) const {
  const double n = static_cast<double>(counts_.domain_size());
  const double empirical =
      static_cast<double>(median_count(interval)) / static_cast<double>(counts_.batch_size());
  return std::max(empirical, static_cast<double>(interval.length()) / (2.0 * n));
}

IntervalEstimator build_interval_estimator(const SampleSet& samples, std::size_t n, double delta) {
  return IntervalEstimator(
      BatchedCounts::from_samples(samples, n, estimator_batch_count(n, delta)));
}

FlatMeasure::FlatMeasure(IntervalPartition partition, std::vector<double> levels)
    : partition_(std::move(partition)), levels_(std::move(levels)) {
  if (levels_.size() != partition_.size()) {
    throw std::invalid_argument("one level per partition cell required");
  }
  for (double v : levels_) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("levels must be non-negative");
  }
}

Measure FlatMeasure::to_measure() const {
  std::vector<double> mass(partition_.empty() ? 0 : partition_.span().hi, 0.0);
  for (std::size_t j = 0; j < partition_.size(); ++j) {
    for (std::size_t i = partition_[j].lo; i <= partition_[j].hi; ++i) mass[i - 1] = levels_[j];
  }
  return Measure(std::move(mass));
}

FlatMeasure empirical_learning(const IntervalEstimator& estimator,
                               const IntervalPartition& partition) {
  if (!partition.covers(estimator.domain_size())) {
    throw std::invalid_argument("partition does not cover [1, n]");
  }
  std::vector<double> levels;
  levels.reserve(partition.size());
  for (const auto& cell : partition) {
    levels.push_back(estimator.estimate(cell) / static_cast<double>(cell.length()));
  }
  return FlatMeasure(partition, std::move(levels));
}

FlatMeasure empirical_learning(const SampleSet& samples, const IntervalPartition& partition,
                               std::size_t n, double delta) {
  if (!partition.covers(n)) throw std::invalid_argument("partition does not cover [1, n]");
  return empirical_learning(build_interval_estimator(samples, n, delta), partition);
}

}  // namespace histotest
