#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "histotest/dist_core.hpp"
#include "histotest/rng.hpp"
#include "histotest/sampler.hpp"

namespace histotest {

/// Ordered list of disjoint intervals, each starting right after the previous one ends.
class IntervalPartition {
 public:
  IntervalPartition() = default;
  /// Throws std::invalid_argument unless the intervals are well formed and consecutive.
  explicit IntervalPartition(std::vector<Interval> intervals);

  /// A single cell [1, n].
  static IntervalPartition whole(std::size_t n);
  /// `cells` near-equal-length cells covering [1, n].
  static IntervalPartition equal_cells(std::size_t n, std::size_t cells);

  [[nodiscard]] std::size_t size() const noexcept { return intervals_.size(); }
  [[nodiscard]] bool empty() const noexcept { return intervals_.empty(); }
  [[nodiscard]] const Interval& operator[](std::size_t j) const { return intervals_[j]; }
  [[nodiscard]] std::span<const Interval> intervals() const noexcept { return intervals_; }
  [[nodiscard]] auto begin() const noexcept { return intervals_.begin(); }
  [[nodiscard]] auto end() const noexcept { return intervals_.end(); }

  /// The covered span [first.lo, last.hi].
  [[nodiscard]] Interval span() const;
  [[nodiscard]] bool covers(std::size_t n) const noexcept;

 private:
  std::vector<Interval> intervals_;
};

/// Sample count ceil(18 B ln(12 B / delta)) for a standalone approx_divide call.
std::uint64_t approx_divide_sample_count(std::size_t buckets, double delta);

/// Greedy equitable partition of [n] from empirical counts (index i-1 holds
/// the count of element i). Elements with empirical mass strictly above
/// 1/(2B) become singletons; the gaps between them are filled left to right,
/// closing an interval as soon as adding the next element would bring its
/// empirical mass to 3/(2B) or more. The element that triggered the close
/// opens the next interval.
IntervalPartition approx_divide_counts(std::span<const std::uint64_t> counts, std::size_t buckets);

/// approx_divide_counts on the empirical distribution of `samples` over [n].
/// Throws std::invalid_argument when B <= 1.
IntervalPartition approx_divide(const SampleSet& samples, std::size_t n, std::size_t buckets);

struct SubDivideOptions {
  /// Accepted samples: ceil(sample_constant * B * ln(B / delta)).
  double sample_constant = 18.0;
  /// Caller's estimate of p(union of intervals); the raw draw budget is
  /// budget_factor * accepted / expected_mass.
  double expected_mass = 1.0;
  double budget_factor = 10.0;
};

/// Refines each interval of a disjoint set into lighter pieces: samples the
/// restriction of p to the union by rejection, runs approx_divide on the
/// concatenated index list, then maps each piece back, splitting pieces that
/// straddle input intervals. Returns one partition per input interval, in
/// the order the intervals were given.
///
/// Throws std::invalid_argument for overlapping intervals or B <= 1, and
/// std::runtime_error("interval set mass too small") when the raw draw
/// budget runs out.
std::vector<IntervalPartition> approx_sub_divide(SampleSource& source,
                                                 std::span<const Interval> intervals,
                                                 std::size_t buckets, double delta,
                                                 RngStream& rng,
                                                 const SubDivideOptions& options = {});

}  // namespace histotest
