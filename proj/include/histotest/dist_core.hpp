#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "histotest/rng.hpp"

namespace histotest {

/// Absolute tolerance used when checking that a vector sums to one.
inline constexpr double kUnitSumTolerance = 1e-9;

/// Pairwise (cascade) summation; error grows as O(log n) instead of O(n).
double pairwise_sum(std::span<const double> values) noexcept;

/// Closed interval [lo, hi] of the 1-based domain {1, ..., n}.
struct Interval {
  std::size_t lo = 1;
  std::size_t hi = 1;

  [[nodiscard]] std::size_t length() const noexcept { return hi - lo + 1; }
  [[nodiscard]] bool contains(std::size_t i) const noexcept { return lo <= i && i <= hi; }
  [[nodiscard]] bool contains(const Interval& other) const noexcept {
    return lo <= other.lo && other.hi <= hi;
  }
  [[nodiscard]] bool singleton() const noexcept { return lo == hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Throws std::invalid_argument unless 1 <= lo <= hi <= n.
void validate_interval(const Interval& interval, std::size_t n);

/// Non-negative vector over [n] with arbitrary total mass.
class Measure {
 public:
  Measure() = default;
  explicit Measure(std::vector<double> mass);

  [[nodiscard]] std::size_t size() const noexcept { return mass_.size(); }
  [[nodiscard]] double total() const noexcept { return total_; }
  /// Mass of element i, 1-based.
  [[nodiscard]] double at(std::size_t i) const { return mass_.at(i - 1); }
  /// Mass of an interval (1-based, inclusive).
  [[nodiscard]] double mass(const Interval& interval) const;
  [[nodiscard]] std::span<const double> values() const noexcept { return mass_; }

 private:
  std::vector<double> mass_;
  double total_ = 0.0;
};

/// Probability mass function over [n].
class Pmf {
 public:
  Pmf() = default;
  /// Throws std::invalid_argument if any entry is negative or non-finite, or
  /// if the entries do not sum to one within kUnitSumTolerance.
  explicit Pmf(std::vector<double> mass);

  /// Rescales a non-negative vector with positive total to unit mass.
  static Pmf normalized(std::vector<double> weights);
  static Pmf uniform(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return measure_.size(); }
  [[nodiscard]] double at(std::size_t i) const { return measure_.at(i); }
  [[nodiscard]] double mass(const Interval& interval) const { return measure_.mass(interval); }
  [[nodiscard]] std::span<const double> values() const noexcept { return measure_.values(); }
  [[nodiscard]] const Measure& measure() const noexcept { return measure_; }

  /// Number of i in [1, n-1] with p(i) != p(i+1).
  [[nodiscard]] std::size_t breakpoint_count() const noexcept;
  /// Number of maximal constant runs, i.e. the smallest k with p in H_k.
  [[nodiscard]] std::size_t piece_count() const noexcept { return breakpoint_count() + 1; }

 private:
  Measure measure_;
};

/// Draws from a distribution, 1-based indices.
struct SampleSet {
  std::vector<std::size_t> draws;

  [[nodiscard]] std::size_t size() const noexcept { return draws.size(); }
  [[nodiscard]] bool empty() const noexcept { return draws.empty(); }
  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

/// Total variation (1/2) * sum |p(i) - q(i)| over the whole domain.
double tv_distance(const Measure& p, const Measure& q);
/// Restricted total variation over the 1-based indices in `subset`.
double tv_distance(const Measure& p, const Measure& q, std::span<const std::size_t> subset);

/// Chi-square divergence sum (p_i - q_i)^2 / q_i. Throws std::domain_error if
/// q vanishes on an index of the (restricted) domain.
double chi_square_div(const Measure& p, const Measure& q);
double chi_square_div(const Measure& p, const Measure& q, std::span<const std::size_t> subset);

/// p'(i) = p(i)/2 + 1/(2n).
Pmf mix_with_uniform(const Pmf& p);

/// One constant piece of a histogram: every element of `interval` has mass `level`.
struct HistogramPiece {
  Interval interval;
  double level = 0.0;
};

/// Builds a histogram Pmf from pieces that partition [n] in order.
/// Throws std::invalid_argument on gaps, overlaps, negative levels, or a
/// total mass away from one.
Pmf make_khistogram(std::size_t n, std::span<const HistogramPiece> pieces);

/// Vose alias table; O(n) build, O(1) draw.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  /// 1-based index.
  std::size_t draw(RngStream& rng) const noexcept;
  [[nodiscard]] std::size_t size() const noexcept { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// m i.i.d. draws from p.
SampleSet sample(const Pmf& p, std::size_t m, RngStream& rng);

}  // namespace histotest
