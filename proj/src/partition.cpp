#include "histotest/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace histotest {

IntervalPartition::IntervalPartition(std::vector<Interval> intervals)
    : intervals_(std::move(intervals)) {
  for (std::size_t j = 0; j < intervals_.size(); ++j) {
    const auto& cell = intervals_[j];
    if (cell.lo < 1 || cell.lo > cell.hi) {
      throw std::invalid_argument("malformed interval in partition");
    }
    if (j > 0 && cell.lo != intervals_[j - 1].hi + 1) {
      throw std::invalid_argument("partition cells are not consecutive at cell " +
                                  std::to_string(j));
    }
  }
}

IntervalPartition IntervalPartition::whole(std::size_t n) {
  if (n == 0) throw std::invalid_argument("partition needs n >= 1");
  return IntervalPartition({Interval{1, n}});
}

IntervalPartition IntervalPartition::equal_cells(std::size_t n, std::size_t cells) {
  if (n == 0 || cells == 0 || cells > n) {
    throw std::invalid_argument("equal_cells needs 1 <= cells <= n");
  }
  std::vector<Interval> out;
  out.reserve(cells);
  std::size_t lo = 1;
  for (std::size_t j = 0; j < cells; ++j) {
    const std::size_t hi = (j + 1) * n / cells;
    out.push_back({lo, hi});
    lo = hi + 1;
  }
  return IntervalPartition(std::move(out));
}

Interval IntervalPartition::span() const {
  if (intervals_.empty()) throw std::logic_error("empty partition has no span");
  return {intervals_.front().lo, intervals_.back().hi};
}

bool IntervalPartition::covers(std::size_t n) const noexcept {
  return !intervals_.empty() && intervals_.front().lo == 1 && intervals_.back().hi == n;
}

std::uint64_t approx_divide_sample_count(std::size_t buckets, double delta) {
  const double b = static_cast<double>(buckets);
  return static_cast<std::uint64_t>(std::ceil(18.0 * b * std::log(12.0 * b / delta)));
}

IntervalPartition approx_divide_counts(std::span<const std::uint64_t> counts,
                                       std::size_t buckets) {
  if (buckets <= 1) throw std::invalid_argument("approx_divide needs B > 1");
  const std::size_t n = counts.size();
  if (n == 0) throw std::invalid_argument("approx_divide needs n >= 1");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return IntervalPartition::whole(n);

  // Exact integer forms of  c/total > 1/(2B)  and  c/total < 3/(2B).
  using Wide = unsigned __int128;
  const Wide two_b = 2 * static_cast<Wide>(buckets);
  const Wide three_total = 3 * static_cast<Wide>(total);
  const auto heavy = [&](std::uint64_t c) { return two_b * c > total; };

  std::vector<Interval> out;
  std::size_t open_lo = 0;  // 0: no open interval
  std::uint64_t open_count = 0;
  const auto close_open = [&](std::size_t hi) {
    if (open_lo != 0) out.push_back({open_lo, hi});
    open_lo = 0;
    open_count = 0;
  };

  for (std::size_t i = 1; i <= n; ++i) {
    const std::uint64_t c = counts[i - 1];
    if (heavy(c)) {
      close_open(i - 1);
      out.push_back({i, i});
      continue;
    }
    if (open_lo == 0) {
      open_lo = i;
      open_count = c;
    } else if (two_b * (open_count + c) < three_total) {
      open_count += c;
    } else {
      close_open(i - 1);
      open_lo = i;
      open_count = c;
    }
  }
  close_open(n);
  return IntervalPartition(std::move(out));
}

IntervalPartition approx_divide(const SampleSet& samples, std::size_t n, std::size_t buckets) {
  if (buckets <= 1) throw std::invalid_argument("approx_divide needs B > 1");
  if (n == 0) throw std::invalid_argument("approx_divide needs n >= 1");
  std::vector<std::uint64_t> counts(n, 0);
  for (auto x : samples.draws) {
    if (x < 1 || x > n) throw std::invalid_argument("sample outside [1, n]");
    ++counts[x - 1];
  }
  return approx_divide_counts(counts, buckets);
}

std::vector<IntervalPartition> approx_sub_divide(SampleSource& source,
                                                 std::span<const Interval> intervals,
                                                 std::size_t buckets, double delta,
                                                 RngStream& rng,
                                                 const SubDivideOptions& options) {
  if (buckets <= 1) throw std::invalid_argument("approx_sub_divide needs B > 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
  if (intervals.empty()) return {};
  const std::size_t n = source.domain_size();

  // Order the input left to right; remember where each came from.
  std::vector<std::size_t> order(intervals.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return intervals[a].lo < intervals[b].lo; });
  std::vector<Interval> sorted;
  std::vector<std::size_t> offset;  // L-index (0-based) of each sorted interval's first element
  std::size_t length = 0;
  for (std::size_t j : order) {
    validate_interval(intervals[j], n);
    if (!sorted.empty() && intervals[j].lo <= sorted.back().hi) {
      throw std::invalid_argument("approx_sub_divide needs disjoint intervals");
    }
    sorted.push_back(intervals[j]);
    offset.push_back(length);
    length += intervals[j].length();
  }

  const double b = static_cast<double>(buckets);
  const auto accepted_target =
      static_cast<std::uint64_t>(std::ceil(options.sample_constant * b * std::log(b / delta)));
  const double expected_mass = std::clamp(options.expected_mass, 1e-300, 1.0);
  const auto budget = static_cast<std::uint64_t>(
      std::ceil(options.budget_factor * static_cast<double>(accepted_target) / expected_mass));

  // Rejection sampling from the restriction of p to L.
  std::vector<std::uint64_t> counts(length, 0);
  std::uint64_t accepted = 0;
  std::uint64_t raw = 0;
  while (accepted < accepted_target) {
    if (raw >= budget) throw std::runtime_error("interval set mass too small");
    ++raw;
    const std::size_t x = source.draw(rng);
    auto it = std::upper_bound(sorted.begin(), sorted.end(), x,
                               [](std::size_t v, const Interval& cell) { return v < cell.lo; });
    if (it == sorted.begin()) continue;
    --it;
    if (!it->contains(x)) continue;
    const auto j = static_cast<std::size_t>(it - sorted.begin());
    ++counts[offset[j] + (x - it->lo)];
    ++accepted;
  }

  const IntervalPartition over_list = approx_divide_counts(counts, buckets);

  // Map L positions back to the domain.
  const auto locate = [&](std::size_t pos) {  // pos: 1-based L index
    auto it = std::upper_bound(offset.begin(), offset.end(), pos - 1);
    const auto j = static_cast<std::size_t>(it - offset.begin()) - 1;
    return std::pair{j, sorted[j].lo + (pos - 1 - offset[j])};
  };
  std::vector<std::vector<Interval>> pieces(sorted.size());
  for (const auto& cell : over_list) {
    const auto [ja, xa] = locate(cell.lo);
    const auto [jb, xb] = locate(cell.hi);
    if (ja == jb) {
      pieces[ja].push_back({xa, xb});
      continue;
    }
    pieces[ja].push_back({xa, sorted[ja].hi});
    for (std::size_t t = ja + 1; t < jb; ++t) pieces[t].push_back(sorted[t]);
    pieces[jb].push_back({sorted[jb].lo, xb});
  }

  std::vector<IntervalPartition> out(intervals.size());
  for (std::size_t s = 0; s < sorted.size(); ++s) {
    out[order[s]] = IntervalPartition(std::move(pieces[s]));
  }
  return out;
}

}  // namespace histotest
