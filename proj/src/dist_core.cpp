#include "histotest/dist_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace histotest {

namespace {

constexpr std::size_t kPairwiseBlock = 64;

double pairwise_sum_impl(const double* data, std::size_t count) noexcept {
  if (count <= kPairwiseBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += data[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, count - half);
}

void require_same_size(const Measure& p, const Measure& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(p.size()) + " vs " +
                                std::to_string(q.size()));
  }
}

void require_in_domain(std::size_t i, std::size_t n) {
  if (i < 1 || i > n) {
    throw std::invalid_argument("index " + std::to_string(i) + " outside [1, " +
                                std::to_string(n) + "]");
  }
}

double chi_term(double p, double q, std::size_t i) {
  if (!(q > 0.0)) {
    throw std::domain_error("chi-square reference vanishes at index " + std::to_string(i));
  }
  const double diff = p - q;
  return diff * diff / q;
}

}  // namespace

double pairwise_sum(std::span<const double> values) noexcept {
  return pairwise_sum_impl(values.data(), values.size());
}

void validate_interval(const Interval& interval, std::size_t n) {
  if (interval.lo < 1 || interval.lo > interval.hi || interval.hi > n) {
    throw std::invalid_argument("interval [" + std::to_string(interval.lo) + ", " +
                                std::to_string(interval.hi) + "] is not inside [1, " +
                                std::to_string(n) + "]");
  }
}

Measure::Measure(std::vector<double> mass) : mass_(std::move(mass)) {
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (!std::isfinite(mass_[i]) || mass_[i] < 0.0) {
      throw std::invalid_argument("measure entry " + std::to_string(i + 1) +
                                  " is negative or non-finite");
    }
  }
  total_ = pairwise_sum(mass_);
}

double Measure::mass(const Interval& interval) const {
  validate_interval(interval, size());
  return pairwise_sum(std::span<const double>(mass_).subspan(interval.lo - 1, interval.length()));
}

Pmf::Pmf(std::vector<double> mass) : measure_(std::move(mass)) {
  if (measure_.size() == 0) throw std::invalid_argument("pmf needs a non-empty domain");
  if (std::abs(measure_.total() - 1.0) > kUnitSumTolerance) {
    throw std::invalid_argument("pmf entries sum to " + std::to_string(measure_.total()) +
                                ", not 1");
  }
}

Pmf Pmf::normalized(std::vector<double> weights) {
  const Measure raw(weights);
  if (!(raw.total() > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  for (double& w : weights) w /= raw.total();
  return Pmf(std::move(weights));
}

Pmf Pmf::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform pmf needs n >= 1");
  return Pmf(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::size_t Pmf::breakpoint_count() const noexcept {
  const auto v = values();
  std::size_t count = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] != v[i - 1]) ++count;
  }
  return count;
}

double tv_distance(const Measure& p, const Measure& q) {
  require_same_size(p, q);
  std::vector<double> diff(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) diff[i] = std::abs(p.values()[i] - q.values()[i]);
  return 0.5 * pairwise_sum(diff);
}

double tv_distance(const Measure& p, const Measure& q, std::span<const std::size_t> subset) {
  require_same_size(p, q);
  std::vector<double> diff;
  diff.reserve(subset.size());
  for (std::size_t i : subset) {
    require_in_domain(i, p.size());
    diff.push_back(std::abs(p.at(i) - q.at(i)));
  }
  return 0.5 * pairwise_sum(diff);
}

double chi_square_div(const Measure& p, const Measure& q) {
  require_same_size(p, q);
  std::vector<double> terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    terms[i] = chi_term(p.values()[i], q.values()[i], i + 1);
  }
  return pairwise_sum(terms);
}

double chi_square_div(const Measure& p, const Measure& q, std::span<const std::size_t> subset) {
  require_same_size(p, q);
  std::vector<double> terms;
  terms.reserve(subset.size());
  for (std::size_t i : subset) {
    require_in_domain(i, p.size());
    terms.push_back(chi_term(p.at(i), q.at(i), i));
  }
  return pairwise_sum(terms);
}

Pmf mix_with_uniform(const Pmf& p) {
  const double floor = 0.5 / static_cast<double>(p.size());
  std::vector<double> mixed(p.values().begin(), p.values().end());
  for (double& v : mixed) v = 0.5 * v + floor;
  return Pmf(std::move(mixed));
}

Pmf make_khistogram(std::size_t n, std::span<const HistogramPiece> pieces) {
  if (n == 0) throw std::invalid_argument("histogram needs n >= 1");
  if (pieces.empty()) throw std::invalid_argument("histogram needs at least one piece");
  std::vector<double> mass(n);
  std::size_t next = 1;
  for (const auto& piece : pieces) {
    validate_interval(piece.interval, n);
    if (piece.interval.lo != next) {
      throw std::invalid_argument("pieces do not partition [1, n]: expected a piece starting at " +
                                  std::to_string(next));
    }
    if (!std::isfinite(piece.level) || piece.level < 0.0) {
      throw std::invalid_argument("histogram level must be non-negative");
    }
    for (std::size_t i = piece.interval.lo; i <= piece.interval.hi; ++i) mass[i - 1] = piece.level;
    next = piece.interval.hi + 1;
  }
  if (next != n + 1) throw std::invalid_argument("pieces do not cover [1, n]");
  return Pmf(std::move(mass));
}

AliasTable::AliasTable(std::span<const double> weights)
    : prob_(weights.size()), alias_(weights.size()) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("alias table needs a non-empty weight vector");
  const double total = pairwise_sum(weights);
  if (!(total > 0.0)) throw std::invalid_argument("alias table needs positive total weight");

  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (auto i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::draw(RngStream& rng) const noexcept {
  const auto column = static_cast<std::size_t>(rng.below(prob_.size()));
  const std::size_t chosen = rng.uniform01() < prob_[column] ? column : alias_[column];
  return chosen + 1;
}

SampleSet sample(const Pmf& p, std::size_t m, RngStream& rng) {
  SampleSet out;
  if (m == 0) return out;
  const AliasTable table(p.values());
  out.draws.reserve(m);
  for (std::size_t j = 0; j < m; ++j) out.draws.push_back(table.draw(rng));
  return out;
}

}  // namespace histotest
