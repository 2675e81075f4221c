#include "histotest/sampler.hpp"

#include <algorithm>
#include <random>

namespace histotest {

namespace {

// Below this many draws per domain element the alias loop beats n binomials.
constexpr std::uint64_t kAliasLoopFactor = 1;

}  // namespace

CountVector SampleSource::do_draw_counts(std::uint64_t m, RngStream& rng) {
  CountVector counts(domain_size(), 0);
  for (std::uint64_t j = 0; j < m; ++j) ++counts[do_draw(rng) - 1];
  return counts;
}

CountVector multinomial_counts(std::span<const double> p, std::uint64_t m, RngStream& rng) {
  const std::size_t n = p.size();
  CountVector counts(n, 0);
  // Suffix sums keep the conditional probabilities accurate to the end.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + p[i];
  std::uint64_t remaining = m;
  for (std::size_t i = 0; i < n && remaining > 0; ++i) {
    if (i + 1 == n) {
      counts[i] = remaining;
      break;
    }
    if (!(suffix[i] > 0.0)) break;
    const double q = std::clamp(p[i] / suffix[i], 0.0, 1.0);
    if (q <= 0.0) continue;
    std::uint64_t c = remaining;
    if (q < 1.0) {
      std::binomial_distribution<std::uint64_t> binom(remaining, q);
      c = binom(rng);
    }
    counts[i] = c;
    remaining -= c;
  }
  return counts;
}

PmfSource::PmfSource(Pmf pmf) : pmf_(std::move(pmf)), table_(pmf_.values()) {}

CountVector PmfSource::do_draw_counts(std::uint64_t m, RngStream& rng) {
  if (m < kAliasLoopFactor * pmf_.size()) return SampleSource::do_draw_counts(m, rng);
  return multinomial_counts(pmf_.values(), m, rng);
}

std::size_t UniformMixSource::do_draw(RngStream& rng) {
  const std::size_t from_inner = inner_.draw(rng);
  if (rng.uniform01() < 0.5) return from_inner;
  return static_cast<std::size_t>(rng.below(domain_size())) + 1;
}

CountVector UniformMixSource::do_draw_counts(std::uint64_t m, RngStream& rng) {
  const std::size_t n = domain_size();
  CountVector counts = inner_.draw_counts(m, rng);
  std::uint64_t replaced = 0;
  for (auto& c : counts) {
    if (c == 0) continue;
    std::binomial_distribution<std::uint64_t> keep(c, 0.5);
    const std::uint64_t kept = keep(rng);
    replaced += c - kept;
    c = kept;
  }
  if (replaced == 0) return counts;
  if (replaced < n) {
    for (std::uint64_t j = 0; j < replaced; ++j) ++counts[rng.below(n)];
  } else {
    const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
    const CountVector extra = multinomial_counts(uniform, replaced, rng);
    for (std::size_t i = 0; i < n; ++i) counts[i] += extra[i];
  }
  return counts;
}

}  // namespace histotest
