#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "histotest/instances.hpp"
#include "histotest/sieve.hpp"

using namespace histotest;

TEST_CASE("sample size formula and exact tally") {
  const std::size_t n = 256;
  const std::size_t cells = 16;
  const double eps = 0.25;
  const double delta = 0.1;
  const double expect = std::ceil(40.0 * (cells / (eps * eps) + std::sqrt(cells * n) / eps) *
                                  std::ceil(std::log(n / delta)));
  const std::uint64_t m = sieve_sample_size(cells, n, eps, delta);
  CHECK(m == static_cast<std::uint64_t>(expect));

  PmfSource raw(Pmf::uniform(n));
  UniformMixSource mixed(raw);
  RngStream rng(1);
  const auto out =
      learn_and_sieve(mixed, IntervalPartition::equal_cells(n, cells), 1, eps, delta, rng);
  CHECK(out.samples_used == 2 * m);
  CHECK(mixed.samples_drawn() == 2 * m);
  CHECK(out.batches == estimator_batch_count(n, delta / 4));
  CHECK(out.batch_size == m / out.batches);
}

TEST_CASE("uniform passes with no bad cells") {
  const std::size_t n = 256;
  int clean = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PmfSource raw(Pmf::uniform(n));
    UniformMixSource mixed(raw);
    RngStream rng(seed);
    const auto out =
        learn_and_sieve(mixed, IntervalPartition::equal_cells(n, 16), 1, 0.25, 0.1, rng);
    if (out.verdict == SieveVerdict::Ok && out.bad_cells.empty()) ++clean;
  }
  CHECK(clean >= 95);
}

TEST_CASE("many strong breakpoint cells force a reject") {
  // Blocks of 8 alternate between high and low; each 16-wide cell straddles
  // one jump, so all 16 cells carry a large within-cell deviation.
  const std::size_t n = 256;
  const Pmf p = zigzag(n, 32, 0.9);
  const auto part = IntervalPartition::equal_cells(n, 16);
  const std::size_t k = 3;
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PmfSource raw(p);
    UniformMixSource mixed(raw);
    RngStream rng(seed);
    if (learn_and_sieve(mixed, part, k, 0.25, 0.1, rng).verdict == SieveVerdict::Reject) ++rejects;
  }
  CHECK(rejects >= 95);
}

TEST_CASE("histograms: few bad cells and small chi-square elsewhere") {
  const std::size_t n = 256;
  const std::size_t k = 4;
  const double eps = 0.25;
  const double delta = 0.1;
  const auto part = IntervalPartition::equal_cells(n, 32);
  int good = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(500 + static_cast<std::uint64_t>(t));
    const Pmf p = random_khistogram(n, k, rng);
    const Pmf mixed_p = mix_with_uniform(p);
    PmfSource raw(p);
    UniformMixSource mixed(raw);
    const auto out = learn_and_sieve(mixed, part, k, eps, delta, rng);
    if (out.verdict != SieveVerdict::Ok || out.bad_cells.size() > k) continue;
    std::vector<bool> bad(part.size(), false);
    for (auto j : out.bad_cells) bad[j] = true;
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < part.size(); ++j) {
      if (bad[j]) continue;
      for (std::size_t i = part[j].lo; i <= part[j].hi; ++i) rest.push_back(i);
    }
    if (chi_square_div(mixed_p.measure(), out.learned.to_measure(), rest) <= eps * eps) ++good;
  }
  CHECK(static_cast<double>(good) / trials >= 1.0 - delta - 0.05);
}

TEST_CASE("scan is deterministic and never straddles cells") {
  const std::size_t n = 64;
  RngStream rng(9);
  const Pmf p = mix_with_uniform(random_khistogram(n, 3, rng));
  const auto part = IntervalPartition::equal_cells(n, 8);
  const auto learn = build_interval_estimator(sample(p, 40000, rng), n, 0.1);
  const auto check = build_interval_estimator(sample(p, 40000, rng), n, 0.1);
  const FlatMeasure flat = empirical_learning(learn, part);
  const auto first = sieve_scan(flat, check, 0.3);
  CHECK(first == sieve_scan(flat, check, 0.3));
  for (auto j : first) CHECK(j < part.size());
}

TEST_CASE("singleton cells are not flagged") {
  const std::size_t n = 48;
  int flagged = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngStream rng(seed);
    const Pmf p = random_khistogram(n, 5, rng);
    PmfSource raw(p);
    UniformMixSource mixed(raw);
    const auto out =
        learn_and_sieve(mixed, IntervalPartition::equal_cells(n, n), 5, 0.25, 0.1, rng);
    flagged += static_cast<int>(out.bad_cells.size());
  }
  CHECK(flagged == 0);
}
