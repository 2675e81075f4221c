#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "histotest/sampler.hpp"

using namespace histotest;

TEST_CASE("sources tally every sample") {
  RngStream rng(1);
  PmfSource source(Pmf::normalized({1.0, 2.0, 3.0}));
  source.draw(rng);
  const CountVector c = source.draw_counts(1000, rng);
  CHECK(std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == 1000);
  CHECK(source.samples_drawn() == 1001);

  UniformMixSource mixed(source);
  mixed.draw(rng);
  mixed.draw_counts(500, rng);
  CHECK(mixed.samples_drawn() == 501);
  CHECK(source.samples_drawn() == 1001 + 501);
}

TEST_CASE("multinomial counts match the pmf") {
  RngStream rng(2);
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const std::uint64_t m = 4000000;
  const CountVector c = multinomial_counts(p, m, rng);
  CHECK(std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == m);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double sd = std::sqrt(static_cast<double>(m) * p[i] * (1 - p[i]));
    CHECK(std::abs(static_cast<double>(c[i]) - static_cast<double>(m) * p[i]) <= 4 * sd);
  }
}

TEST_CASE("mixed counts follow (p + u)/2") {
  RngStream rng(3);
  PmfSource source(Pmf({1.0, 0.0, 0.0, 0.0}));
  UniformMixSource mixed(source);
  const std::uint64_t m = 2000000;
  const CountVector c = mixed.draw_counts(m, rng);
  const std::vector<double> expect{0.625, 0.125, 0.125, 0.125};
  for (std::size_t i = 0; i < 4; ++i) {
    const double sd = std::sqrt(static_cast<double>(m) * expect[i] * (1 - expect[i]));
    CHECK(std::abs(static_cast<double>(c[i]) - static_cast<double>(m) * expect[i]) <= 4 * sd);
  }

  // Single draws agree in distribution with the count path.
  std::vector<double> freq(4, 0.0);
  for (int s = 0; s < 200000; ++s) freq[mixed.draw(rng) - 1] += 1.0 / 200000.0;
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(freq[i] - expect[i]) < 0.005);
}

TEST_CASE("count draws are reproducible") {
  const Pmf p = Pmf::normalized({3.0, 1.0, 4.0, 1.0, 5.0});
  PmfSource a(p);
  PmfSource b(p);
  RngStream ra(10);
  RngStream rb(10);
  CHECK(a.draw_counts(12345, ra) == b.draw_counts(12345, rb));
}
