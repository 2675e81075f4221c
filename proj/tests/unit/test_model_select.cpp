#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "histotest/instances.hpp"
#include "histotest/model_select.hpp"

using namespace histotest;

TEST_CASE("amplified run count") {
  CHECK(amplified_runs(0.25) == 2 * static_cast<std::size_t>(std::ceil(9 * std::log(4.0))) + 1);
  CHECK(amplified_runs(1.0) == 1);
  CHECK_THROWS_AS(amplified_runs(0.0), std::invalid_argument);
}

TEST_CASE("single-element domain selects k = 1 without sampling") {
  PmfSource source(Pmf::uniform(1));
  RngStream rng(1);
  const auto out = select_k(source, 0.3, 0.1, rng);
  CHECK(out.selected == 1);
  CHECK(out.probes.empty());
  CHECK(out.total_samples == 0);
}

TEST_CASE("uniform selects k = 1") {
  int ones = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PmfSource source(Pmf::uniform(200));
    RngStream rng(seed);
    const auto out = select_k(source, 0.3, 0.5, rng);
    if (out.selected == 1) ++ones;
    CHECK(out.total_samples == source.samples_drawn());
  }
  CHECK(ones >= 9);
}

TEST_CASE("probes double and stop at the first accept") {
  // Four equal quarters at alternating levels: far from 3 pieces.
  const std::size_t n = 200;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = (i / 50) % 2 == 0 ? 1.9 : 0.1;
  const Pmf p = Pmf::normalized(w);
  PmfSource source(p);
  RngStream rng(4);
  SelectConfig config;
  const auto out = select_k(source, 0.2, 0.5, rng, config);
  REQUIRE(!out.probes.empty());
  for (std::size_t j = 0; j < out.probes.size(); ++j) {
    CHECK(out.probes[j].k == (std::size_t{1} << j));
    if (j + 1 < out.probes.size()) CHECK(out.probes[j].verdict == Verdict::Reject);
  }
  CHECK(out.probes.back().verdict == Verdict::Accept);
  CHECK(out.selected == out.probes.back().k);
  CHECK(out.selected <= 8);
  std::uint64_t sum = 0;
  for (const auto& probe : out.probes) sum += probe.samples;
  CHECK(sum == out.total_samples);
}

TEST_CASE("refinement probes below the doubling answer") {
  const std::size_t n = 200;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = i < 66 ? 1.9 : (i < 133 ? 0.2 : 1.0);
  PmfSource source(Pmf::normalized(w));
  RngStream rng(8);
  SelectConfig config;
  config.refine = true;
  const auto out = select_k(source, 0.2, 0.5, rng, config);
  REQUIRE(out.selected >= 1);
  CHECK(out.selected <= 4);
  std::size_t doubling_answer = 0;
  for (const auto& probe : out.probes) {
    if (!probe.refinement && probe.verdict == Verdict::Accept) doubling_answer = probe.k;
  }
  REQUIRE(doubling_answer > 0);
  for (const auto& probe : out.probes) {
    if (!probe.refinement) continue;
    CHECK(probe.k >= doubling_answer / 2);
    CHECK(probe.k < doubling_answer);
  }
  CHECK(out.selected <= doubling_answer);
}
