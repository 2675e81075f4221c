#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "histotest/instances.hpp"
#include "histotest/partition.hpp"

using namespace histotest;

namespace {

// Greedy-rule invariants that hold for any sample.
void check_divide_invariants(const IntervalPartition& part, const std::vector<std::uint64_t>& counts,
                             std::size_t buckets) {
  const std::size_t n = counts.size();
  REQUIRE(part.covers(n));
  REQUIRE(part.size() <= 8 * buckets);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return;
  const double b = static_cast<double>(buckets);
  for (const auto& cell : part) {
    std::uint64_t mass = 0;
    for (std::size_t i = cell.lo; i <= cell.hi; ++i) mass += counts[i - 1];
    const double frac = static_cast<double>(mass) / static_cast<double>(total);
    if (!cell.singleton()) REQUIRE(frac < 1.5 / b);
    for (std::size_t i = cell.lo; i <= cell.hi && !cell.singleton(); ++i) {
      REQUIRE(static_cast<double>(counts[i - 1]) / static_cast<double>(total) <= 0.5 / b);
    }
  }
}

}  // namespace

TEST_CASE("approx_divide examples") {
  SampleSet fives;
  fives.draws.assign(100, 5);
  const auto part = approx_divide(fives, 10, 4);
  bool has_singleton = false;
  for (const auto& cell : part) has_singleton |= (cell == Interval{5, 5});
  CHECK(has_singleton);
  CHECK(part.covers(10));

  SampleSet ones;
  ones.draws.assign(10, 1);
  const auto single = approx_divide(ones, 1, 2);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == Interval{1, 1});

  CHECK_THROWS_AS(approx_divide(ones, 1, 1), std::invalid_argument);
}

TEST_CASE("approx_divide heavy threshold tie is not heavy") {
  // B = 4: element 2 has mass exactly 1/8.
  const std::vector<std::uint64_t> counts{0, 1, 0, 0, 0, 0, 0, 7};
  const auto part = approx_divide_counts(counts, 4);
  for (const auto& cell : part) {
    if (cell.contains(std::size_t{2})) CHECK_FALSE(cell.singleton());
  }
}

TEST_CASE("approx_divide greedy invariants on random counts") {
  RngStream rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    const std::size_t buckets = 2 + rng.below(20);
    std::vector<std::uint64_t> counts(n);
    for (auto& c : counts) c = rng.below(4) == 0 ? rng.below(50) : rng.below(3);
    check_divide_invariants(approx_divide_counts(counts, buckets), counts, buckets);
  }
}

TEST_CASE("approx_divide on uniform keeps cell masses below 16/B") {
  const std::size_t n = 64;
  const std::size_t buckets = 8;
  const double delta = 0.1;
  const Pmf p = Pmf::uniform(n);
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngStream rng(seed);
    const auto m = static_cast<std::size_t>(approx_divide_sample_count(buckets, delta));
    const auto part = approx_divide(sample(p, m, rng), n, buckets);
    CHECK(part.size() <= 64);
    for (const auto& cell : part) {
      if (!cell.singleton() && p.mass(cell) > 16.0 / buckets) {
        ++violations;
        break;
      }
    }
  }
  CHECK(violations <= 15);
}

TEST_CASE("approx_sub_divide on the whole domain reduces to approx_divide") {
  const Pmf p = Pmf::normalized({5, 1, 1, 1, 2, 2, 2, 9, 1, 1, 1, 1, 3, 3, 3, 3});
  const std::size_t buckets = 4;
  const double delta = 0.1;
  PmfSource source(p);
  RngStream rng(17);
  RngStream replay = rng;
  const Interval whole{1, p.size()};
  const auto out = approx_sub_divide(source, std::span(&whole, 1), buckets, delta, rng);
  REQUIRE(out.size() == 1);

  PmfSource twin(p);
  SampleSet s;
  for (std::uint64_t i = 0; i < source.samples_drawn(); ++i) s.draws.push_back(twin.draw(replay));
  const auto direct = approx_divide(s, p.size(), buckets);
  CHECK(std::vector<Interval>(out[0].begin(), out[0].end()) ==
        std::vector<Interval>(direct.begin(), direct.end()));
}

TEST_CASE("approx_sub_divide splits pieces that straddle input intervals") {
  const Pmf p = Pmf::uniform(10);
  PmfSource source(p);
  RngStream rng(3);
  const std::vector<Interval> input{{7, 9}, {1, 3}};
  const auto out = approx_sub_divide(source, input, 2, 0.1, rng);
  REQUIRE(out.size() == 2);
  CHECK(out[0].span() == Interval{7, 9});
  CHECK(out[1].span() == Interval{1, 3});
  CHECK(out[0].size() + out[1].size() <= 8 * 2 + 2);
  // Uniform on six listed elements with B = 2: the first greedy piece takes
  // four elements, so it crosses from [1, 3] into [7, 9].
  CHECK(out[1][out[1].size() - 1].hi == 3);
  CHECK(out[0][0].lo == 7);
}

TEST_CASE("approx_sub_divide raw draws scale with 1/p(I)") {
  const Pmf p = Pmf::uniform(100);
  const std::vector<Interval> half{{1, 50}};
  const std::size_t buckets = 4;
  const double delta = 0.1;
  const double target = std::ceil(18.0 * buckets * std::log(buckets / delta));
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PmfSource source(p);
    RngStream rng(seed);
    approx_sub_divide(source, half, buckets, delta, rng);
    mean += static_cast<double>(source.samples_drawn()) / 100.0;
  }
  CHECK(mean == doctest::Approx(2.0 * target).epsilon(0.2));
}

TEST_CASE("approx_sub_divide edge cases") {
  PmfSource source(Pmf::uniform(10));
  RngStream rng(1);
  CHECK(approx_sub_divide(source, std::span<const Interval>{}, 4, 0.1, rng).empty());
  const std::vector<Interval> overlap{{1, 5}, {5, 8}};
  CHECK_THROWS_AS(approx_sub_divide(source, overlap, 4, 0.1, rng), std::invalid_argument);

  std::vector<double> w(10, 0.0);
  w[0] = 1.0;
  PmfSource point(Pmf{w});
  const std::vector<Interval> empty_mass{{5, 10}};
  CHECK_THROWS_WITH_AS(approx_sub_divide(point, empty_mass, 4, 0.1, rng),
                       "interval set mass too small", std::runtime_error);
}

TEST_CASE("sub-divide cell masses stay below p(I) 16/B") {
  const std::size_t n = 512;
  const std::size_t buckets = 32;
  const double delta = 0.1;
  int violations = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(1000 + static_cast<std::uint64_t>(t));
    const Pmf p = random_khistogram(n, 5, rng);
    PmfSource source(p);
    const Interval whole{1, n};
    const auto out = approx_sub_divide(source, std::span(&whole, 1), buckets, delta, rng);
    for (const auto& cell : out[0]) {
      if (!cell.singleton() && p.mass(cell) > 16.0 / buckets) {
        ++violations;
        break;
      }
    }
  }
  CHECK(static_cast<double>(violations) / trials <= delta + 0.05);
}
