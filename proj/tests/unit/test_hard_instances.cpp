#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "histotest/hard_instances.hpp"

using namespace histotest;

namespace {

// T_d and U_{d-1} by the three-term recurrences; T_d' = d U_{d-1}.
double cheb_t(int d, double x) {
  double a = 1.0;
  double b = x;
  if (d == 0) return a;
  for (int j = 1; j < d; ++j) {
    const double c = 2.0 * x * b - a;
    a = b;
    b = c;
  }
  return b;
}

double cheb_t_prime(int d, double x) {
  if (d == 0) return 0.0;
  double a = 1.0;      // U_0
  double b = 2.0 * x;  // U_1
  if (d == 1) return 1.0;
  for (int j = 2; j < d; ++j) {
    const double c = 2.0 * x * b - a;
    a = b;
    b = c;
  }
  return d * b;
}

// p'(r) by the product rule on p(x) = g(x) T_d(1 - Delta x).
double derivative_oracle(const MomentMatchedPair& pair, double r) {
  const double inv = 1.0 / static_cast<double>(pair.n);
  const double g = r * (r - inv) * (r - 2 * inv);
  const double g_prime = (r - inv) * (r - 2 * inv) + r * (r - 2 * inv) + r * (r - inv);
  const double x = 1.0 - pair.scale * r;
  return g_prime * cheb_t(pair.d, x) - pair.scale * g * cheb_t_prime(pair.d, x);
}

}  // namespace

TEST_CASE("chebyshev evaluation") {
  for (int d = 0; d <= 30; ++d) CHECK(chebyshev_eval(d, 1.0) == doctest::Approx(1.0));
  CHECK(chebyshev_eval(2, 0.0) == doctest::Approx(-1.0));
  CHECK(chebyshev_eval(5, std::cos(std::numbers::pi / 7)) ==
        doctest::Approx(std::cos(5 * std::numbers::pi / 7)));
  CHECK(chebyshev_eval(3, 1.0 + 1e-13) == doctest::Approx(1.0));
  for (int d = 0; d <= 30; ++d) {
    for (double x = -1.0; x <= 1.0; x += 0.01) {
      REQUIRE(std::abs(chebyshev_eval(d, x) - cheb_t(d, x)) <= 1e-9);
    }
  }
}

TEST_CASE("pair structure for n = 1024, k = 4") {
  const auto pair = build_moment_matched_pair(1024, 4, 2.0, 40.0);
  const double n = 1024.0;
  CHECK(pair.d == static_cast<int>(std::ceil(2.0 * std::log(n))));
  CHECK(pair.roots.size() == static_cast<std::size_t>(pair.d) + 3);
  CHECK(pair.derivatives[0] == 2.0 / (n * n));
  for (std::size_t j = 1; j < pair.roots.size(); ++j) CHECK(pair.roots[j] > pair.roots[j - 1]);
  for (std::size_t j = 0; j < pair.roots.size(); ++j) {
    const double oracle = derivative_oracle(pair, pair.roots[j]);
    CHECK(std::abs(pair.derivatives[j] - oracle) <= 1e-6 * std::abs(oracle));
  }
  for (double s : pair.support_u) {
    CHECK(s >= 0.0);
    CHECK(s <= 2.0 / pair.scale);
    CHECK(std::find(pair.support_u_prime.begin(), pair.support_u_prime.end(), s) ==
          pair.support_u_prime.end());
  }
  for (double s : pair.support_u_prime) CHECK(s <= 2.0 / pair.scale);
  for (double q : pair.prob_u) CHECK(q > 0.0);
  for (double q : pair.prob_u_prime) CHECK(q > 0.0);
  double su = 0.0;
  double sup = 0.0;
  for (double q : pair.prob_u) su += q;
  for (double q : pair.prob_u_prime) sup += q;
  CHECK(std::abs(su - 1.0) <= 1e-12);
  CHECK(std::abs(sup - 1.0) <= 1e-12);

  CHECK(pair.prob_u_prime_at(0.0) > 1.0 / 3.0);
  CHECK(pair.prob_u_prime_at(2.0 / n) > 1.0 / 3.0);
  CHECK(1.0 - pair.prob_u_at(1.0 / n) <= 4.0 / (10.0 * n));
  CHECK(pair.mean_u() >= 1.0 / n);
}

TEST_CASE("root sums vanish and moments match") {
  for (auto [n, k] : {std::pair<std::size_t, std::size_t>{1024, 4}, {4096, 16}}) {
    const auto pair = build_moment_matched_pair(n, k);
    for (int t = 0; t <= pair.d + 1; ++t) {
      const RootSum s = root_power_sum(pair, t);
      CHECK(std::abs(s.value) <= 1e-6 * s.magnitude);
    }
    for (int t = 1; t <= pair.d; ++t) {
      const double a = pair.moment_u(t);
      const double b = pair.moment_u_prime(t);
      CHECK(std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b)));
    }
  }
}

TEST_CASE("construction preconditions") {
  CHECK_THROWS_AS(build_moment_matched_pair(10, 10), std::invalid_argument);
  CHECK_THROWS_AS(build_moment_matched_pair(10, 0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_moment_matched_pair(1024, 4, 2.0, 1e-4), "increase C relative to c",
                       std::domain_error);
}

TEST_CASE("hard pair shape over many draws") {
  const std::size_t n = 2048;
  const std::size_t k = 8;
  const double eps = 0.1;
  const auto pair = build_moment_matched_pair(n, k);
  int khist = 0;
  int borders = 0;
  int apv = 0;
  double nu = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RngStream rng(seed);
    const HardPair hp = generate_hard_pair(pair, eps, rng);
    const auto& d = hp.diagnostics;
    if (d.h_is_khistogram) ++khist;
    if (d.right_border_pairs >= n / 10) ++borders;
    nu = std::max({nu, d.nu_h, d.nu_h_prime});
    if (d.nu_h < 1.0 && d.nu_h_prime < 1.0) ++apv;
  }
  CHECK(khist >= 190);
  CHECK(borders >= 190);
  CHECK(apv >= 190);
  MESSAGE("largest |1 - ||H||_1| over draws: " << nu);
  RngStream rng(1);
  CHECK_THROWS_AS(generate_hard_pair(pair, 0.2, rng), std::invalid_argument);
}

TEST_CASE("entries follow the construction") {
  const auto pair = build_moment_matched_pair(512, 4);
  RngStream rng(3);
  const HardPair hp = generate_hard_pair(pair, 0.05, rng);
  const double n = 512.0;
  for (std::size_t i = 1; i <= 512; ++i) {
    bool found = false;
    for (double s : pair.support_u) found |= std::abs(hp.h.at(i) - (1.0 / n + 0.05 * s)) < 1e-15;
    REQUIRE(found);
    found = false;
    for (double s : pair.support_u_prime) {
      found |= std::abs(hp.h_prime.at(i) - (1.0 / n + 0.05 * s)) < 1e-15;
    }
    REQUIRE(found);
  }
}

TEST_CASE("poissonized counts") {
  RngStream rng(4);
  const Measure p({0.1, 0.2, 0.3, 0.5});
  for (auto c : poissonized_counts(p, 0.0, rng)) CHECK(c == 0);
  CHECK_THROWS_AS(poissonized_counts(p, -1.0, rng), std::invalid_argument);

  const double m = 50.0;
  const int reps = 10000;
  std::vector<double> mean(4, 0.0);
  double total_mean = 0.0;
  double total_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto c = poissonized_counts(p, m, rng);
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      mean[i] += static_cast<double>(c[i]) / reps;
      total += static_cast<double>(c[i]);
    }
    total_mean += total / reps;
    total_sq += total * total / reps;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const double lambda = m * p.at(i + 1);
    CHECK(std::abs(mean[i] - lambda) <= 3.0 * std::sqrt(lambda / reps));
  }
  const double variance = total_sq - total_mean * total_mean;
  CHECK(variance / total_mean >= 0.9);
  CHECK(variance / total_mean <= 1.1);
}

TEST_CASE("fingerprints of the two ensembles look alike at low sample rates") {
  const std::size_t n = 2048;
  const std::size_t k = 8;
  const double eps = 0.1;
  const auto pair = build_moment_matched_pair(n, k);
  const double m = std::sqrt(static_cast<double>(k * n)) / (10.0 * eps * std::log(double(n)));
  std::vector<double> p_values;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngStream rng(seed);
    const HardPair hp = generate_hard_pair(pair, eps, rng);
    const auto a = fingerprint(poissonized_counts(hp.h, m, rng));
    const auto b = fingerprint(poissonized_counts(hp.h_prime, m, rng));
    p_values.push_back(fingerprint_p_value(a, b));
  }
  std::nth_element(p_values.begin(), p_values.begin() + 25, p_values.end());
  CHECK(p_values[25] > 0.01);
}

TEST_CASE("fingerprint helpers") {
  const CountVector c{0, 1, 1, 3, 0, 0};
  const auto f = fingerprint(c);
  REQUIRE(f.size() == 4);
  CHECK(f[0] == 3);
  CHECK(f[1] == 2);
  CHECK(f[3] == 1);
  CHECK(fingerprint_p_value(f, f) == doctest::Approx(1.0));
  const std::vector<std::uint64_t> x{0, 100, 10, 1};
  const std::vector<std::uint64_t> y{0, 10, 100, 1};
  CHECK(fingerprint_p_value(x, y) < 1e-6);
}
