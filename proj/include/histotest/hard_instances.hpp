#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "histotest/dist_core.hpp"
#include "histotest/rng.hpp"
#include "histotest/sampler.hpp"

namespace histotest {

/// cos(d arccos x), with x clamped to [-1, 1] when it overshoots by at most 1e-12.
double chebyshev_eval(int d, double x);

/// Two random variables on disjoint supports whose first d moments agree.
///
/// Roots of p(x) = x (x - 1/n)(x - 2/n) T_d(1 - Delta x): 0, 1/n, 2/n and
/// (1 - cos((2m-1) pi / (2d))) / Delta for m = 1..d. U takes the roots where
/// p' < 0 and U' those where p' > 0, each with probability proportional to 1/|p'(r)|.
struct MomentMatchedPair {
  std::size_t n = 0;
  std::size_t k = 0;
  double c = 2.0;
  double C = 40.0;
  int d = 0;
  double scale = 0.0;  // Delta = sqrt(k n) / (C ln^2 n)

  std::vector<double> roots;        // ascending
  std::vector<double> derivatives;  // p'(root), parallel to roots

  std::vector<double> support_u;
  std::vector<double> prob_u;
  std::vector<double> support_u_prime;
  std::vector<double> prob_u_prime;

  [[nodiscard]] double mean_u() const;
  [[nodiscard]] double mean_u_prime() const;
  /// E[U^t] and E[U'^t].
  [[nodiscard]] double moment_u(int t) const;
  [[nodiscard]] double moment_u_prime(int t) const;
  /// Pr[U = value] / Pr[U' = value], 0 if value is not in the support.
  [[nodiscard]] double prob_u_at(double value) const;
  [[nodiscard]] double prob_u_prime_at(double value) const;
};

/// Throws std::invalid_argument unless 1 <= k < n, and std::domain_error
/// ("increase C relative to c") when T_d(1 - Delta/n) or T_d(1 - 2 Delta/n) < 1/2.
MomentMatchedPair build_moment_matched_pair(std::size_t n, std::size_t k, double c = 2.0,
                                            double C = 40.0);

/// Sum over all roots of r^t / p'(r) together with the sum of the absolute
/// terms, accumulated with Neumaier summation. Zero for t <= d + 1.
struct RootSum {
  double value = 0.0;
  double magnitude = 0.0;
};
RootSum root_power_sum(const MomentMatchedPair& pair, int t);

struct HardPairDiagnostics {
  std::size_t exceptional = 0;         // entries with U_i != 1/n
  std::size_t h_pieces = 0;            // piece count of H
  bool h_is_khistogram = false;        // h_pieces <= k
  std::size_t right_border_pairs = 0;  // i with U'_i = 0 and U'_{i+1} = 2/n
  double nu_h = 0.0;                   // |1 - ||H||_1|
  double nu_h_prime = 0.0;
  double support_constant = 0.0;  // max support * sqrt(k n) / ln^2 n
  double mean_constant = 0.0;     // A in E[U] = (1/n)(1 + A sqrt(k/n))
};

struct HardPair {
  Measure h;
  Measure h_prime;
  double eps = 0.0;
  MomentMatchedPair pair;
  HardPairDiagnostics diagnostics;
};

/// H_i = 1/n + eps U_i and H'_i = 1/n + eps U'_i with n i.i.d. copies each.
/// Throws std::invalid_argument unless 0 < eps <= 1/10.
HardPair generate_hard_pair(std::size_t n, std::size_t k, double eps, RngStream& rng,
                            double c = 2.0, double C = 40.0);
HardPair generate_hard_pair(const MomentMatchedPair& pair, double eps, RngStream& rng);

/// Independent M_i ~ Poi(m * P_i).
CountVector poissonized_counts(const Measure& measure, double m, RngStream& rng);

/// F[j] = number of coordinates with count exactly j (index 0 included).
std::vector<std::uint64_t> fingerprint(const CountVector& counts);

/// Two-sample chi-square homogeneity test on fingerprints (multiplicities
/// j >= 1, sparse tail bins pooled). Returns the p-value; 1 when fewer than
/// two bins are populated.
double fingerprint_p_value(const std::vector<std::uint64_t>& a,
                           const std::vector<std::uint64_t>& b);

}  // namespace histotest
