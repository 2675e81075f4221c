#include "histotest/hard_instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace histotest {

double chebyshev_eval(int d, double x) {
  if (d < 0) throw std::invalid_argument("degree must be non-negative");
  x = std::clamp(x, -1.0, 1.0);
  return std::cos(static_cast<double>(d) * std::acos(x));
}

namespace {

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  [[nodiscard]] double value() const { return sum + comp; }
};

double moment(const std::vector<double>& support, const std::vector<double>& prob, int t) {
  Neumaier acc;
  for (std::size_t j = 0; j < support.size(); ++j) acc.add(prob[j] * std::pow(support[j], t));
  return acc.value();
}

double prob_at(const std::vector<double>& support, const std::vector<double>& prob, double v) {
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (support[j] == v) return prob[j];
  }
  return 0.0;
}

// Index drawn from a small discrete distribution by inverse CDF.
std::size_t draw_index(const std::vector<double>& cdf, RngStream& rng) {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<double> cumulative(const std::vector<double>& prob) {
  std::vector<double> cdf(prob.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < prob.size(); ++j) cdf[j] = (acc += prob[j]);
  return cdf;
}

}  // namespace

double MomentMatchedPair::mean_u() const { return moment(support_u, prob_u, 1); }
double MomentMatchedPair::mean_u_prime() const { return moment(support_u_prime, prob_u_prime, 1); }
double MomentMatchedPair::moment_u(int t) const { return moment(support_u, prob_u, t); }
double MomentMatchedPair::moment_u_prime(int t) const {
  return moment(support_u_prime, prob_u_prime, t);
}
double MomentMatchedPair::prob_u_at(double value) const {
  return prob_at(support_u, prob_u, value);
}
double MomentMatchedPair::prob_u_prime_at(double value) const {
  return prob_at(support_u_prime, prob_u_prime, value);
}

MomentMatchedPair build_moment_matched_pair(std::size_t n, std::size_t k, double c, double C) {
  if (k < 1 || k >= n) throw std::invalid_argument("need 1 <= k < n");
  if (!(c > 0.0 && C > 0.0)) throw std::invalid_argument("constants must be positive");

  MomentMatchedPair pair;
  pair.n = n;
  pair.k = k;
  pair.c = c;
  pair.C = C;
  const double nn = static_cast<double>(n);
  const double log_n = std::log(nn);
  pair.d = std::max(1, static_cast<int>(std::ceil(c * log_n)));
  pair.scale = std::sqrt(static_cast<double>(k) * nn) / (C * log_n * log_n);
  const double delta = pair.scale;
  const int d = pair.d;

  const double t1 = chebyshev_eval(d, 1.0 - delta / nn);
  const double t2 = chebyshev_eval(d, 1.0 - 2.0 * delta / nn);
  if (t1 < 0.5 || t2 < 0.5 || 1.0 - 2.0 * delta / nn < -1.0) {
    throw std::domain_error("increase C relative to c");
  }

  const double n2 = nn * nn;
  pair.roots = {0.0, 1.0 / nn, 2.0 / nn};
  pair.derivatives = {2.0 / n2 * chebyshev_eval(d, 1.0), -t1 / n2, 2.0 * t2 / n2};
  for (int m = 1; m <= d; ++m) {
    const double theta = (2.0 * m - 1.0) * std::numbers::pi / (2.0 * d);
    // 1 - cos(theta) = 2 sin^2(theta / 2), without cancellation.
    const double s = std::sin(theta / 2.0);
    const double r = 2.0 * s * s / delta;
    const double t_prime = d * std::sin(d * theta) / std::sin(theta);
    pair.roots.push_back(r);
    pair.derivatives.push_back(-delta * r * (r - 1.0 / nn) * (r - 2.0 / nn) * t_prime);
  }
  for (std::size_t j = 1; j < pair.roots.size(); ++j) {
    if (!(pair.roots[j] > pair.roots[j - 1])) {
      throw std::domain_error("increase C relative to c");
    }
  }

  for (std::size_t j = 0; j < pair.roots.size(); ++j) {
    const double w = 1.0 / std::abs(pair.derivatives[j]);
    if (pair.derivatives[j] < 0.0) {
      pair.support_u.push_back(pair.roots[j]);
      pair.prob_u.push_back(w);
    } else {
      pair.support_u_prime.push_back(pair.roots[j]);
      pair.prob_u_prime.push_back(w);
    }
  }
  auto normalize = [](std::vector<double>& p) {
    Neumaier acc;
    for (double v : p) acc.add(v);
    const double total = acc.value();
    for (double& v : p) v /= total;
  };
  normalize(pair.prob_u);
  normalize(pair.prob_u_prime);
  return pair;
}

RootSum root_power_sum(const MomentMatchedPair& pair, int t) {
  Neumaier value;
  Neumaier magnitude;
  for (std::size_t j = 0; j < pair.roots.size(); ++j) {
    const double term = std::pow(pair.roots[j], t) / pair.derivatives[j];
    value.add(term);
    magnitude.add(std::abs(term));
  }
  return {value.value(), magnitude.value()};
}

HardPair generate_hard_pair(const MomentMatchedPair& pair, double eps, RngStream& rng) {
  if (!(eps > 0.0 && eps <= 0.1)) throw std::invalid_argument("eps must be in (0, 1/10]");
  const std::size_t n = pair.n;
  const double nn = static_cast<double>(n);

  HardPair out;
  out.eps = eps;
  out.pair = pair;
  auto& diag = out.diagnostics;

  const auto cdf_u = cumulative(pair.prob_u);
  const auto cdf_up = cumulative(pair.prob_u_prime);
  const auto one_over_n = static_cast<std::size_t>(
      std::find(pair.support_u.begin(), pair.support_u.end(), 1.0 / nn) - pair.support_u.begin());
  const auto zero_idx = static_cast<std::size_t>(
      std::find(pair.support_u_prime.begin(), pair.support_u_prime.end(), 0.0) -
      pair.support_u_prime.begin());
  const auto two_idx = static_cast<std::size_t>(
      std::find(pair.support_u_prime.begin(), pair.support_u_prime.end(), 2.0 / nn) -
      pair.support_u_prime.begin());

  std::vector<std::size_t> u_idx(n);
  std::vector<std::size_t> up_idx(n);
  for (std::size_t i = 0; i < n; ++i) u_idx[i] = draw_index(cdf_u, rng);
  for (std::size_t i = 0; i < n; ++i) up_idx[i] = draw_index(cdf_up, rng);

  std::vector<double> h(n);
  std::vector<double> hp(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = 1.0 / nn + eps * pair.support_u[u_idx[i]];
    hp[i] = 1.0 / nn + eps * pair.support_u_prime[up_idx[i]];
    if (u_idx[i] != one_over_n) ++diag.exceptional;
  }
  diag.h_pieces = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (u_idx[i] != u_idx[i - 1]) ++diag.h_pieces;
  }
  diag.h_is_khistogram = diag.h_pieces <= pair.k;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (up_idx[i] == zero_idx && up_idx[i + 1] == two_idx) ++diag.right_border_pairs;
  }
  out.h = Measure(std::move(h));
  out.h_prime = Measure(std::move(hp));
  diag.nu_h = std::abs(1.0 - out.h.total());
  diag.nu_h_prime = std::abs(1.0 - out.h_prime.total());

  const double log_n = std::log(nn);
  const double max_support = std::max(pair.support_u.back(), pair.support_u_prime.back());
  diag.support_constant =
      max_support * std::sqrt(static_cast<double>(pair.k) * nn) / (log_n * log_n);
  diag.mean_constant = (nn * pair.mean_u() - 1.0) / std::sqrt(static_cast<double>(pair.k) / nn);
  return out;
}

HardPair generate_hard_pair(std::size_t n, std::size_t k, double eps, RngStream& rng, double c,
                            double C) {
  return generate_hard_pair(build_moment_matched_pair(n, k, c, C), eps, rng);
}

CountVector poissonized_counts(const Measure& measure, double m, RngStream& rng) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("rate must be non-negative");
  CountVector counts(measure.size(), 0);
  const auto values = measure.values();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double mean = m * values[i];
    if (mean <= 0.0) continue;
    std::poisson_distribution<std::uint64_t> poisson(mean);
    counts[i] = poisson(rng);
  }
  return counts;
}

std::vector<std::uint64_t> fingerprint(const CountVector& counts) {
  std::uint64_t top = 0;
  for (auto c : counts) top = std::max(top, c);
  std::vector<std::uint64_t> f(counts.empty() ? 0 : top + 1, 0);
  for (auto c : counts) ++f[c];
  return f;
}

double fingerprint_p_value(const std::vector<std::uint64_t>& a,
                           const std::vector<std::uint64_t>& b) {
  // Bins over multiplicities j >= 1, each closed once it holds >= 10
  // coordinates; a short tail is folded into the last bin.
  constexpr double kMinBin = 10.0;
  const std::size_t top = std::max(a.size(), b.size());
  auto at = [](const std::vector<std::uint64_t>& f, std::size_t j) {
    return j < f.size() ? static_cast<double>(f[j]) : 0.0;
  };
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> open{0.0, 0.0};
  for (std::size_t j = 1; j < top; ++j) {
    open.first += at(a, j);
    open.second += at(b, j);
    if (open.first + open.second >= kMinBin) {
      bins.push_back(open);
      open = {0.0, 0.0};
    }
  }
  if (open.first + open.second > 0.0) {
    if (bins.empty()) {
      bins.push_back(open);
    } else {
      bins.back().first += open.first;
      bins.back().second += open.second;
    }
  }
  if (bins.size() < 2) return 1.0;

  double total_a = 0.0;
  double total_b = 0.0;
  for (const auto& [x, y] : bins) {
    total_a += x;
    total_b += y;
  }
  if (total_a == 0.0 || total_b == 0.0) return 0.0;
  const double grand = total_a + total_b;
  double stat = 0.0;
  for (const auto& [x, y] : bins) {
    const double col = x + y;
    const double ea = total_a * col / grand;
    const double eb = total_b * col / grand;
    stat += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  const boost::math::chi_squared dist(static_cast<double>(bins.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace histotest
