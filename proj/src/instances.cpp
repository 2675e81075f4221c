#include "histotest/instances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "histotest/tester.hpp"

namespace histotest {

Pmf random_khistogram(std::size_t n, std::size_t k, RngStream& rng) {
  if (k < 1 || k > n) throw std::invalid_argument("k must be in [1, n]");
  // Breakpoints: a random (k-1)-subset of {1, .., n-1}, piece j ends at cut j.
  std::vector<std::size_t> slots(n - 1);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i + 1;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(slots.size() - i));
    std::swap(slots[i], slots[j]);
  }
  std::vector<std::size_t> cuts(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(k - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(n);

  std::vector<double> mass(n);
  double previous = -1.0;
  std::size_t lo = 1;
  for (std::size_t hi : cuts) {
    double level = 0.2 + 0.8 * rng.uniform01();
    if (std::abs(level - previous) < 0.05) level = previous > 0.6 ? previous - 0.3 : previous + 0.3;
    for (std::size_t i = lo; i <= hi; ++i) mass[i - 1] = level;
    previous = level;
    lo = hi + 1;
  }
  return Pmf::normalized(std::move(mass));
}

Pmf zigzag(std::size_t n, std::size_t blocks, double amplitude) {
  if (blocks < 1 || blocks > n) throw std::invalid_argument("blocks must be in [1, n]");
  if (!(amplitude >= 0.0 && amplitude <= 1.0)) {
    throw std::invalid_argument("amplitude must be in [0, 1]");
  }
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t block = i * blocks / n;
    mass[i] = (block % 2 == 0 ? 1.0 + amplitude : 1.0 - amplitude) / static_cast<double>(n);
  }
  return Pmf::normalized(std::move(mass));
}

CertifiedZigzag certified_zigzag(std::size_t n, std::size_t k, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0, 1)");
  CertifiedZigzag out;
  out.blocks = std::min(n, 2 * static_cast<std::size_t>(std::ceil(1.0 / eps)) * k);
  auto distance = [&](double a) {
    return 0.5 * dp_distance_to_khistogram(zigzag(n, out.blocks, a).measure(), k);
  };
  if (distance(1.0) < eps) throw std::domain_error("zigzag cannot reach the requested distance");
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (distance(mid) >= eps ? hi : lo) = mid;
  }
  out.amplitude = hi;
  out.pmf = zigzag(n, out.blocks, hi);
  out.certified_distance = distance(hi);
  return out;
}

}  // namespace histotest
