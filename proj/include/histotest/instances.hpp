#pragma once

#include <cstddef>

#include "histotest/dist_core.hpp"
#include "histotest/rng.hpp"

namespace histotest {

/// Exactly k pieces: k-1 distinct random breakpoints, levels drawn from
/// [0.2, 1] (adjacent levels forced apart), then normalized.
Pmf random_khistogram(std::size_t n, std::size_t k, RngStream& rng);

/// `blocks` near-equal consecutive blocks alternating between levels
/// (1 + amplitude)/n and (1 - amplitude)/n, normalized.
Pmf zigzag(std::size_t n, std::size_t blocks, double amplitude);

struct CertifiedZigzag {
  Pmf pmf;
  std::size_t blocks = 0;
  double amplitude = 0.0;
  /// Half the l1 distance to the nearest non-negative k-piece function; a
  /// lower bound on the TV distance to every k-histogram.
  double certified_distance = 0.0;
};

/// Zigzag with 2 ceil(1/eps) k blocks and the smallest amplitude (found by
/// bisection) whose certified distance from k-histograms is at least eps.
/// Throws std::domain_error if even amplitude 1 cannot reach eps.
CertifiedZigzag certified_zigzag(std::size_t n, std::size_t k, double eps);

}  // namespace histotest
