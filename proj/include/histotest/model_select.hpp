#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "histotest/rng.hpp"
#include "histotest/sampler.hpp"
#include "histotest/tester.hpp"

namespace histotest {

struct SelectionProbe {
  std::size_t k = 0;
  Verdict verdict = Verdict::Reject;
  std::size_t runs = 0;  // tester runs spent on this probe
  std::uint64_t samples = 0;
  bool refinement = false;
};

struct SelectionResult {
  std::size_t selected = 0;  // K
  std::vector<SelectionProbe> probes;
  std::uint64_t total_samples = 0;
};

struct SelectConfig {
  TesterConfig tester;
  /// Runs per probe: 2 ceil(amplification_constant * ln(1/delta_probe)) + 1.
  double amplification_constant = 9.0;
  bool refine = false;
};

/// Majority-vote run budget for failure probability delta.
std::size_t amplified_runs(double delta, double constant = 9.0);

/// Majority vote over amplified_runs(delta) tester runs; stops as soon as the
/// majority is decided.
SelectionProbe amplified_probe(SampleSource& source, std::size_t k, double eps, double delta,
                               RngStream& rng, const SelectConfig& config = {});

/// Doubling search k = 2^j, j = 0..ceil(log2 n) (k capped at n), with failure
/// budget delta / (2 (j+1)^2) per probe; K is the first accepted k. With
/// refine, i = max(1, K/2)..K-1 are then probed at delta / K and the smallest
/// accepting i replaces K.
/// Throws std::invalid_argument for bad eps/delta and std::runtime_error
/// ("tester inconsistent") when no probe accepts.
SelectionResult select_k(SampleSource& source, double eps, double delta, RngStream& rng,
                         const SelectConfig& config = {});

}  // namespace histotest
