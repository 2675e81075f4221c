#include "histotest/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace histotest {

std::size_t amplified_runs(double delta, double constant) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
  const double half = std::ceil(constant * std::log(1.0 / delta));
  return 2 * static_cast<std::size_t>(std::max(0.0, half)) + 1;
}

SelectionProbe amplified_probe(SampleSource& source, std::size_t k, double eps, double delta,
                               RngStream& rng, const SelectConfig& config) {
  const std::size_t runs = amplified_runs(delta, config.amplification_constant);
  const std::size_t majority = runs / 2 + 1;
  const std::uint64_t before = source.samples_drawn();
  SelectionProbe probe;
  probe.k = k;
  std::size_t accepts = 0;
  std::size_t rejects = 0;
  while (accepts < majority && rejects < majority) {
    RngStream child = rng.fork();
    const auto verdict = test_histogram(source, k, eps, child, config.tester).verdict;
    ++(verdict == Verdict::Accept ? accepts : rejects);
    ++probe.runs;
  }
  probe.verdict = accepts >= majority ? Verdict::Accept : Verdict::Reject;
  probe.samples = source.samples_drawn() - before;
  return probe;
}

SelectionResult select_k(SampleSource& source, double eps, double delta, RngStream& rng,
                         const SelectConfig& config) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
  const std::size_t n = source.domain_size();
  const std::uint64_t before = source.samples_drawn();
  SelectionResult result;
  if (n == 1) {
    result.selected = 1;
    return result;
  }

  const auto top = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
  for (std::size_t j = 0; j <= top && result.selected == 0; ++j) {
    const std::size_t k = std::min<std::size_t>(std::size_t{1} << j, n);
    const double delta_j = delta / (2.0 * static_cast<double>((j + 1) * (j + 1)));
    SelectionProbe probe = amplified_probe(source, k, eps, delta_j, rng, config);
    result.probes.push_back(probe);
    if (probe.verdict == Verdict::Accept) result.selected = k;
  }
  if (result.selected == 0) throw std::runtime_error("tester inconsistent");

  if (config.refine && result.selected > 1) {
    const std::size_t big_k = result.selected;
    const double delta_i = delta / static_cast<double>(big_k);
    for (std::size_t i = std::max<std::size_t>(1, big_k / 2); i < big_k; ++i) {
      SelectionProbe probe = amplified_probe(source, i, eps, delta_i, rng, config);
      probe.refinement = true;
      result.probes.push_back(probe);
      if (probe.verdict == Verdict::Accept) {
        result.selected = i;
        break;
      }
    }
  }
  result.total_samples = source.samples_drawn() - before;
  return result;
}

}  // namespace histotest
