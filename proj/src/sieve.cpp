#include "histotest/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace histotest {

namespace {

// m samples split into `batches` equal batches; the m mod batches leftover
// samples are drawn too (so the tally matches m) but not used.
IntervalEstimator draw_estimator(SampleSource& source, std::uint64_t m, std::size_t batches,
                                 RngStream& rng) {
  const std::uint64_t b = m / batches;
  std::vector<CountVector> per_batch;
  per_batch.reserve(batches);
  for (std::size_t t = 0; t < batches; ++t) per_batch.push_back(source.draw_counts(b, rng));
  if (const std::uint64_t leftover = m - b * batches; leftover > 0) {
    source.draw_counts(leftover, rng);
  }
  return IntervalEstimator(BatchedCounts::from_batch_counts(per_batch));
}

}  // namespace

std::uint64_t sieve_sample_size(std::size_t cells, std::size_t n, double eps, double delta,
                                const SieveConfig& config) {
  const double kk = static_cast<double>(cells);
  const double nn = static_cast<double>(n);
  const double log_factor = std::ceil(std::log(nn / delta));
  const double m =
      std::ceil(config.sample_constant * (kk / (eps * eps) + std::sqrt(kk * nn) / eps) *
                std::max(1.0, log_factor));
  const auto floor_m = static_cast<std::uint64_t>(estimator_batch_count(n, delta / 4.0));
  return std::max(static_cast<std::uint64_t>(m), floor_m);
}

std::vector<std::size_t> sieve_scan(const FlatMeasure& learned, const IntervalEstimator& check,
                                    double eps) {
  const auto& partition = learned.partition();
  const double cells = static_cast<double>(partition.size());
  const double n = static_cast<double>(check.domain_size());
  const double ratio_limit = 6.0 * std::max(1.0, eps * std::sqrt(n / cells));
  const double gap_scale = eps * eps / cells;

  std::vector<std::size_t> bad;
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const Interval cell = partition[j];
    bool flagged = false;
    for (std::size_t a = cell.lo; a <= cell.hi && !flagged; ++a) {
      for (std::size_t c = a; c <= cell.hi; ++c) {
        const Interval q{a, c};
        const double learned_mass = learned.mass_in_cell(j, q);
        const double checked_mass = check.estimate(q);
        if (checked_mass > ratio_limit * learned_mass ||
            std::abs(checked_mass - learned_mass) > 0.5 * std::sqrt(learned_mass * gap_scale)) {
          flagged = true;
          break;
        }
      }
    }
    if (flagged) bad.push_back(j);
  }
  return bad;
}

SieveOutcome learn_and_sieve(SampleSource& source, const IntervalPartition& partition,
                             std::size_t k, double eps, double delta, RngStream& rng,
                             const SieveConfig& config) {
  const std::size_t n = source.domain_size();
  if (!partition.covers(n)) throw std::invalid_argument("partition does not cover [1, n]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");

  const std::uint64_t before = source.samples_drawn();
  const std::uint64_t m = sieve_sample_size(partition.size(), n, eps, delta, config);
  const std::size_t batches = estimator_batch_count(n, delta / 4.0);

  const IntervalEstimator learning = draw_estimator(source, m, batches, rng);
  const IntervalEstimator checking = draw_estimator(source, m, batches, rng);

  SieveOutcome out;
  out.learned = empirical_learning(learning, partition);
  out.bad_cells = sieve_scan(out.learned, checking, eps);
  out.verdict = out.bad_cells.size() > k ? SieveVerdict::Reject : SieveVerdict::Ok;
  out.samples_used = source.samples_drawn() - before;
  out.batch_size = learning.counts().batch_size();
  out.batches = batches;
  return out;
}

}  // namespace histotest
