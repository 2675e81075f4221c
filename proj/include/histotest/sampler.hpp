#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "histotest/dist_core.hpp"
#include "histotest/rng.hpp"

namespace histotest {

/// Per-coordinate counts; entry i-1 holds the count of element i.
using CountVector = std::vector<std::uint64_t>;

/// Sample access to an unknown distribution over [n].
///
/// Every sample handed out, whether as a single draw or folded into a count
/// vector, increments samples_drawn(). `draw_counts(m)` is distributed exactly
/// like tallying m calls to `draw()`.
class SampleSource {
 public:
  virtual ~SampleSource() = default;

  [[nodiscard]] virtual std::size_t domain_size() const noexcept = 0;

  std::size_t draw(RngStream& rng) {
    ++drawn_;
    return do_draw(rng);
  }

  CountVector draw_counts(std::uint64_t m, RngStream& rng) {
    drawn_ += m;
    return do_draw_counts(m, rng);
  }

  [[nodiscard]] std::uint64_t samples_drawn() const noexcept { return drawn_; }

 protected:
  virtual std::size_t do_draw(RngStream& rng) = 0;
  /// Default: m individual draws.
  virtual CountVector do_draw_counts(std::uint64_t m, RngStream& rng);

 private:
  std::uint64_t drawn_ = 0;
};

/// Multinomial(m, p) counts by sequential conditional binomials.
CountVector multinomial_counts(std::span<const double> p, std::uint64_t m, RngStream& rng);

/// Samples from a known Pmf: alias table for single draws, conditional
/// binomials for large count batches.
class PmfSource final : public SampleSource {
 public:
  explicit PmfSource(Pmf pmf);

  [[nodiscard]] std::size_t domain_size() const noexcept override { return pmf_.size(); }
  [[nodiscard]] const Pmf& pmf() const noexcept { return pmf_; }

 protected:
  std::size_t do_draw(RngStream& rng) override { return table_.draw(rng); }
  CountVector do_draw_counts(std::uint64_t m, RngStream& rng) override;

 private:
  Pmf pmf_;
  AliasTable table_;
};

/// Samples from (p + u_n)/2 given sample access to p: every output consumes
/// one draw of p, which is kept with probability 1/2 and otherwise replaced
/// by a uniform element.
class UniformMixSource final : public SampleSource {
 public:
  explicit UniformMixSource(SampleSource& inner) : inner_(inner) {}

  [[nodiscard]] std::size_t domain_size() const noexcept override { return inner_.domain_size(); }

 protected:
  std::size_t do_draw(RngStream& rng) override;
  CountVector do_draw_counts(std::uint64_t m, RngStream& rng) override;

 private:
  SampleSource& inner_;
};

}  // namespace histotest
