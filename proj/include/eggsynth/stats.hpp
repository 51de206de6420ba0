#ifndef EGGSYNTH_STATS_HPP
#define EGGSYNTH_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "eggsynth/model.hpp"

namespace eggsynth {

enum class Tail { two_sided, greater, less };

struct TTestResult {
  double t_stat = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  double mean_diff = 0.0;
  double sd_diff = 0.0;
};

// Lower-tail Student-t CDF via the regularized incomplete beta function
// (modified Lentz continued fraction). Absolute error below 1e-10 over the
// tested range.
double t_cdf(double t, std::size_t dof);

// Regularized incomplete beta I_x(a, b). Exposed for reuse and testing.
double regularized_incomplete_beta(double x, double a, double b);

// Paired t-test: d = x - y, t = mean(d) / (sd(d)/sqrt(n)) with the n-1
// sample SD. Throws std::domain_error when the differences are constant
// (zero SD) and std::invalid_argument on length mismatch or n < 2.
TTestResult paired_t_test(std::span<const double> x, std::span<const double> y,
                          Tail tail = Tail::two_sided);

enum class McMode { fast, full };

struct MonteCarloOptions {
  std::size_t n_per_group = 20;
  std::size_t replications = 1'000'000;
  McMode mode = McMode::fast;
  std::uint64_t seed = 0;
};

struct MonteCarloReport {
  std::size_t n_per_group = 0;
  std::size_t replications = 0;
  McMode mode = McMode::fast;
  // Fractions of replications with p below 0.05, 0.01, 0.001, over the
  // valid (non-degenerate) replications.
  double frac_p_lt_05 = 0.0;
  double frac_p_lt_01 = 0.0;
  double frac_p_lt_001 = 0.0;
  std::size_t degenerate = 0;  // replications with constant differences
  double runtime_s = 0.0;

  bool deterministic_equal(const MonteCarloReport& other) const;  // ignores runtime
};

// Replicated fasting-vs-postprandial comparison: per replication, n
// dominant frequencies per state and a paired t-test; the report carries
// the fraction of p values under each threshold.
//
// fast mode draws the DFs straight from the priors (what the generator
// yields at zero noise, minus grid quantization); full mode synthesizes
// every signal and extracts the DF from its Welch spectrum.
//
// Replication r uses the generator substream (seed, r), so any OpenMP
// thread count - including the serial reference below - produces the same
// report.
MonteCarloReport run_monte_carlo(const MonteCarloOptions& options,
                                 const KernelPriors& priors = {});

// Plain serial loop, kept as the reference the parallel kernel is checked
// against.
MonteCarloReport run_monte_carlo_reference(const MonteCarloOptions& options,
                                           const KernelPriors& priors = {});

}  // namespace eggsynth

#endif
