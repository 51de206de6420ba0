#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eggsynth/rng.hpp"
#include "eggsynth/stats.hpp"
#include "oracles.hpp"

using namespace eggsynth;

TEST_CASE("t_cdf closed-form anchors") {
  CHECK(t_cdf(0.0, 7) == doctest::Approx(0.5).epsilon(1e-14));
  // Cauchy: F(1) = 1/2 + atan(1)/pi = 3/4
  CHECK(std::fabs(t_cdf(1.0, 1) - 0.75) < 1e-12);
  // classic table quantile: t_{0.95, 20} = 1.7247
  CHECK(std::fabs(t_cdf(1.7247, 20) - 0.95) < 1e-4);
  CHECK(std::fabs(t_cdf(1.7247, 20) - 0.9499983239571366) < 1e-11);
  CHECK_THROWS_AS(t_cdf(1.0, 0), std::invalid_argument);
}

TEST_CASE("t_cdf matches the quadrature oracle to 1e-10") {
  for (std::size_t dof : {1, 2, 5, 20, 100}) {
    for (double t = -8.0; t <= 8.0; t += 0.5) {
      const double want = static_cast<double>(oracles::t_cdf(t, static_cast<long double>(dof)));
      INFO("t = " << t << ", dof = " << dof);
      CHECK(std::fabs(t_cdf(t, dof) - want) <= 1e-10);
    }
  }
}

TEST_CASE("t_cdf complements sum to one") {
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const double t = rng.uniform(-10.0, 10.0);
    const std::size_t dof = 1 + static_cast<std::size_t>(rng.next_u64() % 500);
    CHECK(std::fabs(t_cdf(t, dof) + t_cdf(-t, dof) - 1.0) < 1e-12);
  }
}

TEST_CASE("paired t-test against the hand-computed formula") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{1.1, 2.2, 2.9, 4.3};
  const TTestResult r = paired_t_test(x, y);
  CHECK(r.dof == 3);
  CHECK(r.mean_diff == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK(r.sd_diff == doctest::Approx(0.17078251276599331).epsilon(1e-13));
  CHECK(r.t_stat == doctest::Approx(-1.4638501094228).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.239442598636003).epsilon(1e-11));
}

TEST_CASE("paired t-test rejects degenerate inputs") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)paired_t_test(x, x), std::domain_error);
  const std::vector<double> shifted{2.0, 3.0, 4.0};
  CHECK_THROWS_AS((void)paired_t_test(x, shifted), std::domain_error);  // constant diffs
  const std::vector<double> shorter{1.0, 2.0};
  CHECK_THROWS_AS((void)paired_t_test(x, shorter), std::invalid_argument);
}

TEST_CASE("one-sided tails are consistent with the two-sided p") {
  const std::vector<double> x{1.0, 2.5, 3.2, 4.9, 5.1};
  const std::vector<double> y{1.3, 2.1, 3.4, 4.2, 4.8};
  const TTestResult two = paired_t_test(x, y, Tail::two_sided);
  const TTestResult gt = paired_t_test(x, y, Tail::greater);
  const TTestResult lt = paired_t_test(x, y, Tail::less);
  CHECK(gt.p_value + lt.p_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two.p_value == doctest::Approx(2.0 * std::min(gt.p_value, lt.p_value)).epsilon(1e-12));
}

TEST_CASE("p-values are uniform under the null") {
  Rng rng(8);
  const int reps = 100000;
  const int n = 8;
  std::vector<double> pvals;
  pvals.reserve(reps);
  std::vector<double> x(n), y(n);
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    pvals.push_back(paired_t_test(x, y).p_value);
  }
  std::sort(pvals.begin(), pvals.end());
  double ks = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double emp_hi = static_cast<double>(i + 1) / reps;
    const double emp_lo = static_cast<double>(i) / reps;
    ks = std::max(ks, std::max(std::fabs(emp_hi - pvals[i]), std::fabs(pvals[i] - emp_lo)));
  }
  // 1% critical value of the Kolmogorov statistic
  CHECK(ks < 1.628 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("monte carlo: zero-SD priors degenerate every replication") {
  KernelPriors priors;
  priors.mu_df_fasting_sd = priors.mu_df_postprandial_sd = 0.0;
  priors.sigma_df_fasting_sd = priors.sigma_df_postprandial_sd = 0.0;
  priors.mu_br_sd = priors.sigma_br_sd = priors.rel_mag_br_sd = 0.0;
  MonteCarloOptions options;
  options.replications = 100;
  options.seed = 1;
  const MonteCarloReport report = run_monte_carlo(options, priors);
  CHECK(report.degenerate == 100);
  CHECK(report.frac_p_lt_05 == 0.0);
  CHECK(report.frac_p_lt_01 == 0.0);
  CHECK(report.frac_p_lt_001 == 0.0);
}

TEST_CASE("monte carlo: thresholds nest and larger n has more power") {
  MonteCarloOptions options;
  options.replications = 100000;
  options.seed = 5;
  options.n_per_group = 20;
  const MonteCarloReport n20 = run_monte_carlo(options);
  options.n_per_group = 100;
  const MonteCarloReport n100 = run_monte_carlo(options);

  CHECK(n20.frac_p_lt_001 <= n20.frac_p_lt_01);
  CHECK(n20.frac_p_lt_01 <= n20.frac_p_lt_05);
  CHECK(n100.frac_p_lt_001 <= n100.frac_p_lt_01);
  CHECK(n100.frac_p_lt_01 <= n100.frac_p_lt_05);

  CHECK(n100.frac_p_lt_05 > n20.frac_p_lt_05);
  CHECK(n100.frac_p_lt_01 > n20.frac_p_lt_01);
  CHECK(n100.frac_p_lt_001 > n20.frac_p_lt_001);
}

TEST_CASE("monte carlo fractions match the noncentral-t power oracle") {
  const KernelPriors priors;
  MonteCarloOptions options;
  options.replications = 200000;
  options.seed = 11;
  options.n_per_group = 20;
  const MonteCarloReport report = run_monte_carlo(options);

  const long double mu_d = priors.mu_df_fasting_mean - priors.mu_df_postprandial_mean;
  const long double sd_d = std::sqrt(std::pow(priors.mu_df_fasting_sd, 2) +
                                     std::pow(priors.mu_df_postprandial_sd, 2));
  const double p05 = oracles::paired_t_power(20, 0.05L, mu_d, sd_d);
  const double p01 = oracles::paired_t_power(20, 0.01L, mu_d, sd_d);
  const double p001 = oracles::paired_t_power(20, 0.001L, mu_d, sd_d);
  // 200k replications: binomial SE ~ 0.09 pp, allow 0.5 pp
  CHECK(std::fabs(report.frac_p_lt_05 - p05) < 0.005);
  CHECK(std::fabs(report.frac_p_lt_01 - p01) < 0.005);
  CHECK(std::fabs(report.frac_p_lt_001 - p001) < 0.005);
}

TEST_CASE("parallel kernel reproduces the serial reference exactly") {
  MonteCarloOptions options;
  options.replications = 30000;
  options.seed = 17;
  const MonteCarloReport serial = run_monte_carlo_reference(options);
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif
  const MonteCarloReport parallel4 = run_monte_carlo(options);
#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  const MonteCarloReport parallel1 = run_monte_carlo(options);
  CHECK(serial.deterministic_equal(parallel4));
  CHECK(serial.deterministic_equal(parallel1));
  CHECK(serial.frac_p_lt_05 > 0.0);
}

TEST_CASE("fast and full modes track each other on the rejection fraction") {
  MonteCarloOptions options;
  options.replications = 2000;
  options.n_per_group = 20;
  options.seed = 23;
  options.mode = McMode::fast;
  const MonteCarloReport fast = run_monte_carlo(options);
  options.mode = McMode::full;
  const MonteCarloReport full = run_monte_carlo(options);

  // The full pipeline reads each DF off a Welch argmax, which carries
  // ~0.13 cpm of realization noise on top of the drawn value; at n = 20
  // that deflates the rejection fraction below the noise-free fast mode
  // by up to ~10 pp. Bound the deficit instead of expecting equality.
  CHECK(full.frac_p_lt_05 <= fast.frac_p_lt_05 + 0.03);
  CHECK(fast.frac_p_lt_05 - full.frac_p_lt_05 < 0.13);
  CHECK(full.frac_p_lt_05 > 0.02);
  CHECK(full.frac_p_lt_001 <= full.frac_p_lt_01);
  CHECK(full.frac_p_lt_01 <= full.frac_p_lt_05);
  CHECK(full.degenerate == 0);
}
