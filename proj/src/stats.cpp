#include "eggsynth/stats.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "eggsynth/analysis.hpp"
#include "eggsynth/rng.hpp"
#include "eggsynth/synthesis.hpp"

namespace eggsynth {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

struct McCounts {
  std::size_t under_05 = 0;
  std::size_t under_01 = 0;
  std::size_t under_001 = 0;
  std::size_t degenerate = 0;
};

// One replication; pure function of (seed, replication index).
McCounts run_replication(const MonteCarloOptions& options, const KernelPriors& priors,
                         std::size_t rep) {
  const std::size_t n = options.n_per_group;
  std::vector<double> fasting(n);
  std::vector<double> postprandial(n);

  if (options.mode == McMode::fast) {
    Rng rng = Rng::substream(options.seed, rep);
    for (std::size_t i = 0; i < n; ++i)
      fasting[i] = rng.normal(priors.mu_df_fasting_mean, priors.mu_df_fasting_sd);
    for (std::size_t i = 0; i < n; ++i)
      postprandial[i] = rng.normal(priors.mu_df_postprandial_mean, priors.mu_df_postprandial_sd);
  } else {
    // Full pipeline: synthesize each signal (same substream discipline as
    // generate_egg, noise 0, breathing off) and read the DF off its Welch
    // spectrum. Signal j of replication r is seeded from stream
    // (r << 32 | j) of the master seed.
    //
    // The DF window is 25% of the signal rather than the 12.5% analysis
    // default: at the default 1200 s / 2 Hz that is a 0.1 cpm grid, fine
    // enough that bin quantization stays small against the population
    // prior spread.
    const BandConfig bands;
    const GenerationConfig defaults;
    const std::size_t n_samples = defaults.n_samples();
    const std::vector<double> grid = one_sided_grid(n_samples, defaults.fs_hz);
    for (std::size_t j = 0; j < 2 * n; ++j) {
      const State state = j < n ? State::fasting : State::postprandial;
      const std::uint64_t signal_seed = Rng::mix(Rng::mix(options.seed) ^ ((rep << 32) | j));
      Rng draw_rng = Rng::substream(signal_seed, kStreamKernelDraw);
      const KernelDraw draw = draw_kernels(priors, state, false, draw_rng);
      const PsdModel psd = build_psd(draw, grid);
      Rng phase_rng = Rng::substream(signal_seed, kStreamMainPhase);
      const std::vector<double> samples = psd_to_timeseries(psd, n_samples, phase_rng);
      const PsdModel est = welch_psd(samples, defaults.fs_hz, n_samples / 4);
      const double df = 60.0 * dominant_frequency(est, bands.normo_lo_cpm / 60.0,
                                                  bands.normo_hi_cpm / 60.0);
      (j < n ? fasting[j] : postprandial[j - n]) = df;
    }
  }

  McCounts counts;
  // Degenerate replications (constant differences) are counted and
  // excluded rather than silently passed through the t-test.
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += fasting[i] - postprandial[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = fasting[i] - postprandial[i] - mean;
    ss += d * d;
  }
  if (ss == 0.0) {
    counts.degenerate = 1;
    return counts;
  }

  const TTestResult t = paired_t_test(fasting, postprandial);
  if (t.p_value < 0.05) ++counts.under_05;
  if (t.p_value < 0.01) ++counts.under_01;
  if (t.p_value < 0.001) ++counts.under_001;
  return counts;
}

MonteCarloReport report_from_counts(const MonteCarloOptions& options, const McCounts& totals,
                                    double runtime_s) {
  MonteCarloReport report;
  report.n_per_group = options.n_per_group;
  report.replications = options.replications;
  report.mode = options.mode;
  report.degenerate = totals.degenerate;
  const std::size_t valid = options.replications - totals.degenerate;
  if (valid > 0) {
    report.frac_p_lt_05 = static_cast<double>(totals.under_05) / static_cast<double>(valid);
    report.frac_p_lt_01 = static_cast<double>(totals.under_01) / static_cast<double>(valid);
    report.frac_p_lt_001 = static_cast<double>(totals.under_001) / static_cast<double>(valid);
  }
  report.runtime_s = runtime_s;
  return report;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  require(a > 0.0 && b > 0.0, "incomplete beta: a, b must be positive");
  require(x >= 0.0 && x <= 1.0, "incomplete beta: x must be in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_cdf(double t, std::size_t dof) {
  require(dof >= 1, "t_cdf: dof must be at least 1");
  const double nu = static_cast<double>(dof);
  const double x = nu / (nu + t * t);
  const double half_tail = 0.5 * regularized_incomplete_beta(x, nu / 2.0, 0.5);
  return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

TTestResult paired_t_test(std::span<const double> x, std::span<const double> y, Tail tail) {
  require(x.size() == y.size(), "paired_t_test: length mismatch");
  require(x.size() >= 2, "paired_t_test: need at least 2 pairs");
  const std::size_t n = x.size();

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i] - y[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) throw std::domain_error("paired_t_test: constant differences (zero SD)");

  TTestResult r;
  r.dof = n - 1;
  r.mean_diff = mean;
  r.sd_diff = sd;
  r.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
  switch (tail) {
    case Tail::two_sided: r.p_value = 2.0 * (1.0 - t_cdf(std::fabs(r.t_stat), r.dof)); break;
    case Tail::greater: r.p_value = 1.0 - t_cdf(r.t_stat, r.dof); break;
    case Tail::less: r.p_value = t_cdf(r.t_stat, r.dof); break;
  }
  return r;
}

bool MonteCarloReport::deterministic_equal(const MonteCarloReport& other) const {
  return n_per_group == other.n_per_group && replications == other.replications &&
         mode == other.mode && frac_p_lt_05 == other.frac_p_lt_05 &&
         frac_p_lt_01 == other.frac_p_lt_01 && frac_p_lt_001 == other.frac_p_lt_001 &&
         degenerate == other.degenerate;
}

MonteCarloReport run_monte_carlo(const MonteCarloOptions& options, const KernelPriors& priors) {
  require(options.replications >= 1, "replications must be at least 1");
  require(options.n_per_group >= 2, "n per group must be at least 2");
  const auto t0 = std::chrono::steady_clock::now();

  McCounts totals;
  const std::ptrdiff_t reps = static_cast<std::ptrdiff_t>(options.replications);
  std::size_t c05 = 0, c01 = 0, c001 = 0, cdeg = 0;
#pragma omp parallel for schedule(static) reduction(+ : c05, c01, c001, cdeg)
  for (std::ptrdiff_t r = 0; r < reps; ++r) {
    const McCounts c = run_replication(options, priors, static_cast<std::size_t>(r));
    c05 += c.under_05;
    c01 += c.under_01;
    c001 += c.under_001;
    cdeg += c.degenerate;
  }
  totals.under_05 = c05;
  totals.under_01 = c01;
  totals.under_001 = c001;
  totals.degenerate = cdeg;

  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report_from_counts(options, totals, dt);
}

MonteCarloReport run_monte_carlo_reference(const MonteCarloOptions& options,
                                           const KernelPriors& priors) {
  require(options.replications >= 1, "replications must be at least 1");
  require(options.n_per_group >= 2, "n per group must be at least 2");
  const auto t0 = std::chrono::steady_clock::now();

  McCounts totals;
  for (std::size_t r = 0; r < options.replications; ++r) {
    const McCounts c = run_replication(options, priors, r);
    totals.under_05 += c.under_05;
    totals.under_01 += c.under_01;
    totals.under_001 += c.under_001;
    totals.degenerate += c.degenerate;
  }

  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report_from_counts(options, totals, dt);
}

}  // namespace eggsynth
