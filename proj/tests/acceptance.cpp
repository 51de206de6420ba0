// Acceptance suite: one pass/fail line per criterion, exit code = number
// of failed criteria. Run via ctest (test name "acceptance") or directly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eggsynth/analysis.hpp"
#include "eggsynth/io.hpp"
#include "eggsynth/model.hpp"
#include "eggsynth/rng.hpp"
#include "eggsynth/stats.hpp"
#include "eggsynth/synthesis.hpp"
#include "eggsynth/version.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace eggsynth;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", criterion, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  double wall_s = 0.0;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + EGGSYNTH_CLI_PATH " " + args +
                          " > acc_stdout.tmp 2> acc_stderr.tmp";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.exit_code = WEXITSTATUS(status);
  r.out = slurp("acc_stdout.tmp");
  return r;
}

double segment_energy(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  double e = 0.0;
  for (std::size_t i = lo; i < hi; ++i) e += x[i] * x[i];
  return e;
}

// --- criterion 1: byte determinism + runtime ------------------------------

void criterion_determinism() {
  bool pass = true;
  std::string detail;
  double worst_time = 0.0;
  for (int seed = 1; seed <= 10 && pass; ++seed) {
    const std::string s = std::to_string(seed);
    const CliResult a = run_cli("generate --seed " + s + " --out acc_a.csv");
    const CliResult b = run_cli("generate --seed " + s + " --out acc_b.csv");
    const CliResult c =
        run_cli("generate --seed " + s + " --out acc_c.csv", "OMP_NUM_THREADS=4");
    worst_time = std::max({worst_time, a.wall_s, b.wall_s, c.wall_s});
    if (a.exit_code != 0 || b.exit_code != 0 || c.exit_code != 0) {
      pass = false;
      detail = "seed " + s + ": nonzero exit";
      break;
    }
    const std::string csv_a = slurp("acc_a.csv");
    if (csv_a != slurp("acc_b.csv") || csv_a != slurp("acc_c.csv")) {
      pass = false;
      detail = "seed " + s + ": csv bytes differ";
      break;
    }
    if (slurp("acc_a.csv.meta.json") != slurp("acc_b.csv.meta.json") || a.out != b.out ||
        a.out != c.out) {
      pass = false;
      detail = "seed " + s + ": metadata or stdout differ";
      break;
    }
  }
  if (pass && worst_time >= 1.0) {
    pass = false;
    detail = "generation took " + std::to_string(worst_time) + " s";
  }
  if (pass)
    detail = "seeds 1..10 byte-identical across runs and thread counts; worst wall time " +
             std::to_string(worst_time) + " s";
  report(1, "seeded generation is byte-identical and fast", pass, detail);
}

// --- criterion 2: Parseval per spectrally generated segment ---------------

void criterion_parseval() {
  Rng rng(20240501);
  int checked = 0;
  double worst = 0.0;
  bool pass = true;
  std::string detail;
  const double fs_choices[] = {1.0, 2.0, 4.0};

  for (int trial = 0; trial < 100 && pass; ++trial) {
    GenerationConfig config;
    config.duration_s = 300.0 + std::floor(rng.uniform(0.0, 900.0));
    config.fs_hz = fs_choices[rng.next_u64() % 3];
    config.state = (rng.next_u64() & 1) ? State::fasting : State::postprandial;
    config.breathing = (rng.next_u64() & 1) != 0;
    config.seed = rng.next_u64();
    config.noise_scale = 0.0;

    auto check = [&](double got, double want, const char* what) {
      const double rel = std::fabs(got - want) / want;
      worst = std::max(worst, rel);
      ++checked;
      if (rel > 1e-9) {
        pass = false;
        detail = std::string(what) + " off by " + std::to_string(rel);
      }
    };

    const int kind = static_cast<int>(rng.next_u64() % 3);
    if (kind == 0) {
      const GenerationResult r = generate_egg(config);
      const std::size_t n = r.signal.samples.size();
      check(segment_energy(r.signal.samples, 0, n), parseval_energy(r.psd, n), "plain");
    } else if (kind == 1) {
      const double a = 60.0 + std::floor(rng.uniform(0.0, config.duration_s / 3.0));
      const double b = a + 60.0 + std::floor(rng.uniform(0.0, config.duration_s / 3.0));
      config.arrhythmia_window_s = {{a, b}};
      const GenerationResult r = generate_egg(config);
      const std::size_t a0 = static_cast<std::size_t>(std::llround(a * config.fs_hz));
      const std::size_t a1 = static_cast<std::size_t>(std::llround(b * config.fs_hz));
      check(segment_energy(r.signal.samples, a0, a1),
            parseval_energy(*r.arrhythmia_psd, a1 - a0), "arrhythmia segment");
    } else {
      config.duration_s = 600.0 + std::floor(rng.uniform(0.0, 600.0));
      config.sickness_onset_s = std::floor(config.duration_s * 0.3);
      config.sickness_offset_s = std::floor(config.duration_s * 0.7);
      const VrGenerationResult r = generate_egg_vr(config);
      const std::size_t o0 =
          static_cast<std::size_t>(std::llround(config.sickness_onset_s * config.fs_hz));
      const std::size_t o1 =
          static_cast<std::size_t>(std::llround(config.sickness_offset_s * config.fs_hz));
      const std::size_t n = r.signal.samples.size();
      check(segment_energy(r.signal.samples, 0, o0), parseval_energy(r.normal_psd, o0),
            "vr pre");
      check(segment_energy(r.signal.samples, o0, o1), parseval_energy(r.sickness_psd, o1 - o0),
            "vr sickness");
      check(segment_energy(r.signal.samples, o1, n), parseval_energy(*r.post_psd, n - o1),
            "vr post");
    }
  }
  if (pass) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d segment energies within 1e-9 (worst rel err %.2e)",
                  checked, worst);
    detail = buf;
  }
  report(2, "segment energy equals the PSD Parseval sum", pass, detail);
}

// --- criterion 3: DF calibration against the priors -----------------------

void criterion_df_calibration() {
  const KernelPriors priors;
  const int n_seeds = 10000;
  bool pass = true;
  std::string detail;

  for (const State state : {State::fasting, State::postprandial}) {
    double sum = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sum)
    for (int seed = 0; seed < n_seeds; ++seed) {
      GenerationConfig config;
      config.breathing = false;
      config.noise_scale = 0.0;
      config.state = state;
      config.seed =
          static_cast<std::uint64_t>(seed) + (state == State::fasting ? 1 : 5000001);
      const GenerationResult r = generate_egg(config, priors);
      const PsdModel psd = welch_psd(r.signal.samples, config.fs_hz);
      sum += 60.0 * dominant_frequency(psd, 2.0 / 60.0, 4.0 / 60.0);
    }
    const double mean = sum / n_seeds;
    const double want = priors.mu_df_mean(state);
    const double err = std::fabs(mean - want);
    detail += to_string(state) + " mean " + std::to_string(mean) + " vs " +
              std::to_string(want) + " (|err| " + std::to_string(err) + " cpm); ";
    if (err > 0.06) pass = false;
  }
  report(3, "mean extracted DF matches the population prior within 0.06 cpm", pass, detail);
}

// --- criterion 4: Monte Carlo structure + power oracle ---------------------

void criterion_monte_carlo() {
  const KernelPriors priors;
  MonteCarloOptions options;
  options.replications = 1000000;
  options.seed = 99;
  options.n_per_group = 20;
  const MonteCarloReport r20 = run_monte_carlo(options);
  options.n_per_group = 100;
  const MonteCarloReport r100 = run_monte_carlo(options);

  bool pass = true;
  std::string detail;

  if (!(r20.frac_p_lt_001 < r20.frac_p_lt_01 && r20.frac_p_lt_01 < r20.frac_p_lt_05 &&
        r100.frac_p_lt_001 < r100.frac_p_lt_01 && r100.frac_p_lt_01 < r100.frac_p_lt_05)) {
    pass = false;
    detail += "threshold nesting violated; ";
  }
  if (!(r100.frac_p_lt_05 > r20.frac_p_lt_05 && r100.frac_p_lt_01 > r20.frac_p_lt_01 &&
        r100.frac_p_lt_001 > r20.frac_p_lt_001)) {
    pass = false;
    detail += "n=100 not above n=20; ";
  }

  const long double mu_d = priors.mu_df_fasting_mean - priors.mu_df_postprandial_mean;
  const long double sd_d = std::sqrt(std::pow(priors.mu_df_fasting_sd, 2) +
                                     std::pow(priors.mu_df_postprandial_sd, 2));
  struct Check {
    std::size_t n;
    double alpha;
    double got;
  };
  const Check checks[] = {
      {20, 0.05, r20.frac_p_lt_05},   {20, 0.01, r20.frac_p_lt_01},
      {20, 0.001, r20.frac_p_lt_001}, {100, 0.05, r100.frac_p_lt_05},
      {100, 0.01, r100.frac_p_lt_01}, {100, 0.001, r100.frac_p_lt_001},
  };
  for (const Check& c : checks) {
    const double want = oracles::paired_t_power(c.n, c.alpha, mu_d, sd_d);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "n=%zu a=%g: %.4f vs %.4f; ", c.n, c.alpha, c.got, want);
    detail += buf;
    if (std::fabs(c.got - want) > 0.005) pass = false;
  }
  report(4, "Monte Carlo fractions are ordered and match the power oracle", pass, detail);
}

// --- criterion 5: sickness feature trends ----------------------------------

void criterion_sickness_trends() {
  const int n_seeds = 100;
  int all_trends = 0;
#pragma omp parallel for schedule(static) reduction(+ : all_trends)
  for (int seed = 1; seed <= n_seeds; ++seed) {
    GenerationConfig config;
    config.state = State::postprandial;
    config.seed = static_cast<std::uint64_t>(seed);
    const VrGenerationResult r = generate_egg_vr(config);
    const FeatureSet& a = r.normal_features;
    const FeatureSet& b = r.sickness_features;
    const bool ok = b.total_power > a.total_power && b.pct_normo < a.pct_normo &&
                    b.pct_tachy > a.pct_tachy && b.median_freq_hz > a.median_freq_hz &&
                    b.crest_factor < a.crest_factor;
    if (ok) ++all_trends;
  }
  const bool pass = all_trends >= 95;
  report(5, "sickness shifts power, bands, MF and CF in the expected direction", pass,
         std::to_string(all_trends) + "/100 seeds show all five trends");
}

// --- criterion 6: t CDF accuracy -------------------------------------------

void criterion_t_cdf() {
  double worst = 0.0;
  for (const std::size_t dof : {1UL, 2UL, 5UL, 20UL, 100UL, 1000UL}) {
    for (double t = -8.0; t <= 8.000001; t += 0.25) {
      const double want = static_cast<double>(oracles::t_cdf(static_cast<long double>(t),
                                                             static_cast<long double>(dof)));
      worst = std::max(worst, std::fabs(t_cdf(t, dof) - want));
    }
  }
  const double cauchy_err = std::fabs(t_cdf(1.0, 1) - 0.75);
  const bool pass = worst <= 1e-10 && cauchy_err <= 1e-12;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst abs error %.2e, |F(1;1)-3/4| = %.2e", worst,
                cauchy_err);
  report(6, "t CDF accurate to 1e-10 with the Cauchy anchor exact", pass, buf);
}

// --- criterion 7: round-trip kernel fitting through the CLI ---------------

void criterion_fit_roundtrip() {
  bool pass = true;
  std::string detail;
  double worst_mu = 0.0;
  double worst_sigma = 0.0;
  const std::size_t window = 600;
  const double bin_hz = 2.0 / static_cast<double>(window);

  for (int seed = 1; seed <= 100 && pass; ++seed) {
    const CliResult gen = run_cli("generate --duration 3600 --seed " + std::to_string(seed) +
                                  " --out acc_fit.csv");
    if (gen.exit_code != 0) {
      pass = false;
      detail = "generate failed at seed " + std::to_string(seed);
      break;
    }
    const json meta = json::parse(slurp("acc_fit.csv.meta.json"));
    const double mu_cpm = meta["draw"]["mu_df_cpm"].get<double>();
    const double sigma_cpm = meta["draw"]["sigma_df_cpm"].get<double>();
    char band[64];
    std::snprintf(band, sizeof(band), "%.6f,%.6f", mu_cpm - 4.0 * sigma_cpm,
                  mu_cpm + 4.0 * sigma_cpm);
    const CliResult fit = run_cli("fit acc_fit.csv --no-filter --window " +
                                  std::to_string(window) + " --band " + std::string(band));
    if (fit.exit_code != 0) {
      pass = false;
      detail = "fit failed at seed " + std::to_string(seed);
      break;
    }
    const json j = json::parse(fit.out);
    const double mu_err_hz = std::fabs(j["mu_hz"].get<double>() - mu_cpm / 60.0);
    const double sigma_rel = std::fabs(j["sigma_cpm"].get<double>() / sigma_cpm - 1.0);
    worst_mu = std::max(worst_mu, mu_err_hz);
    worst_sigma = std::max(worst_sigma, sigma_rel);
    if (mu_err_hz > bin_hz || sigma_rel > 0.10) {
      pass = false;
      detail = "seed " + std::to_string(seed) + ": mu err " + std::to_string(mu_err_hz) +
               " Hz, sigma rel err " + std::to_string(sigma_rel);
    }
  }
  if (pass) {
    detail = "100 draws: worst mu err " + std::to_string(worst_mu) + " Hz (bin " +
             std::to_string(bin_hz) + "), worst sigma rel err " + std::to_string(worst_sigma);
  }
  report(7, "fit recovers the drawn kernel within a bin and 10 percent", pass, detail);
}

// --- criterion 8: band-pass against its own transfer function -------------

void criterion_filter() {
  const double fs = 2.0;
  const IirFilter filt = design_butterworth_bandpass(3, 0.03, 0.6, fs);
  bool pass = true;
  std::string detail;

  const std::vector<double> dc(4000, 1.0);
  const std::vector<double> dc_out = filtfilt(filt, dc);
  double dc_leak = 0.0;
  for (std::size_t i = dc.size() / 4; i < 3 * dc.size() / 4; ++i)
    dc_leak = std::max(dc_leak, std::fabs(dc_out[i]));
  if (dc_leak > 1e-3) {  // -60 dB
    pass = false;
    detail += "DC leak " + std::to_string(dc_leak) + "; ";
  }

  // ten probe tones, each an integer number of cycles over 4000 samples
  const int kk[] = {80, 100, 134, 180, 268, 400, 600, 800, 1000, 1100};
  double worst = 0.0;
  for (int k : kk) {
    const double f = static_cast<double>(k) / 2000.0;
    std::vector<double> x(4000);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = std::sin(2.0 * 3.14159265358979323846 * f * static_cast<double>(i) / fs);
    const std::vector<double> y = filtfilt(filt, x);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = x.size() / 4; i < 3 * x.size() / 4; ++i) {
      num += y[i] * y[i];
      den += x[i] * x[i];
    }
    const double got = std::sqrt(num / den);
    const double want = std::pow(filter_magnitude(filt, f, fs), 2);
    const double rel = std::fabs(got - want) / want;
    worst = std::max(worst, rel);
    if (rel > 0.02) {
      pass = false;
      detail += "f=" + std::to_string(f) + " rel err " + std::to_string(rel) + "; ";
    }
  }
  if (pass) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "DC leak %.2e, worst |H|^2 mismatch %.2e", dc_leak, worst);
    detail = buf;
  }
  report(8, "band-pass rejects DC below -60 dB and matches |H(f)|^2 within 2%", pass, detail);
}

// --- criterion 9: colored-noise floor vs brute-force oracle ---------------

void criterion_colored_noise() {
  Rng meta_rng(321);
  bool pass = true;
  std::string detail;
  for (int trial = 0; trial < 20 && pass; ++trial) {
    const double scale = meta_rng.uniform(0.05, 2.0);
    const std::size_t n_samples = 64 + 2 * (meta_rng.next_u64() % 2000);
    const std::uint64_t seed = meta_rng.next_u64();

    KernelDraw draw;
    draw.mu_df_cpm = 2.9336;
    draw.sigma_df_cpm = 0.4836;
    draw.mu_br_cpm = 16.741;
    draw.sigma_br_cpm = 2.6655;
    draw.rel_mag_br = 0.19;
    draw.breathing = true;
    const PsdModel psd = build_psd(draw, one_sided_grid(n_samples, 2.0));

    Rng lib_rng(seed);
    const PsdModel got = add_colored_noise(psd, scale, lib_rng);

    Rng oracle_rng(seed);
    const double bound = scale * *std::max_element(psd.mags.begin(), psd.mags.end());
    std::vector<double> floor(psd.mags.size());
    for (double& v : floor) v = oracle_rng.uniform(0.0, bound);
    std::size_t window =
        static_cast<std::size_t>(std::lround(0.01 * static_cast<double>(psd.mags.size())));
    if (window % 2 == 0) ++window;
    window = std::max<std::size_t>(window, 3);
    floor = oracles::median_filter(floor, window);
    std::vector<double> want = psd.mags;
    for (std::size_t i = 0; i < want.size(); ++i) want[i] += floor[i];
    want[0] = 0.0;

    if (got.mags != want) {
      pass = false;
      detail = "mismatch at trial " + std::to_string(trial) + " (scale " +
               std::to_string(scale) + ", bins " + std::to_string(psd.mags.size()) + ")";
    }
  }
  if (pass) detail = "20 (scale, length) pairs bit-identical to the oracle";
  report(9, "colored noise equals the brute-force uniform+median oracle", pass, detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite, library version %s\n", kVersion);
  criterion_determinism();
  criterion_parseval();
  criterion_df_calibration();
  criterion_monte_carlo();
  criterion_sickness_trends();
  criterion_t_cdf();
  criterion_fit_roundtrip();
  criterion_filter();
  criterion_colored_noise();
  std::printf("%s: %d of 9 criteria failed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
              g_failures);
  return g_failures;
}
