#include "eggsynth/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eggsynth {

namespace {

constexpr double kCpmToHz = 1.0 / 60.0;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Largest normogastria-kernel value over the grid; the normalization
// reference so that the gastric peak bin sits at exactly 1.
double normo_peak_on_grid(const std::vector<double>& grid, double mu_hz, double sigma_hz) {
  double peak = 0.0;
  for (double f : grid) peak = std::max(peak, gaussian_kernel(f, mu_hz, sigma_hz));
  return peak;
}

// One uniform draw in [0, bound] per bin, median-filtered with a window of
// 1% of the bin count (odd, >= 3), added in place.
void add_noise_floor(std::vector<double>& mags, double bound, Rng& rng) {
  std::vector<double> floor(mags.size());
  for (double& v : floor) v = rng.uniform(0.0, bound);
  std::size_t window =
      static_cast<std::size_t>(std::lround(0.01 * static_cast<double>(mags.size())));
  if (window % 2 == 0) ++window;
  window = std::max<std::size_t>(window, 3);
  floor = median_filter(floor, window);
  for (std::size_t m = 0; m < mags.size(); ++m) mags[m] += floor[m];
}

}  // namespace

std::string to_string(State s) {
  return s == State::fasting ? "fasting" : "postprandial";
}

State state_from_string(const std::string& s) {
  if (s == "fasting") return State::fasting;
  if (s == "postprandial") return State::postprandial;
  throw std::invalid_argument("unknown state: " + s);
}

void KernelPriors::validate() const {
  const double means[] = {mu_df_fasting_mean, mu_df_postprandial_mean, sigma_df_fasting_mean,
                          sigma_df_postprandial_mean, mu_br_mean, sigma_br_mean};
  for (double m : means) require(m > 0.0, "prior means must be positive");
  const double sds[] = {mu_df_fasting_sd, mu_df_postprandial_sd, sigma_df_fasting_sd,
                        sigma_df_postprandial_sd, mu_br_sd, sigma_br_sd, rel_mag_br_sd};
  for (double s : sds) require(s >= 0.0, "prior SDs must be nonnegative");
}

std::vector<double> one_sided_grid(std::size_t n_samples, double fs) {
  require(n_samples >= 2, "grid needs at least 2 samples");
  require(fs > 0.0, "fs must be positive");
  const std::size_t bins = n_samples / 2 + 1;
  std::vector<double> grid(bins);
  for (std::size_t m = 0; m < bins; ++m)
    grid[m] = static_cast<double>(m) * fs / static_cast<double>(n_samples);
  return grid;
}

double gaussian_kernel(double f, double mu, double sigma) {
  require(sigma > 0.0, "gaussian_kernel: sigma must be positive");
  const double d = f - mu;
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

KernelDraw draw_kernels(const KernelPriors& priors, State state, bool breathing, Rng& rng) {
  priors.validate();
  KernelDraw d;
  d.state = state;
  d.breathing = breathing;
  // Fixed draw order; widths clamped away from degenerate delta spectra.
  d.mu_df_cpm = rng.normal(priors.mu_df_mean(state), priors.mu_df_sd(state));
  d.sigma_df_cpm = std::max(rng.normal(priors.sigma_df_mean(state), priors.sigma_df_sd(state)),
                            kSigmaFloorCpm);
  d.mu_br_cpm = rng.normal(priors.mu_br_mean, priors.mu_br_sd);
  d.sigma_br_cpm = std::max(rng.normal(priors.sigma_br_mean, priors.sigma_br_sd), kSigmaFloorCpm);
  d.rel_mag_br = std::max(rng.normal(priors.rel_mag_br_mean, priors.rel_mag_br_sd), 0.0);
  require(d.mu_df_cpm > 0.0, "drawn mu_df must be positive");
  return d;
}

PsdModel build_psd(const KernelDraw& draw, const std::vector<double>& grid) {
  require(!grid.empty(), "build_psd: empty grid");
  const double mu = draw.mu_df_cpm * kCpmToHz;
  const double sigma = draw.sigma_df_cpm * kCpmToHz;
  const double mu_br = draw.mu_br_cpm * kCpmToHz;
  const double sigma_br = draw.sigma_br_cpm * kCpmToHz;
  const double norm = normo_peak_on_grid(grid, mu, sigma);

  PsdModel psd;
  psd.freqs = grid;
  psd.mags.resize(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) {
    double v = gaussian_kernel(grid[m], mu, sigma);
    if (draw.breathing && draw.rel_mag_br > 0.0)
      v += draw.rel_mag_br * gaussian_kernel(grid[m], mu_br, sigma_br);
    psd.mags[m] = v / norm;
  }
  psd.mags[0] = 0.0;
  return psd;
}

PsdModel build_sickness_psd(const KernelDraw& draw, const std::vector<double>& grid) {
  require(!grid.empty(), "build_sickness_psd: empty grid");
  const double mu = draw.mu_df_cpm * kCpmToHz;
  const double sigma = draw.sigma_df_cpm * kCpmToHz;
  const double mu_br = draw.mu_br_cpm * kCpmToHz;
  const double sigma_br = draw.sigma_br_cpm * kCpmToHz;
  const double c = (draw.mu_df_cpm + draw.sigma_df_cpm) * kCpmToHz;
  // Same normalization reference as build_psd so the two agree bin-for-bin
  // below c (up to the sickness gain).
  const double norm = normo_peak_on_grid(grid, mu, sigma);

  PsdModel psd;
  psd.freqs = grid;
  psd.mags.resize(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double f = grid[m];
    // Tail beyond c is evaluated at a point pulled back toward c, which
    // stretches the curve horizontally by the sickness factor.
    const double f_eval = f <= c ? f : c + (f - c) / kSicknessStretch;
    double v = gaussian_kernel(f_eval, mu, sigma);
    if (draw.breathing && draw.rel_mag_br > 0.0)
      v += draw.rel_mag_br * gaussian_kernel(f, mu_br, sigma_br);
    psd.mags[m] = kSicknessGain * v / norm;
  }
  psd.mags[0] = 0.0;
  return psd;
}

PsdModel build_arrhythmia_psd(const KernelDraw& draw, const std::vector<double>& grid,
                              double user_noise_scale, Rng& rng) {
  require(!grid.empty(), "build_arrhythmia_psd: empty grid");
  require(user_noise_scale >= 0.0, "noise scale must be nonnegative");
  const double mu_br = draw.mu_br_cpm * kCpmToHz;
  const double sigma_br = draw.sigma_br_cpm * kCpmToHz;

  PsdModel psd;
  psd.freqs = grid;
  psd.mags.assign(grid.size(), 0.0);
  if (draw.breathing && draw.rel_mag_br > 0.0) {
    for (std::size_t m = 0; m < grid.size(); ++m)
      psd.mags[m] = draw.rel_mag_br * gaussian_kernel(grid[m], mu_br, sigma_br);
  }

  // The floor bound is absolute (relative to the unit normogastria peak of
  // the normal segments), not relative to the breathing kernel: an
  // arrhythmia never degenerates to a pure breathing tone or to silence.
  const double bound = user_noise_scale > 0.0 ? user_noise_scale : kArrhythmiaNoiseFloor;
  add_noise_floor(psd.mags, bound, rng);
  psd.mags[0] = 0.0;
  return psd;
}

PsdModel add_colored_noise(const PsdModel& psd, double scale, Rng& rng) {
  require(scale >= 0.0, "add_colored_noise: scale must be nonnegative");
  if (scale == 0.0 || psd.mags.empty()) return psd;

  const double peak = *std::max_element(psd.mags.begin(), psd.mags.end());
  PsdModel out = psd;
  add_noise_floor(out.mags, scale * peak, rng);
  out.mags[0] = 0.0;
  return out;
}

std::vector<double> median_filter(const std::vector<double>& x, std::size_t window) {
  require(window % 2 == 1, "median_filter: window must be odd");
  const std::size_t n = x.size();
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(window / 2);
  std::vector<double> out(n);
  std::vector<double> buf(window);
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      const std::ptrdiff_t j =
          std::clamp<std::ptrdiff_t>(i + k, 0, static_cast<std::ptrdiff_t>(n) - 1);
      buf[static_cast<std::size_t>(k + half)] = x[static_cast<std::size_t>(j)];
    }
    std::nth_element(buf.begin(), buf.begin() + half, buf.end());
    out[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(half)];
  }
  return out;
}

}  // namespace eggsynth
