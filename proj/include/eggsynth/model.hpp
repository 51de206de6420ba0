#ifndef EGGSYNTH_MODEL_HPP
#define EGGSYNTH_MODEL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "eggsynth/rng.hpp"

namespace eggsynth {

enum class State { fasting, postprandial };

std::string to_string(State s);
State state_from_string(const std::string& s);

// Population means and standard deviations of the spectral kernel
// parameters, in cycles per minute (cpm). The defaults are the fitted
// values from the three-channel open EGG database (20 healthy subjects,
// fasting + postprandial).
struct KernelPriors {
  double mu_df_fasting_mean = 2.9336;
  double mu_df_fasting_sd = 0.1094;
  double mu_df_postprandial_mean = 2.9743;
  double mu_df_postprandial_sd = 0.1158;
  double sigma_df_fasting_mean = 0.4836;
  double sigma_df_fasting_sd = 0.0740;
  double sigma_df_postprandial_mean = 0.4794;
  double sigma_df_postprandial_sd = 0.0823;
  double mu_br_mean = 16.7410;
  double mu_br_sd = 1.0628;
  double sigma_br_mean = 2.6655;
  double sigma_br_sd = 0.4919;
  double rel_mag_br_mean = 0.1907;
  double rel_mag_br_sd = 0.2474;

  double mu_df_mean(State s) const {
    return s == State::fasting ? mu_df_fasting_mean : mu_df_postprandial_mean;
  }
  double mu_df_sd(State s) const {
    return s == State::fasting ? mu_df_fasting_sd : mu_df_postprandial_sd;
  }
  double sigma_df_mean(State s) const {
    return s == State::fasting ? sigma_df_fasting_mean : sigma_df_postprandial_mean;
  }
  double sigma_df_sd(State s) const {
    return s == State::fasting ? sigma_df_fasting_sd : sigma_df_postprandial_sd;
  }

  void validate() const;  // throws std::invalid_argument
};

// One realized parameter set: the simulated "subject". All frequencies in
// cpm; kernels are evaluated in Hz after dividing by 60.
struct KernelDraw {
  State state = State::fasting;
  double mu_df_cpm = 0.0;
  double sigma_df_cpm = 0.0;
  double mu_br_cpm = 0.0;
  double sigma_br_cpm = 0.0;
  double rel_mag_br = 0.0;
  bool breathing = true;
};

// One-sided spectral magnitude model: freqs[m] = m*fs/N for m = 0..N/2.
struct PsdModel {
  std::vector<double> freqs;
  std::vector<double> mags;

  std::size_t bins() const { return freqs.size(); }
};

// One-sided frequency grid of an n_samples-long signal at fs Hz.
std::vector<double> one_sided_grid(std::size_t n_samples, double fs);

// Width clamp for drawn kernel SDs, cpm. Draws below this would produce
// near-delta spectra (a single tone instead of a rhythm band).
inline constexpr double kSigmaFloorCpm = 0.05;

// Noise floor used for arrhythmia segments when the user noise scale is 0,
// as a fraction of the unit normogastria peak.
inline constexpr double kArrhythmiaNoiseFloor = 0.1;

// Magnitude gain applied to the whole PSD during simulator sickness.
inline constexpr double kSicknessGain = 2.2;

// Horizontal stretch factor applied to the normogastria kernel tail beyond
// mu_df + sigma_df during sickness.
inline constexpr double kSicknessStretch = 4.0;

// Peak-1 Gaussian, exp(-(f-mu)^2 / (2 sigma^2)). Throws on sigma <= 0.
double gaussian_kernel(double f, double mu, double sigma);

// Draws one parameter set from the priors. Each parameter is an
// independent normal draw; rel_mag_br is clamped to >= 0 (a negative draw
// means no visible breathing artifact) and widths to >= kSigmaFloorCpm.
// All five parameters are always drawn, in a fixed order, so the stream
// position does not depend on the breathing flag.
KernelDraw draw_kernels(const KernelPriors& priors, State state, bool breathing, Rng& rng);

// Two-kernel spectrum: normogastria plus (optionally) breathing, scaled so
// the normogastria peak bin is exactly 1. DC is forced to 0.
PsdModel build_psd(const KernelDraw& draw, const std::vector<double>& grid);

// Sickness variant: the normogastria tail beyond c = (mu_df+sigma_df)/60 Hz
// is stretched horizontally by kSicknessStretch, then the whole spectrum
// (breathing included) is scaled by kSicknessGain. Matches build_psd times
// the gain on every bin at or below c.
PsdModel build_sickness_psd(const KernelDraw& draw, const std::vector<double>& grid);

// Arrhythmia variant: no gastric kernel at all, just the breathing kernel
// (if enabled) plus a colored-noise floor. The floor bound is
// user_noise_scale when positive, else kArrhythmiaNoiseFloor, both relative
// to the unit normogastria peak.
PsdModel build_arrhythmia_psd(const KernelDraw& draw, const std::vector<double>& grid,
                              double user_noise_scale, Rng& rng);

// Adds a nonnegative colored-noise floor: one uniform draw in
// [0, scale*max(mags)] per bin, median-filtered with a window of 1% of the
// bin count (forced odd, minimum 3, edges replicated), added bin-wise.
// DC is forced back to 0. scale = 0 returns the input untouched without
// consuming any randomness.
PsdModel add_colored_noise(const PsdModel& psd, double scale, Rng& rng);

// Odd-window sliding median with edge replication. Exposed for the noise
// pipeline; window must be odd and >= 1.
std::vector<double> median_filter(const std::vector<double>& x, std::size_t window);

}  // namespace eggsynth

#endif
