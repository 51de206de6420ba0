#ifndef EGGSYNTH_ANALYSIS_HPP
#define EGGSYNTH_ANALYSIS_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "eggsynth/model.hpp"

namespace eggsynth {

// Thrown when a feature set cannot be computed (e.g. zero spectral power).
class undefined_features_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rhythm band limits. Gastric bands are clinical conventions in cpm;
// breathing and the overall analysis range are in Hz.
struct BandConfig {
  double normo_lo_cpm = 2.0;
  double normo_hi_cpm = 4.0;
  double brady_lo_cpm = 0.5;
  double brady_hi_cpm = 2.0;
  double tachy_lo_cpm = 4.0;
  double tachy_hi_cpm = 9.0;
  double breathing_lo_hz = 0.2;
  double breathing_hi_hz = 0.4;
  double analysis_lo_hz = 0.005;
  double analysis_hi_hz = 0.6;

  void validate() const;
};

struct FeatureSet {
  double df_hz = 0.0;
  double df_peak_width_hz = 0.0;
  bool df_width_clamped = false;
  std::optional<double> br_peak_hz;
  std::optional<double> br_peak_width_hz;
  double total_power = 0.0;
  double pct_normo = 0.0;
  double pct_brady = 0.0;
  double pct_tachy = 0.0;
  double median_freq_hz = 0.0;
  double crest_factor = 0.0;
};

// Digital IIR filter in transfer-function form, a[0] normalized to 1.
struct IirFilter {
  std::vector<double> b;
  std::vector<double> a;
};

// Butterworth band-pass designed by the bilinear transform with frequency
// prewarping, so the -3 dB points land exactly on (lo_hz, hi_hz).
IirFilter design_butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs);

// |H(e^{i 2 pi f / fs})| of a designed filter (single pass).
double filter_magnitude(const IirFilter& filt, double f, double fs);

// Single forward pass (direct form II transposed).
std::vector<double> filter_forward(const IirFilter& filt, const std::vector<double>& x);

// Forward-backward application with odd-reflection edge padding: zero net
// phase, squared magnitude response.
std::vector<double> filtfilt(const IirFilter& filt, const std::vector<double>& x);

// Designs a band-pass of the given order and applies it forward-backward.
std::vector<double> butterworth_bandpass(const std::vector<double>& x, double fs, double lo_hz,
                                         double hi_hz, int order);

// Welch PSD estimate: Hamming-windowed overlapping segments, per-segment
// periodograms normalized as density (power per Hz, window power
// compensated), averaged. window_len = 0 picks round(0.125 * length).
PsdModel welch_psd(const std::vector<double>& x, double fs, std::size_t window_len = 0,
                   double overlap = 0.5);

// Frequency of the largest magnitude within [lo_hz, hi_hz]; ties go to the
// lower frequency. The band must cover at least 3 grid bins.
double dominant_frequency(const PsdModel& psd, double lo_hz, double hi_hz);

struct PeakWidth {
  double width_hz = 0.0;
  bool clamped = false;  // a half-power crossing ran off the grid edge
};

// Full width at half maximum around peak_freq_hz (which must sit on a local
// maximum bin), half-power crossings linearly interpolated.
PeakWidth peak_width(const PsdModel& psd, double peak_freq_hz);

// Total power, band percentages, median frequency and crest factor over the
// analysis range. Integrals are trapezoidal on the native grid; the range
// is clipped to the grid span.
FeatureSet band_features(const PsdModel& psd, const BandConfig& bands = {});

struct GaussianFit {
  double mu_hz = 0.0;
  double sigma_hz = 0.0;
};

// Magnitude-weighted spectral moments over [lo_hz, hi_hz]:
//   mu    = sum f P(f) / sum P(f)
//   sigma = sqrt( sum P(f) (f - mu)^2 / sum P(f) )
GaussianFit fit_gaussian_weighted(const PsdModel& psd, double lo_hz, double hi_hz);

// Whole pipeline used on generated and ingested signals: Welch PSD, then
// dominant frequency + width, breathing peak (when one stands out as a
// local maximum) and band features.
FeatureSet extract_features(const std::vector<double>& x, double fs, const BandConfig& bands = {},
                            std::size_t welch_window = 0);

}  // namespace eggsynth

#endif
