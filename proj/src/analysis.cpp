#include "eggsynth/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "eggsynth/fft.hpp"

namespace eggsynth {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCpmToHz = 1.0 / 60.0;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

using cplx = std::complex<double>;

// Expand prod (x - roots[i]) into real polynomial coefficients.
std::vector<double> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> coeffs{cplx(1.0, 0.0)};
  for (const cplx& r : roots) {
    std::vector<cplx> next(coeffs.size() + 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i] += coeffs[i];
      next[i + 1] -= coeffs[i] * r;
    }
    coeffs = std::move(next);
  }
  std::vector<double> out(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = coeffs[i].real();
  return out;
}

// Exact integral of the piecewise-linear PSD over [lo, hi] clipped to the
// grid span (trapezoidal rule extended to partial end bins).
double integrate_range(const PsdModel& psd, double lo, double hi) {
  const std::vector<double>& f = psd.freqs;
  const std::vector<double>& p = psd.mags;
  if (f.size() < 2) return 0.0;
  lo = std::max(lo, f.front());
  hi = std::min(hi, f.back());
  if (hi <= lo) return 0.0;

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double a = std::max(f[i], lo);
    const double b = std::min(f[i + 1], hi);
    if (b <= a) continue;
    const double span = f[i + 1] - f[i];
    const double pa = p[i] + (p[i + 1] - p[i]) * (a - f[i]) / span;
    const double pb = p[i] + (p[i + 1] - p[i]) * (b - f[i]) / span;
    total += 0.5 * (pa + pb) * (b - a);
  }
  return total;
}

std::vector<std::size_t> bins_in_range(const PsdModel& psd, double lo, double hi) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < psd.freqs.size(); ++i)
    if (psd.freqs[i] >= lo && psd.freqs[i] <= hi) idx.push_back(i);
  return idx;
}

std::vector<double> hamming(std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (len < 2) return w;
  for (std::size_t i = 0; i < len; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                  static_cast<double>(len - 1));
  return w;
}

}  // namespace

void BandConfig::validate() const {
  require(normo_lo_cpm < normo_hi_cpm && brady_lo_cpm < brady_hi_cpm &&
              tachy_lo_cpm < tachy_hi_cpm && breathing_lo_hz < breathing_hi_hz &&
              analysis_lo_hz < analysis_hi_hz,
          "band limits must satisfy lo < hi");
  require(brady_hi_cpm <= normo_lo_cpm && normo_hi_cpm <= tachy_lo_cpm,
          "gastric rhythm bands must not overlap");
}

IirFilter design_butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs) {
  require(order >= 1, "filter order must be >= 1");
  require(fs > 0.0, "fs must be positive");
  require(0.0 < lo_hz && lo_hz < hi_hz && hi_hz < fs / 2.0,
          "cutoffs must satisfy 0 < lo < hi < fs/2");

  const int n = order;
  // Analog Butterworth prototype: n poles on the unit left half circle.
  std::vector<cplx> proto(n);
  for (int k = 1; k <= n; ++k) {
    const double theta = kPi * (2.0 * k + n - 1.0) / (2.0 * n);
    proto[static_cast<std::size_t>(k - 1)] = cplx(std::cos(theta), std::sin(theta));
  }

  // Prewarp so the bilinear transform lands the -3 dB points exactly.
  const double w_lo = 2.0 * fs * std::tan(kPi * lo_hz / fs);
  const double w_hi = 2.0 * fs * std::tan(kPi * hi_hz / fs);
  const double w0 = std::sqrt(w_lo * w_hi);
  const double bw = w_hi - w_lo;

  // Lowpass-to-bandpass: each prototype pole splits into a conjugate pair;
  // n zeros appear at s = 0. Order doubles to 2n.
  std::vector<cplx> poles;
  poles.reserve(2 * static_cast<std::size_t>(n));
  for (const cplx& p : proto) {
    const cplx scaled = p * (bw / 2.0);
    const cplx delta = std::sqrt(scaled * scaled - cplx(w0 * w0, 0.0));
    poles.push_back(scaled + delta);
    poles.push_back(scaled - delta);
  }
  cplx gain(std::pow(bw, n), 0.0);

  // Bilinear transform: s -> 2 fs (z-1)/(z+1). Analog zeros at 0 map to
  // z = 1; the n remaining zeros land at z = -1.
  const double fs2 = 2.0 * fs;
  std::vector<cplx> zpoles;
  std::vector<cplx> zzeros;
  zpoles.reserve(poles.size());
  zzeros.reserve(poles.size());
  for (const cplx& p : poles) {
    zpoles.push_back((cplx(fs2, 0.0) + p) / (cplx(fs2, 0.0) - p));
    gain /= (cplx(fs2, 0.0) - p);
  }
  for (int k = 0; k < n; ++k) {
    zzeros.push_back(cplx(1.0, 0.0));   // analog zero at s = 0
    gain *= cplx(fs2, 0.0);             // (fs2 - 0)
    zzeros.push_back(cplx(-1.0, 0.0));  // degree padding
  }

  IirFilter filt;
  filt.b = poly_from_roots(zzeros);
  filt.a = poly_from_roots(zpoles);
  const double k_real = gain.real();
  for (double& c : filt.b) c *= k_real;
  return filt;
}

double filter_magnitude(const IirFilter& filt, double f, double fs) {
  const double w = 2.0 * kPi * f / fs;
  cplx num(0.0, 0.0);
  cplx den(0.0, 0.0);
  for (std::size_t k = 0; k < filt.b.size(); ++k)
    num += filt.b[k] * cplx(std::cos(w * static_cast<double>(k)),
                            -std::sin(w * static_cast<double>(k)));
  for (std::size_t k = 0; k < filt.a.size(); ++k)
    den += filt.a[k] * cplx(std::cos(w * static_cast<double>(k)),
                            -std::sin(w * static_cast<double>(k)));
  return std::abs(num / den);
}

namespace {

std::vector<double> filter_with_state(const IirFilter& filt, const std::vector<double>& x,
                                      std::vector<double> state) {
  const std::size_t nb = filt.b.size();
  const std::size_t na = filt.a.size();
  const std::size_t order = std::max(nb, na) - 1;
  state.resize(order, 0.0);
  std::vector<double> y(x.size());
  // Direct form II transposed.
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = (nb > 0 ? filt.b[0] * xi : 0.0) + (order > 0 ? state[0] : 0.0);
    for (std::size_t k = 0; k + 1 < order; ++k) {
      state[k] = (k + 1 < nb ? filt.b[k + 1] * xi : 0.0) -
                 (k + 1 < na ? filt.a[k + 1] * yi : 0.0) + state[k + 1];
    }
    if (order > 0) {
      state[order - 1] = (order < nb ? filt.b[order] * xi : 0.0) -
                         (order < na ? filt.a[order] * yi : 0.0);
    }
    y[i] = yi;
  }
  return y;
}

// Steady-state DF2T state for a unit constant input: scaled by the first
// sample it removes the step transient entirely.
std::vector<double> steady_state_unit(const IirFilter& filt) {
  const std::size_t nb = filt.b.size();
  const std::size_t na = filt.a.size();
  const std::size_t order = std::max(nb, na) - 1;
  double sum_b = 0.0;
  double sum_a = 0.0;
  for (double v : filt.b) sum_b += v;
  for (double v : filt.a) sum_a += v;
  const double dc_gain = sum_b / sum_a;
  std::vector<double> zi(order, 0.0);
  // zi[k] = sum_{j>k} (b_j - dc_gain * a_j)
  double tail = 0.0;
  for (std::size_t k = order; k-- > 0;) {
    const std::size_t j = k + 1;
    tail += (j < nb ? filt.b[j] : 0.0) - dc_gain * (j < na ? filt.a[j] : 0.0);
    zi[k] = tail;
  }
  return zi;
}

}  // namespace

std::vector<double> filter_forward(const IirFilter& filt, const std::vector<double>& x) {
  return filter_with_state(filt, x, {});
}

std::vector<double> filtfilt(const IirFilter& filt, const std::vector<double>& x) {
  if (x.empty()) return {};
  const std::size_t taps = std::max(filt.b.size(), filt.a.size());
  std::size_t pad = 3 * (taps - 1);
  if (pad >= x.size()) pad = x.size() - 1;

  // Odd reflection about the end points, with the filter state initialized
  // to its steady state for the first padded sample: a step input passes
  // with no startup transient in either direction.
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[x.size() - 1 - i]);

  const std::vector<double> zi = steady_state_unit(filt);
  std::vector<double> state(zi.size());

  for (std::size_t k = 0; k < zi.size(); ++k) state[k] = zi[k] * ext.front();
  std::vector<double> y = filter_with_state(filt, ext, state);
  std::reverse(y.begin(), y.end());
  for (std::size_t k = 0; k < zi.size(); ++k) state[k] = zi[k] * y.front();
  y = filter_with_state(filt, y, state);
  std::reverse(y.begin(), y.end());

  return std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(pad),
                             y.begin() + static_cast<std::ptrdiff_t>(pad + x.size()));
}

std::vector<double> butterworth_bandpass(const std::vector<double>& x, double fs, double lo_hz,
                                         double hi_hz, int order) {
  return filtfilt(design_butterworth_bandpass(order, lo_hz, hi_hz, fs), x);
}

PsdModel welch_psd(const std::vector<double>& x, double fs, std::size_t window_len,
                   double overlap) {
  require(fs > 0.0, "fs must be positive");
  require(overlap >= 0.0 && overlap < 1.0, "overlap must be in [0, 1)");
  if (window_len == 0)
    window_len = static_cast<std::size_t>(std::lround(0.125 * static_cast<double>(x.size())));
  require(window_len >= 2, "window too short");
  require(window_len <= x.size(), "window longer than signal");

  const std::size_t hop = std::max<std::size_t>(
      window_len - static_cast<std::size_t>(std::lround(overlap * static_cast<double>(window_len))),
      1);
  const std::size_t n_segments = (x.size() - window_len) / hop + 1;

  const std::vector<double> win = hamming(window_len);
  double win_power = 0.0;
  for (double w : win) win_power += w * w;

  const std::size_t bins = window_len / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::vector<double> seg(window_len);
  for (std::size_t s = 0; s < n_segments; ++s) {
    const std::size_t off = s * hop;
    for (std::size_t i = 0; i < window_len; ++i) seg[i] = x[off + i] * win[i];
    const std::vector<cplx> spec = fft::forward_real(seg);
    for (std::size_t m = 0; m < bins; ++m) acc[m] += std::norm(spec[m]);
  }

  PsdModel psd;
  psd.freqs = one_sided_grid(window_len, fs);
  psd.mags.resize(bins);
  const double scale = 1.0 / (fs * win_power * static_cast<double>(n_segments));
  for (std::size_t m = 0; m < bins; ++m) {
    const bool edge = m == 0 || (window_len % 2 == 0 && m == bins - 1);
    psd.mags[m] = acc[m] * scale * (edge ? 1.0 : 2.0);
  }
  return psd;
}

double dominant_frequency(const PsdModel& psd, double lo_hz, double hi_hz) {
  require(lo_hz < hi_hz, "band must satisfy lo < hi");
  const std::vector<std::size_t> idx = bins_in_range(psd, lo_hz, hi_hz);
  require(idx.size() >= 3, "band covers fewer than 3 grid bins");
  std::size_t best = idx.front();
  for (std::size_t i : idx)
    if (psd.mags[i] > psd.mags[best]) best = i;  // strict: ties keep the lower bin
  return psd.freqs[best];
}

PeakWidth peak_width(const PsdModel& psd, double peak_freq_hz) {
  require(psd.bins() >= 3, "psd too short");
  // Locate the nearest bin to the requested peak.
  std::size_t i = 0;
  double best = std::abs(psd.freqs[0] - peak_freq_hz);
  for (std::size_t m = 1; m < psd.bins(); ++m) {
    const double d = std::abs(psd.freqs[m] - peak_freq_hz);
    if (d < best) {
      best = d;
      i = m;
    }
  }
  require(i > 0 && i + 1 < psd.bins() && psd.mags[i] >= psd.mags[i - 1] &&
              psd.mags[i] >= psd.mags[i + 1] && psd.mags[i] > 0.0,
          "peak_width: frequency is not a local maximum");

  const double half = 0.5 * psd.mags[i];
  PeakWidth out;

  double left = psd.freqs.front();
  bool found_left = false;
  for (std::size_t m = i; m-- > 0;) {
    if (psd.mags[m] < half) {
      const double frac = (half - psd.mags[m]) / (psd.mags[m + 1] - psd.mags[m]);
      left = psd.freqs[m] + frac * (psd.freqs[m + 1] - psd.freqs[m]);
      found_left = true;
      break;
    }
  }
  double right = psd.freqs.back();
  bool found_right = false;
  for (std::size_t m = i + 1; m < psd.bins(); ++m) {
    if (psd.mags[m] < half) {
      const double frac = (psd.mags[m - 1] - half) / (psd.mags[m - 1] - psd.mags[m]);
      right = psd.freqs[m - 1] + frac * (psd.freqs[m] - psd.freqs[m - 1]);
      found_right = true;
      break;
    }
  }
  out.width_hz = right - left;
  out.clamped = !(found_left && found_right);
  return out;
}

FeatureSet band_features(const PsdModel& psd, const BandConfig& bands) {
  bands.validate();
  require(psd.bins() >= 2, "psd too short");
  const double lo = std::max(bands.analysis_lo_hz, psd.freqs.front());
  const double hi = std::min(bands.analysis_hi_hz, psd.freqs.back());
  require(lo < hi, "analysis range does not intersect the grid");

  FeatureSet out;
  out.total_power = integrate_range(psd, lo, hi);
  if (!(out.total_power > 0.0))
    throw undefined_features_error("band_features: zero total power in analysis range");

  out.pct_normo =
      100.0 * integrate_range(psd, bands.normo_lo_cpm * kCpmToHz, bands.normo_hi_cpm * kCpmToHz) /
      out.total_power;
  out.pct_brady =
      100.0 * integrate_range(psd, bands.brady_lo_cpm * kCpmToHz, bands.brady_hi_cpm * kCpmToHz) /
      out.total_power;
  out.pct_tachy =
      100.0 * integrate_range(psd, bands.tachy_lo_cpm * kCpmToHz, bands.tachy_hi_cpm * kCpmToHz) /
      out.total_power;

  // Median: cumulative trapezoid from lo, linear interpolation inside the
  // crossing interval.
  const double target = 0.5 * out.total_power;
  double cum = 0.0;
  out.median_freq_hz = hi;
  for (std::size_t i = 0; i + 1 < psd.bins(); ++i) {
    const double a = std::max(psd.freqs[i], lo);
    const double b = std::min(psd.freqs[i + 1], hi);
    if (b <= a) continue;
    const double span = psd.freqs[i + 1] - psd.freqs[i];
    const double pa = psd.mags[i] + (psd.mags[i + 1] - psd.mags[i]) * (a - psd.freqs[i]) / span;
    const double pb = psd.mags[i] + (psd.mags[i + 1] - psd.mags[i]) * (b - psd.freqs[i]) / span;
    const double area = 0.5 * (pa + pb) * (b - a);
    if (cum + area >= target && area > 0.0) {
      out.median_freq_hz = a + (b - a) * (target - cum) / area;
      break;
    }
    cum += area;
  }

  const std::vector<std::size_t> idx = bins_in_range(psd, lo, hi);
  require(!idx.empty(), "analysis range covers no bins");
  double peak = 0.0;
  double sumsq = 0.0;
  for (std::size_t i : idx) {
    peak = std::max(peak, psd.mags[i]);
    sumsq += psd.mags[i] * psd.mags[i];
  }
  const double rms = std::sqrt(sumsq / static_cast<double>(idx.size()));
  out.crest_factor = rms > 0.0 ? peak / rms : 0.0;
  return out;
}

GaussianFit fit_gaussian_weighted(const PsdModel& psd, double lo_hz, double hi_hz) {
  require(lo_hz < hi_hz, "band must satisfy lo < hi");
  const std::vector<std::size_t> idx = bins_in_range(psd, lo_hz, hi_hz);
  require(idx.size() >= 3, "band covers fewer than 3 grid bins");

  double mass = 0.0;
  double first = 0.0;
  for (std::size_t i : idx) {
    mass += psd.mags[i];
    first += psd.mags[i] * psd.freqs[i];
  }
  if (!(mass > 0.0))
    throw undefined_features_error("fit_gaussian_weighted: zero mass in band");

  GaussianFit fit;
  fit.mu_hz = first / mass;
  double second = 0.0;
  for (std::size_t i : idx) {
    const double d = psd.freqs[i] - fit.mu_hz;
    second += psd.mags[i] * d * d;
  }
  fit.sigma_hz = std::sqrt(second / mass);
  return fit;
}

FeatureSet extract_features(const std::vector<double>& x, double fs, const BandConfig& bands,
                            std::size_t welch_window) {
  if (welch_window == 0) {
    // Default 12.5% window, widened when the segment is so short that the
    // normogastria band would cover fewer than 3 Welch bins.
    const double band_hz = (bands.normo_hi_cpm - bands.normo_lo_cpm) * kCpmToHz;
    const std::size_t min_window =
        static_cast<std::size_t>(std::ceil(3.0 * fs / band_hz));
    welch_window = std::max(
        static_cast<std::size_t>(std::lround(0.125 * static_cast<double>(x.size()))),
        std::min(min_window, x.size()));
  }
  const PsdModel psd = welch_psd(x, fs, welch_window);
  FeatureSet out = band_features(psd, bands);

  out.df_hz = dominant_frequency(psd, bands.normo_lo_cpm * kCpmToHz, bands.normo_hi_cpm * kCpmToHz);
  try {
    const PeakWidth w = peak_width(psd, out.df_hz);
    out.df_peak_width_hz = w.width_hz;
    out.df_width_clamped = w.clamped;
  } catch (const std::invalid_argument&) {
    out.df_peak_width_hz = 0.0;
    out.df_width_clamped = true;
  }

  // Breathing peak is reported only when the band argmax is a genuine
  // local maximum; flat noise in the band stays unreported.
  try {
    const double br = dominant_frequency(psd, bands.breathing_lo_hz, bands.breathing_hi_hz);
    const PeakWidth w = peak_width(psd, br);
    out.br_peak_hz = br;
    out.br_peak_width_hz = w.width_hz;
  } catch (const std::invalid_argument&) {
    out.br_peak_hz.reset();
    out.br_peak_width_hz.reset();
  }
  return out;
}

}  // namespace eggsynth
