#include "eggsynth/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "eggsynth/fft.hpp"

namespace eggsynth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  const std::uint64_t a = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  const std::uint64_t b = static_cast<std::uint64_t>(
      std::chrono::steady_clock::now().time_since_epoch().count());
  return Rng::mix(a ^ Rng::mix(b));
}

std::size_t sample_index(double t_s, double fs) {
  return static_cast<std::size_t>(std::llround(t_s * fs));
}

// Segment layout on the sample grid: label, [start, start+length).
std::vector<SegmentInfo> contiguous_segments(const std::vector<SegmentLabel>& labels) {
  std::vector<SegmentInfo> segs;
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    segs.push_back({labels[i], i, j - i});
    i = j;
  }
  return segs;
}

void suppress_breathing_fields(FeatureSet& f, const KernelDraw& draw) {
  if (!draw.breathing || draw.rel_mag_br <= 0.0) {
    f.br_peak_hz.reset();
    f.br_peak_width_hz.reset();
  }
}

}  // namespace

std::string to_string(SegmentLabel l) {
  switch (l) {
    case SegmentLabel::normal: return "normal";
    case SegmentLabel::arrhythmia: return "arrhythmia";
    case SegmentLabel::sickness: return "sickness";
  }
  return "normal";
}

std::size_t GenerationConfig::n_samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * fs_hz));
}

void GenerationConfig::validate(bool vr) const {
  require(duration_s > 0.0, "duration must be positive");
  require(fs_hz > 0.0, "fs must be positive");
  require(n_samples() >= 16, "duration * fs must be at least 16 samples");
  require(noise_scale >= 0.0, "noise scale must be nonnegative");
  if (arrhythmia_window_s) {
    const auto [start, end] = *arrhythmia_window_s;
    require(start >= 0.0 && start <= end && end <= duration_s,
            "arrhythmia window must satisfy 0 <= start <= end <= duration");
    const std::size_t a0 = sample_index(start, fs_hz);
    const std::size_t a1 = sample_index(end, fs_hz);
    require(a0 == a1 || a1 - a0 >= 2, "arrhythmia window shorter than 2 samples");
  }
  if (vr) {
    require(sickness_onset_s >= 0.0, "sickness onset must be nonnegative");
    require(sickness_onset_s < sickness_offset_s, "sickness onset must precede offset");
    require(sickness_offset_s <= duration_s, "sickness offset must not exceed duration");
    const std::size_t o0 = sample_index(sickness_onset_s, fs_hz);
    const std::size_t o1 = sample_index(sickness_offset_s, fs_hz);
    const std::size_t n = n_samples();
    require(o0 < o1, "sickness window is empty on the sample grid");
    require(o1 - o0 >= 16, "sickness segment shorter than 16 samples");
    require(o0 == 0 || o0 >= 16, "pre-onset segment shorter than 16 samples");
    require(o1 == n || n - o1 >= 16, "post-offset segment shorter than 16 samples");
    require(o0 > 0 || o1 < n, "signal has no normal-state segment");
  }
}

std::vector<double> psd_to_timeseries(const PsdModel& psd, std::size_t n_samples, Rng& rng) {
  require(n_samples >= 2, "need at least 2 samples");
  require(psd.bins() == n_samples / 2 + 1, "psd grid does not match the sample count");

  std::vector<fft::cplx> spectrum(n_samples, fft::cplx(0.0, 0.0));
  spectrum[0] = fft::cplx(std::sqrt(psd.mags[0]), 0.0);
  const bool even = n_samples % 2 == 0;
  const std::size_t interior_end = even ? n_samples / 2 : n_samples / 2 + 1;
  for (std::size_t m = 1; m < interior_end; ++m) {
    const double phase = rng.uniform(0.0, kTwoPi);
    const double amp = std::sqrt(psd.mags[m]);
    spectrum[m] = fft::cplx(amp * std::cos(phase), amp * std::sin(phase));
    spectrum[n_samples - m] = std::conj(spectrum[m]);
  }
  if (even) spectrum[n_samples / 2] = fft::cplx(std::sqrt(psd.mags[n_samples / 2]), 0.0);

  fft::transform(spectrum, true);
  std::vector<double> out(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) out[i] = spectrum[i].real();
  return out;
}

double parseval_energy(const PsdModel& psd, std::size_t n_samples) {
  require(psd.bins() == n_samples / 2 + 1, "psd grid does not match the sample count");
  const bool even = n_samples % 2 == 0;
  double two_sided = psd.mags[0];
  for (std::size_t m = 1; m < psd.bins(); ++m) {
    const bool nyquist = even && m == psd.bins() - 1;
    two_sided += (nyquist ? 1.0 : 2.0) * psd.mags[m];
  }
  return two_sided / static_cast<double>(n_samples);
}

GenerationResult generate_egg(const GenerationConfig& config, const KernelPriors& priors) {
  config.validate(false);
  const std::uint64_t seed = config.seed ? *config.seed : entropy_seed();
  const std::size_t n = config.n_samples();

  Rng draw_rng = Rng::substream(seed, kStreamKernelDraw);
  const KernelDraw draw = draw_kernels(priors, config.state, config.breathing, draw_rng);

  PsdModel psd = build_psd(draw, one_sided_grid(n, config.fs_hz));
  if (config.noise_scale > 0.0) {
    Rng noise_rng = Rng::substream(seed, kStreamMainNoise);
    psd = add_colored_noise(psd, config.noise_scale, noise_rng);
  }

  Rng phase_rng = Rng::substream(seed, kStreamMainPhase);
  std::vector<double> samples = psd_to_timeseries(psd, n, phase_rng);
  std::vector<SegmentLabel> labels(n, SegmentLabel::normal);

  GenerationResult result;
  if (config.arrhythmia_window_s) {
    const auto [start, end] = *config.arrhythmia_window_s;
    const std::size_t a0 = sample_index(start, config.fs_hz);
    const std::size_t a1 = sample_index(end, config.fs_hz);
    if (a1 > a0) {
      const std::size_t na = a1 - a0;
      Rng arr_noise = Rng::substream(seed, kStreamArrhythmiaNoise);
      const PsdModel arr_psd = build_arrhythmia_psd(draw, one_sided_grid(na, config.fs_hz),
                                                    config.noise_scale, arr_noise);
      Rng arr_phase = Rng::substream(seed, kStreamArrhythmiaPhase);
      const std::vector<double> arr = psd_to_timeseries(arr_psd, na, arr_phase);
      // Hard concatenation: the window is overwritten sample-for-sample,
      // leaving the variance step at the splice points.
      for (std::size_t i = 0; i < na; ++i) {
        samples[a0 + i] = arr[i];
        labels[a0 + i] = SegmentLabel::arrhythmia;
      }
      result.arrhythmia_psd = arr_psd;
    }
  }

  result.features = extract_features(samples, config.fs_hz);
  suppress_breathing_fields(result.features, draw);

  result.signal.samples = std::move(samples);
  result.signal.fs = config.fs_hz;
  result.signal.labels = std::move(labels);
  result.signal.meta.seed = seed;
  result.signal.meta.config = config;
  result.signal.meta.config.seed = seed;
  result.signal.meta.draw = draw;
  result.signal.meta.segments = contiguous_segments(result.signal.labels);
  result.psd = std::move(psd);
  return result;
}

VrGenerationResult generate_egg_vr(const GenerationConfig& config, const KernelPriors& priors) {
  config.validate(true);
  const std::uint64_t seed = config.seed ? *config.seed : entropy_seed();
  const std::size_t n = config.n_samples();
  const std::size_t o0 = sample_index(config.sickness_onset_s, config.fs_hz);
  const std::size_t o1 = sample_index(config.sickness_offset_s, config.fs_hz);

  Rng draw_rng = Rng::substream(seed, kStreamKernelDraw);
  const KernelDraw draw = draw_kernels(priors, config.state, config.breathing, draw_rng);

  std::vector<double> samples(n, 0.0);
  std::vector<SegmentLabel> labels(n, SegmentLabel::normal);
  auto synth_into = [&](std::size_t start, std::size_t len, const PsdModel& psd,
                        Stream phase_stream, SegmentLabel label) {
    Rng phase = Rng::substream(seed, phase_stream);
    const std::vector<double> seg = psd_to_timeseries(psd, len, phase);
    for (std::size_t i = 0; i < len; ++i) {
      samples[start + i] = seg[i];
      labels[start + i] = label;
    }
  };
  auto with_noise = [&](PsdModel psd, Stream noise_stream) {
    if (config.noise_scale > 0.0) {
      Rng noise = Rng::substream(seed, noise_stream);
      psd = add_colored_noise(psd, config.noise_scale, noise);
    }
    return psd;
  };

  VrGenerationResult result;

  // One kernel draw serves both states: the same simulated subject before
  // and during sickness.
  PsdModel pre_psd;
  if (o0 > 0) {
    pre_psd = with_noise(build_psd(draw, one_sided_grid(o0, config.fs_hz)), kStreamMainNoise);
    synth_into(0, o0, pre_psd, kStreamMainPhase, SegmentLabel::normal);
  }
  PsdModel sick_psd = with_noise(build_sickness_psd(draw, one_sided_grid(o1 - o0, config.fs_hz)),
                                 kStreamSicknessNoise);
  synth_into(o0, o1 - o0, sick_psd, kStreamSicknessPhase, SegmentLabel::sickness);
  if (o1 < n) {
    PsdModel post_psd =
        with_noise(build_psd(draw, one_sided_grid(n - o1, config.fs_hz)), kStreamPostNoise);
    synth_into(o1, n - o1, post_psd, kStreamPostPhase, SegmentLabel::normal);
    result.post_psd = std::move(post_psd);
  }

  if (config.arrhythmia_window_s) {
    const auto [start, end] = *config.arrhythmia_window_s;
    const std::size_t a0 = sample_index(start, config.fs_hz);
    const std::size_t a1 = sample_index(end, config.fs_hz);
    if (a1 > a0) {
      Rng arr_noise = Rng::substream(seed, kStreamArrhythmiaNoise);
      const PsdModel arr_psd = build_arrhythmia_psd(draw, one_sided_grid(a1 - a0, config.fs_hz),
                                                    config.noise_scale, arr_noise);
      Rng arr_phase = Rng::substream(seed, kStreamArrhythmiaPhase);
      const std::vector<double> arr = psd_to_timeseries(arr_psd, a1 - a0, arr_phase);
      for (std::size_t i = 0; i < a1 - a0; ++i) {
        samples[a0 + i] = arr[i];
        labels[a0 + i] = SegmentLabel::arrhythmia;
      }
    }
  }

  // Per-state features from the corresponding stretches of the spliced
  // signal (pre-onset half vs sickness half under the defaults). The
  // comparison integrates the gastric rhythm range only, so the three band
  // percentages partition the per-state total power; breathing sits outside
  // the compared range in both states.
  BandConfig state_bands;
  state_bands.analysis_lo_hz = state_bands.brady_lo_cpm / 60.0;
  state_bands.analysis_hi_hz = state_bands.tachy_hi_cpm / 60.0;
  const std::size_t norm_start = o0 > 0 ? 0 : o1;
  const std::size_t norm_len = o0 > 0 ? o0 : n - o1;
  const std::vector<double> normal_part(samples.begin() + static_cast<std::ptrdiff_t>(norm_start),
                                        samples.begin() +
                                            static_cast<std::ptrdiff_t>(norm_start + norm_len));
  const std::vector<double> sick_part(samples.begin() + static_cast<std::ptrdiff_t>(o0),
                                      samples.begin() + static_cast<std::ptrdiff_t>(o1));
  result.normal_features = extract_features(normal_part, config.fs_hz, state_bands);
  result.sickness_features = extract_features(sick_part, config.fs_hz, state_bands);
  suppress_breathing_fields(result.normal_features, draw);
  suppress_breathing_fields(result.sickness_features, draw);

  result.normal_psd = o0 > 0 ? std::move(pre_psd)
                             : (result.post_psd ? *result.post_psd
                                                : build_psd(draw, one_sided_grid(n, config.fs_hz)));
  result.sickness_psd = std::move(sick_psd);

  result.signal.samples = std::move(samples);
  result.signal.fs = config.fs_hz;
  result.signal.labels = std::move(labels);
  result.signal.meta.seed = seed;
  result.signal.meta.config = config;
  result.signal.meta.config.seed = seed;
  result.signal.meta.draw = draw;
  result.signal.meta.segments = contiguous_segments(result.signal.labels);
  return result;
}

GenerationResult regenerate(const SignalMetadata& meta, const KernelPriors& priors) {
  GenerationConfig config = meta.config;
  config.seed = meta.seed;
  bool vr = false;
  for (const SegmentInfo& s : meta.segments)
    if (s.label == SegmentLabel::sickness) vr = true;
  if (!vr) return generate_egg(config, priors);

  VrGenerationResult r = generate_egg_vr(config, priors);
  GenerationResult out;
  out.signal = std::move(r.signal);
  out.psd = std::move(r.normal_psd);
  out.features = r.normal_features;
  return out;
}

}  // namespace eggsynth
