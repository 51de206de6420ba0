#ifndef EGGSYNTH_SYNTHESIS_HPP
#define EGGSYNTH_SYNTHESIS_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "eggsynth/analysis.hpp"
#include "eggsynth/model.hpp"
#include "eggsynth/rng.hpp"

namespace eggsynth {

enum class SegmentLabel { normal, arrhythmia, sickness };

std::string to_string(SegmentLabel l);

// Randomness stream ids under the master seed (see Rng::substream). Fixed
// per role: activating a window or adding a consumer never shifts the draws
// any other consumer sees.
enum Stream : std::uint64_t {
  kStreamKernelDraw = 0,
  kStreamMainPhase = 1,
  kStreamMainNoise = 2,
  kStreamArrhythmiaPhase = 3,
  kStreamArrhythmiaNoise = 4,
  kStreamSicknessPhase = 5,
  kStreamSicknessNoise = 6,
  kStreamPostPhase = 7,
  kStreamPostNoise = 8,
};

struct GenerationConfig {
  double duration_s = 1200.0;
  double fs_hz = 2.0;
  State state = State::fasting;
  bool breathing = true;
  bool plot = false;
  std::optional<std::uint64_t> seed;  // absent: entropy-seeded at generation time
  std::optional<std::pair<double, double>> arrhythmia_window_s;
  double noise_scale = 0.0;
  double sickness_onset_s = 600.0;   // used by generate_egg_vr only
  double sickness_offset_s = 1200.0;

  std::size_t n_samples() const;
  void validate(bool vr) const;  // throws std::invalid_argument
};

struct SegmentInfo {
  SegmentLabel label = SegmentLabel::normal;
  std::size_t start = 0;   // sample index
  std::size_t length = 0;  // sample count
};

struct SignalMetadata {
  std::uint64_t seed = 0;  // the seed actually used
  GenerationConfig config;
  KernelDraw draw;
  std::vector<SegmentInfo> segments;
};

struct EggSignal {
  std::vector<double> samples;
  double fs = 0.0;
  std::vector<SegmentLabel> labels;  // one per sample
  SignalMetadata meta;
};

struct GenerationResult {
  EggSignal signal;
  PsdModel psd;  // the (noise-augmented) model spectrum of the main series
  FeatureSet features;
  std::optional<PsdModel> arrhythmia_psd;  // present when a window was set
};

struct VrGenerationResult {
  EggSignal signal;
  PsdModel normal_psd;
  PsdModel sickness_psd;
  FeatureSet normal_features;
  FeatureSet sickness_features;
  std::optional<PsdModel> post_psd;  // normal-state spectrum after offset, if any
};

// Inverse-FFT synthesis: complex spectrum sqrt(mags_m) e^{i phi_m} with
// phases uniform on [0, 2pi) for interior bins, real DC and Nyquist,
// Hermitian extension, inverse FFT with the 1/N convention. The output
// energy equals (1/N) * sum of the two-sided |X|^2 exactly (Parseval).
std::vector<double> psd_to_timeseries(const PsdModel& psd, std::size_t n_samples, Rng& rng);

// Parseval sum of a one-sided PSD for an n-sample signal: the signal
// energy implied by the spectrum under the synthesis convention.
double parseval_energy(const PsdModel& psd, std::size_t n_samples);

// Full generation: one kernel draw, spectrum build (+ colored noise when
// scale > 0), phase-randomized synthesis, optional arrhythmia window
// spliced in by hard concatenation, features from the generated samples.
GenerationResult generate_egg(const GenerationConfig& config, const KernelPriors& priors = {});

// Sickness variant: normal spectrum before onset (and after offset), the
// sickness-deformed spectrum of the same kernel draw inside
// [onset, offset). Per-state features come from the pre-onset and sickness
// stretches of the generated signal.
VrGenerationResult generate_egg_vr(const GenerationConfig& config,
                                   const KernelPriors& priors = {});

// Regenerates the exact signal described by a metadata record.
GenerationResult regenerate(const SignalMetadata& meta, const KernelPriors& priors = {});

}  // namespace eggsynth

#endif
