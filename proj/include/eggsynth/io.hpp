#ifndef EGGSYNTH_IO_HPP
#define EGGSYNTH_IO_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eggsynth/analysis.hpp"
#include "eggsynth/synthesis.hpp"

namespace eggsynth::io {

// Malformed input file; message carries a row/column diagnostic.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-precision decimal formatting (9 significant digits) used for all
// CSV output, so golden files are identical across platforms.
std::string format_double(double v);

// Two-column CSV: time_s,egg_au with a constant 1/fs step, LF endings.
void write_signal_csv(const std::string& path, const EggSignal& signal);

// Same record as JSON: {"fs_hz": ..., "samples": [...]}.
void write_signal_json(const std::string& path, const EggSignal& signal);

struct LoadedSignal {
  std::vector<double> samples;
  double fs = 0.0;
};

// Reads a signal CSV: either the time_s,egg_au layout (fs inferred from
// the time step) or a single amplitude column (fs_override required).
// Headers are optional. Throws parse_error with a row/column diagnostic.
LoadedSignal read_signal_csv(const std::string& path, std::optional<double> fs_override);

// Reads a freq_hz,psd two-column CSV.
PsdModel read_psd_csv(const std::string& path);

std::string metadata_to_json(const SignalMetadata& meta, bool vr);
SignalMetadata metadata_from_json(const std::string& text);
void write_metadata(const std::string& path, const SignalMetadata& meta, bool vr);
SignalMetadata read_metadata(const std::string& path);

std::string features_to_json(const FeatureSet& features);

// Minimal self-contained SVG line plots (presentation only).
void write_svg_timeseries(const std::string& path, const std::vector<double>& samples, double fs,
                          const std::string& title);
void write_svg_psd(const std::string& path, const PsdModel& psd, const std::string& title);

}  // namespace eggsynth::io

#endif
