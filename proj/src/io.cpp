#include "eggsynth/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eggsynth/version.hpp"
#include "json.hpp"

namespace eggsynth::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_field(const std::string& field, std::size_t row, std::size_t col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw parse_error("row " + std::to_string(row) + ", column " + std::to_string(col) +
                      ": not a number: '" + field + "'");
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool looks_numeric(const std::string& s) {
  try {
    std::size_t pos = 0;
    (void)std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

ordered_json window_json(const std::optional<std::pair<double, double>>& w) {
  if (!w) return nullptr;
  return ordered_json::array({w->first, w->second});
}

ordered_json draw_json(const KernelDraw& d) {
  ordered_json j;
  j["state"] = to_string(d.state);
  j["mu_df_cpm"] = d.mu_df_cpm;
  j["sigma_df_cpm"] = d.sigma_df_cpm;
  j["mu_br_cpm"] = d.mu_br_cpm;
  j["sigma_br_cpm"] = d.sigma_br_cpm;
  j["rel_mag_br"] = d.rel_mag_br;
  j["breathing"] = d.breathing;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_signal_csv(const std::string& path, const EggSignal& signal) {
  std::ofstream out = open_out(path);
  out << "time_s,egg_au\n";
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    const double t = static_cast<double>(i) / signal.fs;
    out << format_double(t) << ',' << format_double(signal.samples[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_signal_json(const std::string& path, const EggSignal& signal) {
  ordered_json j;
  j["fs_hz"] = signal.fs;
  j["samples"] = signal.samples;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

LoadedSignal read_signal_csv(const std::string& path, std::optional<double> fs_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  LoadedSignal sig;
  std::vector<double> times;
  std::string line;
  std::size_t row = 0;
  std::size_t n_cols = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (row == 1 && !looks_numeric(fields[0])) continue;  // header
    if (n_cols == 0) {
      n_cols = fields.size();
      if (n_cols != 1 && n_cols != 2)
        throw parse_error("row " + std::to_string(row) + ": expected 1 or 2 columns, got " +
                          std::to_string(fields.size()));
    }
    if (fields.size() != n_cols)
      throw parse_error("row " + std::to_string(row) + ": expected " + std::to_string(n_cols) +
                        " columns, got " + std::to_string(fields.size()));
    if (n_cols == 2) {
      times.push_back(parse_field(fields[0], row, 1));
      sig.samples.push_back(parse_field(fields[1], row, 2));
    } else {
      sig.samples.push_back(parse_field(fields[0], row, 1));
    }
  }
  if (sig.samples.empty()) throw parse_error("no data rows in " + path);

  if (n_cols == 2) {
    if (times.size() < 2) throw parse_error("need at least 2 rows to infer fs");
    const double step = times[1] - times[0];
    if (!(step > 0.0)) throw parse_error("row 2: time column must be strictly increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (std::fabs(times[i] - times[i - 1] - step) > 1e-6 * std::max(step, 1.0))
        throw parse_error("row " + std::to_string(i + 2) + ": time step is not constant");
    }
    sig.fs = 1.0 / step;
    if (fs_override) sig.fs = *fs_override;
  } else {
    if (!fs_override)
      throw parse_error("single-column input needs an explicit sampling rate (--fs)");
    sig.fs = *fs_override;
  }
  if (!(sig.fs > 0.0)) throw parse_error("sampling rate must be positive");
  return sig;
}

PsdModel read_psd_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  PsdModel psd;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (row == 1 && !looks_numeric(fields[0])) continue;
    if (fields.size() != 2)
      throw parse_error("row " + std::to_string(row) + ": expected 2 columns (freq_hz,psd)");
    psd.freqs.push_back(parse_field(fields[0], row, 1));
    psd.mags.push_back(parse_field(fields[1], row, 2));
  }
  if (psd.freqs.size() < 2) throw parse_error("PSD file needs at least 2 rows");
  for (std::size_t i = 1; i < psd.freqs.size(); ++i)
    if (!(psd.freqs[i] > psd.freqs[i - 1]))
      throw parse_error("row " + std::to_string(i + 1) + ": frequencies must increase");
  return psd;
}

std::string metadata_to_json(const SignalMetadata& meta, bool vr) {
  ordered_json j;
  j["tool"] = "eggsynth";
  j["version"] = kVersion;
  j["seed"] = meta.seed;
  ordered_json cfg;
  cfg["duration_s"] = meta.config.duration_s;
  cfg["fs_hz"] = meta.config.fs_hz;
  cfg["state"] = to_string(meta.config.state);
  cfg["breathing"] = meta.config.breathing;
  cfg["noise_scale"] = meta.config.noise_scale;
  cfg["arrhythmia_window_s"] = window_json(meta.config.arrhythmia_window_s);
  cfg["sickness_window_s"] =
      vr ? ordered_json::array({meta.config.sickness_onset_s, meta.config.sickness_offset_s})
         : ordered_json(nullptr);
  j["config"] = cfg;
  j["draw"] = draw_json(meta.draw);
  ordered_json segs = ordered_json::array();
  for (const SegmentInfo& s : meta.segments) {
    ordered_json seg;
    seg["label"] = to_string(s.label);
    seg["start_sample"] = s.start;
    seg["n_samples"] = s.length;
    segs.push_back(seg);
  }
  j["segments"] = segs;
  return j.dump(2) + "\n";
}

SignalMetadata metadata_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  SignalMetadata meta;
  meta.seed = j.at("seed").get<std::uint64_t>();
  const ordered_json& cfg = j.at("config");
  meta.config.duration_s = cfg.at("duration_s").get<double>();
  meta.config.fs_hz = cfg.at("fs_hz").get<double>();
  meta.config.state = state_from_string(cfg.at("state").get<std::string>());
  meta.config.breathing = cfg.at("breathing").get<bool>();
  meta.config.noise_scale = cfg.at("noise_scale").get<double>();
  meta.config.seed = meta.seed;
  if (!cfg.at("arrhythmia_window_s").is_null()) {
    meta.config.arrhythmia_window_s = {cfg["arrhythmia_window_s"][0].get<double>(),
                                       cfg["arrhythmia_window_s"][1].get<double>()};
  }
  if (!cfg.at("sickness_window_s").is_null()) {
    meta.config.sickness_onset_s = cfg["sickness_window_s"][0].get<double>();
    meta.config.sickness_offset_s = cfg["sickness_window_s"][1].get<double>();
  }
  if (j.contains("segments")) {
    for (const auto& seg : j.at("segments")) {
      SegmentInfo s;
      const std::string label = seg.at("label").get<std::string>();
      s.label = label == "arrhythmia" ? SegmentLabel::arrhythmia
              : label == "sickness"   ? SegmentLabel::sickness
                                      : SegmentLabel::normal;
      s.start = seg.at("start_sample").get<std::size_t>();
      s.length = seg.at("n_samples").get<std::size_t>();
      meta.segments.push_back(s);
    }
  }
  return meta;
}

void write_metadata(const std::string& path, const SignalMetadata& meta, bool vr) {
  std::ofstream out = open_out(path);
  out << metadata_to_json(meta, vr);
  if (!out) throw std::runtime_error("write failed: " + path);
}

SignalMetadata read_metadata(const std::string& path) { return metadata_from_json(read_file(path)); }

std::string features_to_json(const FeatureSet& f) {
  ordered_json j;
  j["df_hz"] = f.df_hz;
  j["df_peak_width_hz"] = f.df_peak_width_hz;
  j["df_width_clamped"] = f.df_width_clamped;
  j["br_peak_hz"] = f.br_peak_hz ? ordered_json(*f.br_peak_hz) : ordered_json(nullptr);
  j["br_peak_width_hz"] =
      f.br_peak_width_hz ? ordered_json(*f.br_peak_width_hz) : ordered_json(nullptr);
  j["total_power_au"] = f.total_power;
  j["pct_normogastria"] = f.pct_normo;
  j["pct_bradygastria"] = f.pct_brady;
  j["pct_tachygastria"] = f.pct_tachy;
  j["median_freq_hz"] = f.median_freq_hz;
  j["crest_factor"] = f.crest_factor;
  return j.dump(2) + "\n";
}

namespace {

// Shared polyline plot: data scaled into a fixed viewport with min/max
// axis labels.
void write_svg_polyline(const std::string& path, const std::vector<double>& xs,
                        const std::vector<double>& ys, const std::string& title,
                        const std::string& x_label, const std::string& y_label) {
  constexpr int kW = 960;
  constexpr int kH = 320;
  constexpr int kPad = 50;
  double x_min = xs.front(), x_max = xs.back();
  double y_min = ys.front(), y_max = ys.front();
  for (double y : ys) {
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (y_max == y_min) y_max = y_min + 1.0;
  if (x_max == x_min) x_max = x_min + 1.0;

  auto px = [&](double x) { return kPad + (x - x_min) / (x_max - x_min) * (kW - 2 * kPad); };
  auto py = [&](double y) { return kH - kPad - (y - y_min) / (y_max - y_min) * (kH - 2 * kPad); };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kPad << "\" y=\"" << kH - kPad + 18 << "\" font-size=\"11\">"
      << format_double(x_min) << "</text>\n";
  out << "<text x=\"" << kW - kPad << "\" y=\"" << kH - kPad + 18
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(x_max) << "</text>\n";
  out << "<text x=\"" << kPad - 4 << "\" y=\"" << kH - kPad
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(y_min) << "</text>\n";
  out << "<text x=\"" << kPad - 4 << "\" y=\"" << kPad + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(y_max) << "</text>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 8 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << kH / 2
      << "\" font-size=\"12\" transform=\"rotate(-90 14 " << kH / 2 << ")\" text-anchor=\"middle\">"
      << y_label << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"#1565c0\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << px(xs[i]) << ',' << py(ys[i]);
    if (i + 1 < xs.size()) out << ' ';
  }
  out << "\"/>\n</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_svg_timeseries(const std::string& path, const std::vector<double>& samples, double fs,
                          const std::string& title) {
  std::vector<double> t(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) t[i] = static_cast<double>(i) / fs;
  write_svg_polyline(path, t, samples, title, "time [s]", "amplitude [a.u.]");
}

void write_svg_psd(const std::string& path, const PsdModel& psd, const std::string& title) {
  write_svg_polyline(path, psd.freqs, psd.mags, title, "frequency [Hz]", "PSD [a.u.]");
}

}  // namespace eggsynth::io
