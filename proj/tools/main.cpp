#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eggsynth/analysis.hpp"
#include "eggsynth/io.hpp"
#include "eggsynth/model.hpp"
#include "eggsynth/stats.hpp"
#include "eggsynth/synthesis.hpp"
#include "eggsynth/version.hpp"
#include "json.hpp"

namespace {

using namespace eggsynth;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUndefined = 3;

std::pair<double, double> parse_window(const std::string& text, const char* what) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument(std::string(what) + " expects 'start,end'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + " expects two numbers 'start,end'");
  }
}

bool parse_on_off(const std::string& text, const char* what) {
  if (text == "on" || text == "1" || text == "true") return true;
  if (text == "off" || text == "0" || text == "false") return false;
  throw std::invalid_argument(std::string(what) + " expects on|off");
}

struct GenerateArgs {
  double duration = 1200.0;
  double fs = 2.0;
  std::string state = "fasting";
  std::string breathing = "on";
  std::optional<std::uint64_t> seed;
  std::string arrhythmia;  // "start,end"
  double noise = 0.0;
  std::string out;
  bool plot = false;
  std::string format = "csv";
  double onset = 600.0;    // generate-vr only
  double offset = 1200.0;  // generate-vr only
};

void add_generate_options(CLI::App* cmd, GenerateArgs& args, bool vr) {
  cmd->add_option("--duration", args.duration, "signal duration in seconds")
      ->capture_default_str();
  cmd->add_option("--fs", args.fs, "sampling frequency in Hz")->capture_default_str();
  cmd->add_option("--state", args.state, "recording state: fasting|postprandial")
      ->capture_default_str();
  cmd->add_option("--breathing", args.breathing, "breathing artifact: on|off")
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "64-bit seed (omit for a fresh signal each run)");
  cmd->add_option("--arrhythmia", args.arrhythmia, "arrhythmia window 'start,end' in seconds");
  cmd->add_option("--noise", args.noise, "colored noise scale, fraction of the PSD peak")
      ->capture_default_str();
  cmd->add_option("--out", args.out, "output signal file")->required();
  cmd->add_flag("--plot", args.plot, "also write time-series and PSD SVG plots");
  cmd->add_option("--format", args.format, "signal file format: csv|json")->capture_default_str();
  if (vr) {
    cmd->add_option("--onset", args.onset, "sickness onset in seconds")->capture_default_str();
    cmd->add_option("--offset", args.offset, "sickness offset in seconds")->capture_default_str();
  }
}

GenerationConfig config_from_args(const GenerateArgs& args, bool vr) {
  GenerationConfig config;
  config.duration_s = args.duration;
  config.fs_hz = args.fs;
  config.state = state_from_string(args.state);
  config.breathing = parse_on_off(args.breathing, "--breathing");
  config.plot = args.plot;
  config.seed = args.seed;
  config.noise_scale = args.noise;
  if (!args.arrhythmia.empty())
    config.arrhythmia_window_s = parse_window(args.arrhythmia, "--arrhythmia");
  if (vr) {
    config.sickness_onset_s = args.onset;
    config.sickness_offset_s = args.offset;
  }
  if (args.format != "csv" && args.format != "json")
    throw std::invalid_argument("--format expects csv|json");
  return config;
}

void write_signal_files(const GenerateArgs& args, const EggSignal& signal, const PsdModel& psd,
                        bool vr) {
  if (args.format == "json")
    io::write_signal_json(args.out, signal);
  else
    io::write_signal_csv(args.out, signal);
  io::write_metadata(args.out + ".meta.json", signal.meta, vr);
  if (args.plot) {
    io::write_svg_timeseries(args.out + ".timeseries.svg", signal.samples, signal.fs,
                             "synthetic EGG");
    io::write_svg_psd(args.out + ".psd.svg", psd, "model PSD");
  }
}

int cmd_generate(const GenerateArgs& args) {
  const GenerationConfig config = config_from_args(args, false);
  const GenerationResult result = generate_egg(config);
  write_signal_files(args, result.signal, result.psd, false);
  std::cout << io::features_to_json(result.features);
  return kExitOk;
}

int cmd_generate_vr(const GenerateArgs& args) {
  const GenerationConfig config = config_from_args(args, true);
  const VrGenerationResult result = generate_egg_vr(config);
  write_signal_files(args, result.signal, result.normal_psd, true);
  ordered_json out;
  out["before_sickness"] = ordered_json::parse(io::features_to_json(result.normal_features));
  out["during_sickness"] = ordered_json::parse(io::features_to_json(result.sickness_features));
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

struct AnalyzeArgs {
  std::string input;
  std::optional<double> fs;
  bool filter = false;
  std::size_t window = 0;
};

int cmd_analyze(const AnalyzeArgs& args) {
  io::LoadedSignal sig = io::read_signal_csv(args.input, args.fs);
  if (args.filter) sig.samples = butterworth_bandpass(sig.samples, sig.fs, 0.03, 0.6, 3);
  const FeatureSet features = extract_features(sig.samples, sig.fs, BandConfig{}, args.window);
  std::cout << io::features_to_json(features);
  return kExitOk;
}

struct MonteCarloArgs {
  std::size_t n = 20;
  std::size_t reps = 1'000'000;
  std::string mode = "fast";
  std::uint64_t seed = 0;
  bool force = false;
  bool serial = false;
};

int cmd_montecarlo(const MonteCarloArgs& args) {
  MonteCarloOptions options;
  options.n_per_group = args.n;
  options.replications = args.reps;
  options.seed = args.seed;
  if (args.mode == "fast") {
    options.mode = McMode::fast;
  } else if (args.mode == "full") {
    options.mode = McMode::full;
  } else {
    throw std::invalid_argument("--mode expects fast|full");
  }
  if (options.mode == McMode::full && options.replications > 100'000 && !args.force)
    throw std::invalid_argument(
        "full mode above 100000 replications takes hours; pass --force to run anyway");

  const MonteCarloReport report =
      args.serial ? run_monte_carlo_reference(options) : run_monte_carlo(options);
  ordered_json j;
  j["n_per_group"] = report.n_per_group;
  j["replications"] = report.replications;
  j["mode"] = args.mode;
  ordered_json fracs;
  fracs["0.05"] = report.frac_p_lt_05;
  fracs["0.01"] = report.frac_p_lt_01;
  fracs["0.001"] = report.frac_p_lt_001;
  j["frac_p_lt"] = fracs;
  j["degenerate"] = report.degenerate;
  j["runtime_s"] = report.runtime_s;
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

struct FitArgs {
  std::string input;
  std::string input_type = "signal";
  std::optional<double> fs;
  std::string band = "2,4";
  std::size_t window = 0;
  bool no_filter = false;
};

int cmd_fit(const FitArgs& args) {
  const auto [band_lo_cpm, band_hi_cpm] = parse_window(args.band, "--band");
  PsdModel psd;
  std::size_t window_used = 0;
  if (args.input_type == "psd") {
    psd = io::read_psd_csv(args.input);
  } else if (args.input_type == "signal") {
    io::LoadedSignal sig = io::read_signal_csv(args.input, args.fs);
    if (!args.no_filter) sig.samples = butterworth_bandpass(sig.samples, sig.fs, 0.03, 0.6, 3);
    window_used = args.window != 0
                      ? args.window
                      : static_cast<std::size_t>(std::lround(0.125 * sig.samples.size()));
    psd = welch_psd(sig.samples, sig.fs, window_used);
  } else {
    throw std::invalid_argument("--input-type expects signal|psd");
  }

  const GaussianFit fit = fit_gaussian_weighted(psd, band_lo_cpm / 60.0, band_hi_cpm / 60.0);
  ordered_json j;
  j["mu_cpm"] = fit.mu_hz * 60.0;
  j["mu_hz"] = fit.mu_hz;
  j["sigma_cpm"] = fit.sigma_hz * 60.0;
  j["sigma_hz"] = fit.sigma_hz;
  j["band_cpm"] = ordered_json::array({band_lo_cpm, band_hi_cpm});
  if (window_used != 0) j["welch_window"] = window_used;
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eggsynth: synthetic electrogastrogram generator and analysis toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenerateArgs gen_args;
  CLI::App* gen = app.add_subcommand("generate", "generate a synthetic EGG signal");
  add_generate_options(gen, gen_args, false);

  GenerateArgs vr_args;
  CLI::App* vr = app.add_subcommand("generate-vr",
                                    "generate a signal with a simulator-sickness episode");
  add_generate_options(vr, vr_args, true);

  AnalyzeArgs an_args;
  CLI::App* an = app.add_subcommand("analyze", "extract spectral features from a recording");
  an->add_option("input", an_args.input, "signal CSV (time_s,egg_au or one amplitude column)")
      ->required();
  an->add_option("--fs", an_args.fs, "sampling rate for single-column input");
  an->add_flag("--filter", an_args.filter, "band-pass 0.03-0.6 Hz (3rd order Butterworth) first");
  an->add_option("--window", an_args.window, "Welch window length in samples (default 12.5%)");

  MonteCarloArgs mc_args;
  CLI::App* mc = app.add_subcommand("montecarlo",
                                    "replicated fasting-vs-postprandial DF comparison");
  mc->add_option("--n", mc_args.n, "dominant frequencies per state")->capture_default_str();
  mc->add_option("--reps", mc_args.reps, "number of replications")->capture_default_str();
  mc->add_option("--mode", mc_args.mode, "fast (draw DFs from priors) | full (synthesize signals)")
      ->capture_default_str();
  mc->add_option("--seed", mc_args.seed, "master seed")->capture_default_str();
  mc->add_flag("--force", mc_args.force, "allow full mode above 100000 replications");
  mc->add_flag("--serial", mc_args.serial, "use the serial reference implementation");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit Gaussian kernel parameters from a recording");
  fit->add_option("input", fit_args.input, "signal or PSD CSV")->required();
  fit->add_option("--input-type", fit_args.input_type, "signal|psd")->capture_default_str();
  fit->add_option("--fs", fit_args.fs, "sampling rate for single-column input");
  fit->add_option("--band", fit_args.band, "fit band 'lo,hi' in cpm")->capture_default_str();
  fit->add_option("--window", fit_args.window, "Welch window length in samples (default 12.5%)");
  fit->add_flag("--no-filter", fit_args.no_filter, "skip the 0.03-0.6 Hz band-pass");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_args);
    if (vr->parsed()) return cmd_generate_vr(vr_args);
    if (an->parsed()) return cmd_analyze(an_args);
    if (mc->parsed()) return cmd_montecarlo(mc_args);
    if (fit->parsed()) return cmd_fit(fit_args);
  } catch (const undefined_features_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUndefined;
  } catch (const io::parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
