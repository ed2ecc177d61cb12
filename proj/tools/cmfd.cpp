// Command-line front end: detect, compare, forge, attack, survival, curves,
// bench and synth.
//
// Exit codes: 0 no forgery / success, 10 forgery detected, 1 error,
// 3 benchmark corpus without WAV files.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmfd/cmfd.hpp"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitError = 1;
constexpr int kExitNoInput = 3;
constexpr int kExitForgery = 10;

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  bool print_config = false;
  std::map<std::string, std::string> flags;  // config key -> value
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key = value configuration file");
  app->add_option("--set", c.sets, "override any configuration key, as key=value (repeatable)");
  app->add_flag("--print-config", c.print_config, "print the effective configuration and exit");
  static const std::pair<const char*, const char*> named[] = {
      {"--seed", "seed"}, {"--sr", "sample_rate"}, {"--fft", "fft_size"}, {"--hop", "hop"},  {"--fanout", "fan_out"},
      {"--k", "k"},       {"--theta", "theta"},    {"--snr", "snr_db"},   {"--kind", "attack"},
  };
  for (const auto& [flag, key] : named) {
    const std::string k = key;
    app->add_option_function<std::string>(flag, [&c, k](const std::string& v) { c.flags[k] = v; },
                                          "sets config key '" + k + "'");
  }
}

cmfd::Config build_config(const Common& c) {
  cmfd::Config cfg;
  if (!c.config_path.empty()) cfg.load_file(c.config_path);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw cmfd::Error(cmfd::ErrorCode::parameter, "--set expects key=value, got " + s);
    cfg.set(cmfd::detail::trim(std::string_view(s).substr(0, eq)), std::string_view(s).substr(eq + 1));
  }
  for (const auto& [k, v] : c.flags) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cmfd::Error(cmfd::ErrorCode::io, "cannot write " + path);
  return out;
}

cmfd::WavEncoding encoding(bool pcm16) { return pcm16 ? cmfd::WavEncoding::pcm16 : cmfd::WavEncoding::float32; }

int finish_report(const cmfd::ForgeryReport& report, const cmfd::Config& cfg, const std::string& json_path,
                  const std::string& csv_path) {
  const auto det = cfg.resolved_detector();
  if (json_path == "-") {
    cmfd::write_json(std::cout, report, det, cfg.sample_rate);
  } else {
    cmfd::write_summary(std::cout, report);
    if (!json_path.empty()) {
      auto out = open_out(json_path);
      cmfd::write_json(out, report, det, cfg.sample_rate);
    }
  }
  if (!csv_path.empty()) {
    auto out = open_out(csv_path);
    out << "src_start_s,src_end_s,dst_start_s,dst_end_s,offset_s,pair_count,mean_rho\n";
    char line[160];
    for (const auto& s : report.segments) {
      std::snprintf(line, sizeof line, "%.4f,%.4f,%.4f,%.4f,%.4f,%d,%.6f\n", s.src_start_s, s.src_end_s,
                    s.dst_start_s, s.dst_end_s, s.offset_s, s.pair_count, s.mean_rho);
      out << line;
    }
  }
  return report.verdict ? kExitForgery : kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copy-move forgery detection for audio recordings"};
  app.require_subcommand(0, 1);
  Common common;
  add_common(&app, common);

  // detect
  auto* detect = app.add_subcommand("detect", "search one recording for duplicated regions");
  std::string in_path, json_path, csv_path, dump_spec, dump_peaks, dump_landmarks;
  detect->add_option("input", in_path, "WAV file")->required();
  detect->add_option("--json", json_path, "write the JSON report here ('-' for stdout)");
  detect->add_option("--csv", csv_path, "write the segment table as CSV");
  detect->add_option("--dump-spectrogram", dump_spec, "write the dB spectrogram as CSV");
  detect->add_option("--dump-peaks", dump_peaks, "write the peak constellation as CSV");
  detect->add_option("--dump-landmarks", dump_landmarks, "write the encoded landmarks as CSV");
  add_common(detect, common);

  // compare
  auto* compare = app.add_subcommand("compare", "search for material shared by two recordings");
  std::string in_b;
  compare->add_option("input_a", in_path, "source WAV")->required();
  compare->add_option("input_b", in_b, "destination WAV")->required();
  compare->add_option("--json", json_path, "write the JSON report here ('-' for stdout)");
  compare->add_option("--csv", csv_path, "write the segment table as CSV");
  add_common(compare, common);

  // forge
  auto* forge = app.add_subcommand("forge", "paste a copy of one region over another");
  std::string out_path, truth_path;
  std::optional<double> src_s, dst_s;
  double dur_s = 0.5;
  bool pcm16 = false;
  forge->add_option("input", in_path, "WAV file")->required();
  forge->add_option("output", out_path, "forged WAV")->required();
  forge->add_option("--src", src_s, "source start, seconds (random when omitted)");
  forge->add_option("--dst", dst_s, "destination start, seconds (random when omitted)");
  forge->add_option("--duration", dur_s, "copied length, seconds")->capture_default_str();
  forge->add_option("--truth", truth_path, "write the ground truth as JSON");
  forge->add_flag("--pcm16", pcm16, "write 16-bit PCM instead of 32-bit float");
  add_common(forge, common);

  // attack
  auto* attack = app.add_subcommand("attack", "apply a post-processing attack");
  std::optional<double> crop_start, crop_end;
  attack->add_option("input", in_path, "WAV file")->required();
  attack->add_option("output", out_path, "attacked WAV")->required();
  attack->add_option("--crop-start", crop_start, "crop start, seconds");
  attack->add_option("--crop-end", crop_end, "crop end, seconds");
  attack->add_flag("--pcm16", pcm16, "write 16-bit PCM instead of 32-bit float");
  add_common(attack, common);

  // survival
  auto* survival = app.add_subcommand("survival", "fraction of clean peaks still present after an attack");
  survival->add_option("clean", in_path, "clean WAV")->required();
  survival->add_option("attacked", in_b, "attacked WAV")->required();
  add_common(survival, common);

  // curves
  auto* curves = app.add_subcommand("curves", "tabulate analytic and simulated detection probabilities");
  std::uint64_t trials = 10000;
  curves->add_option("--csv", csv_path, "output CSV ('-' or omitted for stdout)");
  std::vector<int> ks;
  curves->add_option("--ks", ks, "match thresholds to tabulate (default 2 3)");
  curves->add_option("--trials", trials, "Monte-Carlo trials per row (0 disables)")->capture_default_str();
  add_common(curves, common);

  // bench
  auto* bench = app.add_subcommand("bench", "run forgeries and attacks over a WAV corpus");
  std::string corpus;
  std::vector<std::string> attack_kinds;
  int forgeries = 1;
  bool no_runtime = false;
  bench->add_option("corpus", corpus, "directory of WAV files")->required();
  bench->add_option("--csv", csv_path, "output CSV ('-' or omitted for stdout)");
  bench->add_option("--attacks", attack_kinds, "attack kinds to run besides the unattacked case");
  bench->add_option("--forgeries", forgeries, "forgeries planted per file")->capture_default_str();
  bench->add_option("--duration", dur_s, "forged length, seconds")->capture_default_str();
  bench->add_flag("--no-runtime", no_runtime, "omit the runtime column");
  add_common(bench, common);

  // synth
  auto* synth = app.add_subcommand("synth", "write a seeded speech-like test recording");
  double synth_len = 10.0;
  synth->add_option("output", out_path, "WAV file")->required();
  synth->add_option("--length", synth_len, "seconds")->capture_default_str();
  synth->add_flag("--pcm16", pcm16, "write 16-bit PCM instead of 32-bit float");
  add_common(synth, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    const cmfd::Config cfg = build_config(common);
    if (common.print_config) {
      cfg.print(std::cout);
      return kExitClean;
    }
    const auto det = cfg.resolved_detector();

    if (*detect) {
      const auto buf = cmfd::load_wav(in_path, cfg.sample_rate);
      if (!dump_spec.empty() || !dump_peaks.empty() || !dump_landmarks.empty()) {
        const auto a = cmfd::analyze(buf, det);
        if (!dump_spec.empty()) {
          auto out = open_out(dump_spec);
          cmfd::write_csv(out, a.spectrogram);
        }
        if (!dump_peaks.empty()) {
          auto out = open_out(dump_peaks);
          cmfd::write_csv(out, a.peaks);
        }
        if (!dump_landmarks.empty()) {
          auto out = open_out(dump_landmarks);
          cmfd::write_csv(out, cmfd::encode_all(a.landmarks, {det.stft.fft_size, det.zone.zone_frames}));
        }
      }
      return finish_report(cmfd::detect(buf, det), cfg, json_path, csv_path);
    }

    if (*compare) {
      const auto a = cmfd::load_wav(in_path, cfg.sample_rate);
      const auto b = cmfd::load_wav(in_b, cfg.sample_rate);
      return finish_report(cmfd::compare(a, b, det), cfg, json_path, csv_path);
    }

    if (*forge) {
      const auto buf = cmfd::load_wav(in_path, cfg.sample_rate);
      cmfd::ForgerySpec spec{0.0, dur_s, 0.0, cfg.crossfade_ms};
      if (src_s && dst_s) {
        spec.src_start_s = *src_s;
        spec.dst_start_s = *dst_s;
      } else if (src_s || dst_s) {
        throw cmfd::Error(cmfd::ErrorCode::parameter, "give both --src and --dst, or neither");
      } else {
        const auto placed = cmfd::detail::place_forgery(buf.duration_s(), dur_s, cfg.crossfade_ms, cfg.seed);
        if (!placed) throw cmfd::Error(cmfd::ErrorCode::spec, "recording too short for a random placement");
        spec = *placed;
      }
      const auto f = cmfd::make_forgery(buf, spec);
      cmfd::save_wav(out_path, f.audio, encoding(pcm16));
      char line[200];
      std::snprintf(line, sizeof line, "src_start_s=%.6f dst_start_s=%.6f length_s=%.6f offset_s=%.6f\n",
                    f.truth.src_start_s(), f.truth.dst_start_s(), f.truth.length_s(), f.truth.offset_s());
      std::cout << line;
      if (!truth_path.empty()) {
        nlohmann::ordered_json j;
        j["src_start_sample"] = f.truth.src_start;
        j["dst_start_sample"] = f.truth.dst_start;
        j["length_samples"] = f.truth.length;
        j["sample_rate"] = f.truth.sample_rate_hz;
        j["src_start_s"] = cmfd::detail::round_to(f.truth.src_start_s(), 4);
        j["dst_start_s"] = cmfd::detail::round_to(f.truth.dst_start_s(), 4);
        j["offset_s"] = cmfd::detail::round_to(f.truth.offset_s(), 4);
        auto out = open_out(truth_path);
        out << j.dump(2) << '\n';
      }
      return kExitClean;
    }

    if (*attack) {
      const auto buf = cmfd::load_wav(in_path, cfg.sample_rate);
      auto spec = cfg.attack_spec();
      if (crop_start) spec.crop_start_s = *crop_start;
      spec.crop_end_s = crop_end ? *crop_end : buf.duration_s();
      cmfd::AudioBuffer interference;
      if (!cfg.interference.empty()) {
        interference = cmfd::load_wav(cfg.interference, cfg.sample_rate);
        spec.interference = &interference;
      }
      const auto out = cmfd::apply_attack(buf, spec, cfg.seed);
      cmfd::save_wav(out_path, out, encoding(pcm16));
      if (out.size() == buf.size()) {
        char line[80];
        std::snprintf(line, sizeof line, "measured_snr_db=%.3f\n", cmfd::measure_snr_db(buf, out));
        std::cout << line;
      }
      return kExitClean;
    }

    if (*survival) {
      const auto a = cmfd::load_wav(in_path, cfg.sample_rate);
      const auto b = cmfd::load_wav(in_b, cfg.sample_rate);
      char line[64];
      std::snprintf(line, sizeof line, "q=%.6f\n", cmfd::measure_survival(a, b, det));
      std::cout << line;
      return kExitClean;
    }

    if (*curves) {
      cmfd::CurveGrid grid;
      grid.Fs = {det.zone.fan_out};
      grid.mc_trials = trials;
      grid.seed = cfg.seed;
      if (!ks.empty()) grid.ks = ks;
      if (csv_path.empty() || csv_path == "-") {
        cmfd::write_curves_csv(std::cout, grid);
      } else {
        auto out = open_out(csv_path);
        cmfd::write_curves_csv(out, grid);
      }
      return kExitClean;
    }

    if (*bench) {
      cmfd::BenchmarkGrid grid;
      grid.detector = det;
      grid.sample_rate_hz = cfg.sample_rate;
      grid.forgeries_per_file = forgeries;
      grid.duration_s = dur_s;
      grid.crossfade_ms = cfg.crossfade_ms;
      grid.include_runtime = !no_runtime;
      grid.seed = cfg.seed;
      cmfd::AudioBuffer interference;
      if (!cfg.interference.empty()) interference = cmfd::load_wav(cfg.interference, cfg.sample_rate);
      for (const auto& kind : attack_kinds) {
        cmfd::Config c = cfg;
        c.set("attack", kind);
        auto spec = c.attack_spec();
        if (!cfg.interference.empty()) spec.interference = &interference;
        grid.attacks.emplace_back(spec);
      }
      cmfd::BenchmarkSummary sum;
      if (csv_path.empty() || csv_path == "-") {
        sum = cmfd::run_benchmark(corpus, grid, std::cout, std::cerr);
      } else {
        auto out = open_out(csv_path);
        sum = cmfd::run_benchmark(corpus, grid, out, std::cerr);
      }
      if (sum.files == 0) {
        std::cerr << "error: no WAV files in " << corpus << '\n';
        return kExitNoInput;
      }
      if (sum.failed_files == sum.files) {
        std::cerr << "error: no file in " << corpus << " could be read\n";
        return kExitError;
      }
      return kExitClean;
    }

    if (*synth) {
      cmfd::SpeechSynthConfig sc;
      sc.sample_rate_hz = cfg.sample_rate;
      auto buf = cmfd::synth_speech(synth_len, cfg.seed, sc);
      cmfd::save_wav(out_path, buf, encoding(pcm16));
      return kExitClean;
    }

    std::cout << app.help();
    return kExitClean;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
