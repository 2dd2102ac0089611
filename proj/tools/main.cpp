// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// hlsep command line: separate | bench | synth | inspect.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "common.hpp"
#include "hlsep.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cli;

namespace {

// Deterministic parameter draws for synthetic datasets (splitmix64).
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double draw_uniform(std::uint64_t seed, std::uint64_t salt, double lo, double hi) {
  const double u = static_cast<double>(mix64(seed ^ mix64(salt)) >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

struct CommonOpts {
  std::string config_file;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_file,
                  "JSON config file (default: $HLSEP_CONFIG when set)");
  cmd->add_option("--set", opts->sets, "Override a config key, e.g. --set nmf.max_iter=200");
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_trace_csv(const fs::path& path, const hlsep_result* res) {
  std::size_t n = 0;
  check(hlsep_result_trace(res, &n, nullptr, nullptr, nullptr, nullptr, nullptr), "trace");
  std::vector<double> total(n), div(n), sp(n), exdiv(n), exsp(n);
  check(hlsep_result_trace(res, &n, total.data(), div.data(), sp.data(), exdiv.data(),
                           exsp.data()),
        "trace");
  std::ofstream out(path);
  if (!out.good()) throw CliError(2, "cannot write " + path.string());
  out << "iteration,total,divergence,sparsity,exemplar_divergence,exemplar_sparsity\n";
  for (std::size_t i = 0; i < n; ++i) {
    out << i << "," << fmt(total[i], "%.12g") << "," << fmt(div[i], "%.12g") << ","
        << fmt(sp[i], "%.12g") << "," << fmt(exdiv[i], "%.12g") << ","
        << fmt(exsp[i], "%.12g") << "\n";
  }
}

// ---------------------------------------------------------------------
// separate

struct SeparateOpts {
  CommonOpts common;
  std::string input;
  std::string output;
  std::string heart_db;
  std::string lung_db;
  std::string method;
  double start = -1.0;
  double duration = -1.0;
  std::int64_t seed = -1;
  bool masks = false;
  bool png = false;
};

int cmd_separate(const SeparateOpts& opts) {
  ConfigPtr cfg = build_config(opts.common.config_file, opts.common.sets);
  if (!opts.method.empty()) {
    check(hlsep_config_set_str(cfg.get(), "method", opts.method.c_str()), "--method");
  }
  if (opts.seed >= 0) {
    check(hlsep_config_set(cfg.get(), "nmf.seed", static_cast<double>(opts.seed)), "--seed");
  }
  const std::string method = cfg_str(cfg.get(), "method");
  const double rate = cfg_num(cfg.get(), "audio.rate");

  AudioPtr raw = read_audio(opts.input);
  AudioPtr at_rate = resample_audio(raw.get(), rate);
  AudioPtr mixture = std::move(at_rate);
  if (opts.start >= 0.0 || opts.duration >= 0.0) {
    const double start = std::max(opts.start, 0.0);
    const double duration = opts.duration >= 0.0
                                ? opts.duration
                                : static_cast<double>(hlsep_audio_size(mixture.get())) / rate - start;
    hlsep_audio* seg = nullptr;
    check(hlsep_audio_segment(mixture.get(), start, duration, &seg), "--start/--duration");
    mixture.reset(seg);
  }

  const bool needs_heart = method == "nmcf" || method == "supervised" ||
                           method == "semi_supervised" || method == "cq";
  const bool needs_lung = method == "nmcf" || method == "supervised";
  DbPtr heart;
  DbPtr lung;
  if (needs_heart) {
    if (opts.heart_db.empty()) {
      throw CliError(2, "method '" + method + "' requires --heart-db (no heart database manifest given)");
    }
    heart = load_db(opts.heart_db, rate);
  }
  if (needs_lung) {
    if (opts.lung_db.empty()) {
      throw CliError(2, "method '" + method + "' requires --lung-db (no lung database manifest given)");
    }
    lung = load_db(opts.lung_db, rate);
  }

  hlsep_result* raw_res = nullptr;
  check(hlsep_separate(mixture.get(), heart.get(), lung.get(), cfg.get(), &raw_res),
        "separation");
  ResultPtr result(raw_res);

  fs::create_directories(opts.output);
  json stem_meta = json::array();
  for (std::size_t i = 0; i < hlsep_result_stem_count(result.get()); ++i) {
    const char* name = hlsep_result_stem_name(result.get(), i);
    hlsep_audio* stem = nullptr;
    check(hlsep_result_stem(result.get(), name, &stem), std::string("stem ") + name);
    AudioPtr stem_ptr(stem);
    const fs::path wav = fs::path(opts.output) / (std::string(name) + ".wav");
    std::uint64_t clipped = 0;
    check(hlsep_audio_write_wav(stem_ptr.get(), wav.string().c_str(), &clipped),
          "writing " + wav.string());
    stem_meta.push_back({{"name", name}, {"file", wav.filename().string()},
                         {"clipped_samples", clipped}});
  }

  write_trace_csv(fs::path(opts.output) / "cost_trace.csv", result.get());

  const Factors factors = factors_from_result(result.get());
  write_factors(fs::path(opts.output) / "factors.bin", factors);

  if (opts.masks) {
    for (const auto& [name, values] : factors.masks) {
      write_matrix_csv(fs::path(opts.output) / ("mask_" + name + ".csv"), values,
                       factors.bins, factors.frames);
      if (opts.png) {
        write_matrix_png(fs::path(opts.output) / ("mask_" + name + ".png"), values,
                         factors.bins, factors.frames);
      }
    }
  }

  json meta;
  meta["command"] = "separate";
  meta["input"] = opts.input;
  meta["heart_db"] = opts.heart_db;
  meta["lung_db"] = opts.lung_db;
  meta["stems"] = stem_meta;
  write_config_snapshot(cfg.get(), meta, fs::path(opts.output) / "config.json");
  return 0;
}

// ---------------------------------------------------------------------
// synth

struct SynthOpts {
  CommonOpts common;
  std::string output;
  int count = 10;
  std::int64_t seed = 1;
  int db_items = 5;
  std::string preset = "default";
};

void write_mix_wavs(const hlsep_mix* mix, const fs::path& dir) {
  for (const char* name : {"mixture", "heart", "lung", "noise"}) {
    hlsep_audio* a = nullptr;
    check(hlsep_mix_audio(mix, name, &a), std::string("mix stem ") + name);
    AudioPtr ap(a);
    check(hlsep_audio_write_wav(ap.get(), (dir / (std::string(name) + ".wav")).string().c_str(),
                                nullptr),
          std::string("writing ") + name);
  }
}

json events_json(const hlsep_mix* mix, const char* kind) {
  std::size_t n = 0;
  check(hlsep_mix_events(mix, kind, nullptr, 0, &n), kind);
  std::vector<double> ev(n);
  if (n) check(hlsep_mix_events(mix, kind, ev.data(), n, &n), kind);
  return json(ev);
}

int cmd_synth(const SynthOpts& opts) {
  if (opts.preset != "default") throw CliError(1, "unknown preset '" + opts.preset + "'");
  if (opts.count < 1 || opts.db_items < 1) throw CliError(1, "--n and --db-items must be >= 1");
  ConfigPtr base = build_config(opts.common.config_file, opts.common.sets);

  const fs::path out(opts.output);
  fs::create_directories(out / "db" / "heart");
  fs::create_directories(out / "db" / "lung");

  const std::uint64_t seed = static_cast<std::uint64_t>(opts.seed);

  // Clean exemplar databases: heart pulses and breath noise with spread
  // rates and slight spectral variation between items.
  auto gen_db = [&](const char* kind, const fs::path& dir) {
    json items = json::array();
    for (int i = 0; i < opts.db_items; ++i) {
      ConfigPtr c = build_config(opts.common.config_file, opts.common.sets);
      const std::uint64_t salt = (std::string(kind) == "heart" ? 0x10000u : 0x20000u) +
                                 static_cast<std::uint64_t>(i);
      check(hlsep_config_set(c.get(), "synth.seed",
                             static_cast<double>(mix64(seed ^ mix64(salt)))),
            "synth.seed");
      check(hlsep_config_set(c.get(), "synth.heart_bpm",
                             draw_uniform(seed, salt + 1, 80.0, 200.0)),
            "synth.heart_bpm");
      check(hlsep_config_set(c.get(), "synth.heart_s1_freq",
                             draw_uniform(seed, salt + 2, 85.0, 95.0)),
            "synth.heart_s1_freq");
      check(hlsep_config_set(c.get(), "synth.heart_s2_freq",
                             draw_uniform(seed, salt + 3, 105.0, 115.0)),
            "synth.heart_s2_freq");
      check(hlsep_config_set(c.get(), "synth.lung_rate",
                             draw_uniform(seed, salt + 4, 20.0, 60.0)),
            "synth.lung_rate");
      hlsep_mix* m = nullptr;
      check(hlsep_synth(c.get(), &m), "synthesising exemplar");
      MixPtr mix(m);
      hlsep_audio* a = nullptr;
      check(hlsep_mix_audio(mix.get(), kind, &a), kind);
      AudioPtr ap(a);
      char name[32];
      std::snprintf(name, sizeof name, "%03d.wav", i);
      check(hlsep_audio_write_wav(ap.get(), (dir / name).string().c_str(), nullptr),
            "writing exemplar");
      items.push_back({{"path", name}, {"label", std::string(kind) + "_" + name},
                       {"lambda", 1.0}});
    }
    json manifest;
    manifest["items"] = items;
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
  };
  gen_db("heart", out / "db" / "heart");
  gen_db("lung", out / "db" / "lung");

  // Mixtures: rates drawn over the physiologic ranges, noise kinds cycled.
  const char* kinds[] = {"white", "babble", "bursts"};
  json names = json::array();
  for (int i = 0; i < opts.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "mix%03d", i);
    const fs::path dir = out / name;
    fs::create_directories(dir);

    ConfigPtr c = build_config(opts.common.config_file, opts.common.sets);
    const std::uint64_t salt = 0x30000u + static_cast<std::uint64_t>(i);
    const double bpm = draw_uniform(seed, salt + 1, 70.0, 220.0);
    const double breaths = draw_uniform(seed, salt + 2, 20.0, 60.0);
    const char* kind = kinds[i % 3];
    check(hlsep_config_set(c.get(), "synth.seed",
                           static_cast<double>(mix64(seed ^ mix64(salt)))),
          "synth.seed");
    check(hlsep_config_set(c.get(), "synth.heart_bpm", bpm), "synth.heart_bpm");
    check(hlsep_config_set(c.get(), "synth.lung_rate", breaths), "synth.lung_rate");
    check(hlsep_config_set_str(c.get(), "synth.noise_kind", kind), "synth.noise_kind");

    hlsep_mix* m = nullptr;
    check(hlsep_synth(c.get(), &m), "synthesising mixture");
    MixPtr mix(m);
    write_mix_wavs(mix.get(), dir);

    double hr = 0.0, br = 0.0, gain = 0.0;
    check(hlsep_mix_rate(mix.get(), "heart", &hr), "heart rate");
    check(hlsep_mix_rate(mix.get(), "lung", &br), "lung rate");
    check(hlsep_mix_noise_gain(mix.get(), &gain), "noise gain");

    json manifest;
    manifest["name"] = name;
    manifest["seed"] = mix64(seed ^ mix64(salt));
    manifest["heart_bpm"] = bpm;
    manifest["lung_rate"] = breaths;
    manifest["noise_kind"] = kind;
    manifest["snr_db"] = cfg_num(c.get(), "synth.snr_db");
    manifest["duration"] = cfg_num(c.get(), "synth.duration");
    manifest["sample_rate"] = cfg_num(c.get(), "synth.sample_rate");
    manifest["heart_rate_b10s"] = hr;
    manifest["breath_rate_b10s"] = br;
    manifest["noise_gain"] = gain;
    manifest["beats"] = events_json(mix.get(), "beats");
    manifest["breaths"] = events_json(mix.get(), "breaths");
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
    names.push_back(name);
  }

  json dataset;
  dataset["preset"] = opts.preset;
  dataset["seed"] = opts.seed;
  dataset["n"] = opts.count;
  dataset["db_items"] = opts.db_items;
  dataset["mixtures"] = names;
  std::ofstream df(out / "dataset.json");
  df << dataset.dump(2) << "\n";
  write_config_snapshot(base.get(), {{"command", "synth"}}, out / "config.json");
  return 0;
}

// ---------------------------------------------------------------------
// bench

struct BenchOpts {
  CommonOpts common;
  std::string data;
  std::string output;
  std::string methods = "nmcf,shah,cq";
  std::int64_t seed = -1;
};

struct MixtureCase {
  std::string name;
  AudioPtr mixture;
  AudioPtr heart_gt;
  AudioPtr lung_gt;
  double hr_true = 0.0;
  double br_true = 0.0;
};

struct Row {
  std::string mixture;
  std::string method;
  double heart_sdr = 0.0;
  double lung_sdr = 0.0;
  double hr_est = 0.0;
  double hr_err = 0.0;
  double br_est = 0.0;
  double br_err = 0.0;
};

AudioPtr truncate_audio(const hlsep_audio* audio, std::size_t n, double rate) {
  std::vector<double> samples = audio_samples(audio);
  samples.resize(std::min(n, samples.size()));
  hlsep_audio* out = nullptr;
  check(hlsep_audio_from_samples(samples.data(), samples.size(), rate, &out), "truncate");
  return AudioPtr(out);
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

int cmd_bench(const BenchOpts& opts) {
  ConfigPtr cfg = build_config(opts.common.config_file, opts.common.sets);
  if (opts.seed >= 0) {
    check(hlsep_config_set(cfg.get(), "nmf.seed", static_cast<double>(opts.seed)), "--seed");
  }
  const double rate = cfg_num(cfg.get(), "audio.rate");
  const std::vector<std::string> methods = split_csv_list(opts.methods);
  if (methods.empty()) throw CliError(1, "--methods list is empty");

  const fs::path data(opts.data);
  std::ifstream df(data / "dataset.json");
  if (!df.good()) throw CliError(2, "no dataset.json under " + data.string());
  json dataset;
  df >> dataset;
  const auto mixture_names = dataset.at("mixtures").get<std::vector<std::string>>();
  if (mixture_names.empty()) throw CliError(2, "dataset lists no mixtures");

  DbPtr heart_db = load_db(data / "db" / "heart", rate);
  DbPtr lung_db = load_db(data / "db" / "lung", rate);

  std::vector<MixtureCase> cases;
  for (const std::string& name : mixture_names) {
    const fs::path dir = data / name;
    std::ifstream mf(dir / "manifest.json");
    if (!mf.good()) throw CliError(2, "missing manifest: " + (dir / "manifest.json").string());
    json manifest;
    mf >> manifest;
    MixtureCase c;
    c.name = name;
    c.mixture = resample_audio(read_audio(dir / "mixture.wav").get(), rate);
    c.heart_gt = resample_audio(read_audio(dir / "heart.wav").get(), rate);
    c.lung_gt = resample_audio(read_audio(dir / "lung.wav").get(), rate);
    c.hr_true = manifest.at("heart_rate_b10s").get<double>();
    c.br_true = manifest.at("breath_rate_b10s").get<double>();
    cases.push_back(std::move(c));
  }

  std::vector<Row> rows;
  std::map<std::string, std::map<std::string, std::vector<double>>> series;

  auto rate_on = [&](const hlsep_audio* stem, bool heart) {
    double r = 0.0;
    int low = 0;
    const int status = heart ? hlsep_heart_rate(stem, &r, &low, nullptr, 0, nullptr)
                             : hlsep_breathing_rate(stem, &r, &low, nullptr, 0, nullptr);
    check(status, heart ? "heart rate" : "breathing rate");
    return r;
  };

  for (const MixtureCase& c : cases) {
    // Unprocessed-mixture baseline row.
    {
      Row row;
      row.mixture = c.name;
      row.method = "mixture";
      double v = 0.0;
      check(hlsep_sdr(c.mixture.get(), c.heart_gt.get(), &v), "sdr");
      row.heart_sdr = v;
      check(hlsep_sdr(c.mixture.get(), c.lung_gt.get(), &v), "sdr");
      row.lung_sdr = v;
      row.hr_est = rate_on(c.mixture.get(), true);
      row.br_est = rate_on(c.mixture.get(), false);
      row.hr_err = std::abs(row.hr_est - c.hr_true);
      row.br_err = std::abs(row.br_est - c.br_true);
      series["mixture"]["heart_sdr"].push_back(row.heart_sdr);
      series["mixture"]["lung_sdr"].push_back(row.lung_sdr);
      series["mixture"]["hr_err"].push_back(row.hr_err);
      series["mixture"]["br_err"].push_back(row.br_err);
      rows.push_back(row);
    }

    for (const std::string& method : methods) {
      ConfigPtr run_cfg = build_config(opts.common.config_file, opts.common.sets);
      if (opts.seed >= 0) {
        check(hlsep_config_set(run_cfg.get(), "nmf.seed", static_cast<double>(opts.seed)),
              "--seed");
      }
      check(hlsep_config_set_str(run_cfg.get(), "method", method.c_str()), "method");
      hlsep_result* raw = nullptr;
      check(hlsep_separate(c.mixture.get(), heart_db.get(), lung_db.get(), run_cfg.get(),
                           &raw),
            method + " on " + c.name);
      ResultPtr result(raw);

      hlsep_audio* hs = nullptr;
      check(hlsep_result_stem(result.get(), "heart", &hs), "heart stem");
      AudioPtr heart_stem(hs);
      hlsep_audio* ls = nullptr;
      check(hlsep_result_stem(result.get(), "lung", &ls), "lung stem");
      AudioPtr lung_stem(ls);

      // Stems cover the analyzed interior; compare over that window.
      const std::size_t n = hlsep_audio_size(heart_stem.get());
      AudioPtr heart_ref = truncate_audio(c.heart_gt.get(), n, rate);
      AudioPtr lung_ref = truncate_audio(c.lung_gt.get(), n, rate);

      Row row;
      row.mixture = c.name;
      row.method = method;
      double v = 0.0;
      check(hlsep_sdr(heart_stem.get(), heart_ref.get(), &v), "sdr");
      row.heart_sdr = v;
      check(hlsep_sdr(lung_stem.get(), lung_ref.get(), &v), "sdr");
      row.lung_sdr = v;
      row.hr_est = rate_on(heart_stem.get(), true);
      row.br_est = rate_on(lung_stem.get(), false);
      row.hr_err = std::abs(row.hr_est - c.hr_true);
      row.br_err = std::abs(row.br_est - c.br_true);
      series[method]["heart_sdr"].push_back(row.heart_sdr);
      series[method]["lung_sdr"].push_back(row.lung_sdr);
      series[method]["hr_err"].push_back(row.hr_err);
      series[method]["br_err"].push_back(row.br_err);
      rows.push_back(row);
    }
  }

  fs::create_directories(opts.output);

  {
    std::ofstream out(fs::path(opts.output) / "per_mixture.csv");
    out << "mixture,method,heart_sdr_db,lung_sdr_db,hr_est_b10s,hr_abs_err_b10s,"
           "br_est_b10s,br_abs_err_b10s\n";
    for (const Row& r : rows) {
      out << r.mixture << "," << r.method << "," << fmt(r.heart_sdr, "%.12g") << ","
          << fmt(r.lung_sdr, "%.12g") << "," << fmt(r.hr_est, "%.12g") << ","
          << fmt(r.hr_err, "%.12g") << "," << fmt(r.br_est, "%.12g") << ","
          << fmt(r.br_err, "%.12g") << "\n";
    }
  }

  const std::string reference = methods.front();
  const std::size_t n_cases = cases.size();
  auto median_iqr_of = [&](const std::vector<double>& v) {
    double med = 0.0, iqr = 0.0;
    check(hlsep_median_iqr(v.data(), v.size(), &med, &iqr), "median");
    return std::pair<double, double>(med, iqr);
  };

  auto p_or_nan = [&](const std::vector<double>& worse, const std::vector<double>& better) {
    if (worse.size() != better.size() || worse.size() < 5) {
      return std::numeric_limits<double>::quiet_NaN();  // insufficient-n
    }
    double p = 0.0;
    const int status = hlsep_wilcoxon(worse.data(), better.data(), worse.size(), &p);
    if (status != HLSEP_OK) return std::numeric_limits<double>::quiet_NaN();
    return p;
  };

  std::vector<std::string> all_rows = {"mixture"};
  all_rows.insert(all_rows.end(), methods.begin(), methods.end());

  std::ofstream rep_csv(fs::path(opts.output) / "report.csv");
  rep_csv << "method,hr_mae_b10s,hr_iqr_b10s,heart_sdr_median_db,heart_sdr_impr_mean_db,"
             "heart_sdr_impr_std_db,br_mae_b10s,br_iqr_b10s,lung_sdr_median_db,"
             "lung_sdr_impr_mean_db,lung_sdr_impr_std_db,p_hr_err_vs_" +
                 reference + ",p_heart_sdr_" + reference + "_better\n";

  std::ofstream rep_txt(fs::path(opts.output) / "report.txt");
  rep_txt << "method            HR MAE (IQR) b/10s   heart SDR impr mean (std) dB   "
             "BR MAE (IQR) b/10s   lung SDR impr mean (std) dB\n";

  for (const std::string& method : all_rows) {
    const auto& s = series[method];
    const auto [hr_med, hr_iqr] = median_iqr_of(s.at("hr_err"));
    const auto [br_med, br_iqr] = median_iqr_of(s.at("br_err"));
    const auto [hsdr_med, hsdr_iqr] = median_iqr_of(s.at("heart_sdr"));
    (void)hsdr_iqr;
    const auto [lsdr_med, lsdr_iqr] = median_iqr_of(s.at("lung_sdr"));
    (void)lsdr_iqr;

    std::vector<double> heart_impr(n_cases), lung_impr(n_cases);
    for (std::size_t i = 0; i < n_cases; ++i) {
      heart_impr[i] = s.at("heart_sdr")[i] - series["mixture"]["heart_sdr"][i];
      lung_impr[i] = s.at("lung_sdr")[i] - series["mixture"]["lung_sdr"][i];
    }

    double p_hr = std::numeric_limits<double>::quiet_NaN();
    double p_sdr = std::numeric_limits<double>::quiet_NaN();
    if (method != reference) {
      p_hr = p_or_nan(s.at("hr_err"), series[reference]["hr_err"]);
      p_sdr = p_or_nan(series[reference]["heart_sdr"], s.at("heart_sdr"));
    }
    const auto p_str = [n_cases](double p) {
      if (std::isnan(p)) return std::string(n_cases < 5 ? "insufficient-n" : "n/a");
      return fmt(p, "%.4g");
    };

    rep_csv << method << "," << fmt(hr_med, "%.12g") << "," << fmt(hr_iqr, "%.12g") << ","
            << fmt(hsdr_med, "%.12g") << "," << fmt(mean_of(heart_impr), "%.12g") << ","
            << fmt(std_of(heart_impr), "%.12g") << "," << fmt(br_med, "%.12g") << ","
            << fmt(br_iqr, "%.12g") << "," << fmt(lsdr_med, "%.12g") << ","
            << fmt(mean_of(lung_impr), "%.12g") << "," << fmt(std_of(lung_impr), "%.12g")
            << "," << p_str(p_hr) << "," << p_str(p_sdr) << "\n";

    char line[256];
    std::snprintf(line, sizeof line, "%-16s  %6.2f (%5.2f)        %6.2f (%5.2f)            "
                  "     %6.2f (%5.2f)        %6.2f (%5.2f)\n",
                  method.c_str(), hr_med, hr_iqr, mean_of(heart_impr), std_of(heart_impr),
                  br_med, br_iqr, mean_of(lung_impr), std_of(lung_impr));
    rep_txt << line;
  }
  if (n_cases < 5) {
    rep_txt << "note: Wilcoxon columns flagged insufficient-n (need >= 5 mixtures)\n";
  }

  write_config_snapshot(cfg.get(),
                        {{"command", "bench"}, {"data", opts.data},
                         {"methods", opts.methods}, {"mixtures", mixture_names}},
                        fs::path(opts.output) / "config.json");
  return 0;
}

// ---------------------------------------------------------------------
// inspect

struct InspectOpts {
  CommonOpts common;
  std::string run;
  std::string what = "masks";
  std::string format = "csv";
  std::string output;
  std::string input;  // spectrogram source
};

int cmd_inspect(const InspectOpts& opts) {
  const bool want_csv = opts.format == "csv" || opts.format == "both";
  const bool want_png = opts.format == "png" || opts.format == "both";
  if (!want_csv && !want_png) throw CliError(1, "--format must be csv, png or both");
  if (opts.what != "masks" && opts.what != "dictionary" && opts.what != "activations" &&
      opts.what != "cost" && opts.what != "spectrogram") {
    throw CliError(1, "--what must be masks, dictionary, activations, cost or spectrogram");
  }

  if (opts.what == "spectrogram") {
    if (opts.input.empty()) throw CliError(1, "--what spectrogram requires --in <wav>");
    ConfigPtr cfg = build_config(opts.common.config_file, opts.common.sets);
    AudioPtr audio = resample_audio(read_audio(opts.input).get(),
                                    cfg_num(cfg.get(), "audio.rate"));
    std::size_t rows = 0, cols = 0;
    check(hlsep_stft_magnitude(audio.get(), cfg.get(), &rows, &cols, nullptr, nullptr),
          "stft dims");
    std::vector<double> mag(rows * cols), hz(rows);
    check(hlsep_stft_magnitude(audio.get(), cfg.get(), &rows, &cols, mag.data(), hz.data()),
          "stft");
    const fs::path out = opts.output.empty() ? fs::path(opts.input).parent_path()
                                             : fs::path(opts.output);
    fs::create_directories(out);
    const std::string stem = fs::path(opts.input).stem().string();
    if (want_csv) write_spectrogram_csv(out / (stem + "_spectrogram.csv"), mag, hz, rows, cols);
    if (want_png) write_matrix_png(out / (stem + "_spectrogram.png"), mag, rows, cols);
    return 0;
  }

  const fs::path run(opts.run);
  if (opts.run.empty() || !fs::is_directory(run)) {
    throw CliError(2, "run directory not found: " + opts.run);
  }
  const fs::path out = opts.output.empty() ? run : fs::path(opts.output);
  fs::create_directories(out);

  if (opts.what == "cost") {
    if (!fs::exists(run / "cost_trace.csv")) {
      throw CliError(2, "no cost_trace.csv under " + opts.run);
    }
    std::ifstream in(run / "cost_trace.csv");
    std::string line, last;
    std::getline(in, line);  // header
    std::size_t iterations = 0;
    while (std::getline(in, line)) {
      if (!line.empty()) {
        last = line;
        ++iterations;
      }
    }
    std::cout << "iterations: " << (iterations ? iterations - 1 : 0) << "\n"
              << "final: " << last << "\n";
    return 0;
  }

  const Factors f = read_factors(run / "factors.bin");
  if (opts.what == "masks") {
    for (const auto& [name, values] : f.masks) {
      if (want_csv) write_matrix_csv(out / ("mask_" + name + ".csv"), values, f.bins, f.frames);
      if (want_png) write_matrix_png(out / ("mask_" + name + ".png"), values, f.bins, f.frames);
    }
  } else if (opts.what == "dictionary") {
    if (want_csv) write_matrix_csv(out / "dictionary.csv", f.dictionary, f.bins, f.components);
    if (want_png) write_matrix_png(out / "dictionary.png", f.dictionary, f.bins, f.components);
  } else if (opts.what == "activations") {
    if (want_csv) write_matrix_csv(out / "activations.csv", f.activations, f.components, f.frames);
    if (want_png) write_matrix_png(out / "activations.png", f.activations, f.components, f.frames);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hlsep - heart/lung sound separation toolkit"};
  app.require_subcommand(1);

  SeparateOpts sep;
  CLI::App* c_sep = app.add_subcommand("separate", "Separate a recording into stems");
  c_sep->add_option("--in", sep.input, "Input WAV")->required();
  c_sep->add_option("--out", sep.output, "Output directory")->required();
  c_sep->add_option("--heart-db", sep.heart_db, "Heart database directory or manifest");
  c_sep->add_option("--lung-db", sep.lung_db, "Lung database directory or manifest");
  c_sep->add_option("--method", sep.method,
                    "nmcf | supervised | semi_supervised | shah | cq");
  c_sep->add_option("--start", sep.start, "Segment start (s)");
  c_sep->add_option("--duration", sep.duration, "Segment duration (s)");
  c_sep->add_option("--seed", sep.seed, "Factorisation seed");
  c_sep->add_flag("--masks", sep.masks, "Also write soft masks as CSV");
  c_sep->add_flag("--png", sep.png, "Also write PNG heat maps with --masks");
  add_common(c_sep, &sep.common);

  SynthOpts syn;
  CLI::App* c_syn = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
  c_syn->add_option("--out", syn.output, "Output directory")->required();
  c_syn->add_option("--n", syn.count, "Number of mixtures");
  c_syn->add_option("--seed", syn.seed, "Dataset seed");
  c_syn->add_option("--db-items", syn.db_items, "Exemplars per database");
  c_syn->add_option("--preset", syn.preset, "Dataset preset (default)");
  add_common(c_syn, &syn.common);

  BenchOpts ben;
  CLI::App* c_ben = app.add_subcommand("bench", "Benchmark methods on a synthetic dataset");
  c_ben->add_option("--data", ben.data, "Dataset directory from `synth`")->required();
  c_ben->add_option("--out", ben.output, "Report directory")->required();
  c_ben->add_option("--methods", ben.methods, "Comma-separated method list");
  c_ben->add_option("--seed", ben.seed, "Factorisation seed");
  add_common(c_ben, &ben.common);

  InspectOpts ins;
  CLI::App* c_ins = app.add_subcommand("inspect", "Dump run artifacts as CSV/PNG");
  c_ins->add_option("--run", ins.run, "Run directory from `separate`");
  c_ins->add_option("--what", ins.what, "masks | dictionary | activations | cost | spectrogram");
  c_ins->add_option("--format", ins.format, "csv | png | both");
  c_ins->add_option("--out", ins.output, "Output directory (default: run directory)");
  c_ins->add_option("--in", ins.input, "Input WAV for --what spectrogram");
  add_common(c_ins, &ins.common);

  try {
    app.parse(argc, argv);
    if (*c_sep) return cmd_separate(sep);
    if (*c_syn) return cmd_synth(syn);
    if (*c_ben) return cmd_bench(ben);
    if (*c_ins) return cmd_inspect(ins);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
