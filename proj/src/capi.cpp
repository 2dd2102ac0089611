// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "hlsep.h"

#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "audio.hpp"
#include "baselines.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "nmcf.hpp"
#include "spectral.hpp"
#include "synth.hpp"

namespace {

thread_local std::string g_last_error;

int set_error(hlsep::ErrorCode code, const std::string& message) {
  g_last_error = message;
  return static_cast<int>(code);
}

// Runs a C++ body and maps exceptions to status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return HLSEP_OK;
  } catch (const hlsep::Error& e) {
    return set_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return set_error(hlsep::ErrorCode::kNumeric, e.what());
  }
}

int arg_error(const std::string& message) {
  return set_error(hlsep::ErrorCode::kBadArgument, message);
}

void copy_matrix(const Eigen::MatrixXd& m, size_t* rows, size_t* cols, double* data) {
  if (rows) *rows = static_cast<size_t>(m.rows());
  if (cols) *cols = static_cast<size_t>(m.cols());
  if (data) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        data[static_cast<size_t>(r) * static_cast<size_t>(m.cols()) + static_cast<size_t>(c)] = m(r, c);
      }
    }
  }
}

}  // namespace

struct hlsep_audio {
  hlsep::AudioBuffer buf;
};

struct hlsep_db {
  hlsep::AudioDb db;
};

struct hlsep_result {
  hlsep::SeparationResult res;
  std::vector<std::string> stem_names;
};

struct hlsep_mix {
  hlsep::MixResult mix;
};

// ---------------------------------------------------------------------
// Configuration store

struct hlsep_config {
  std::map<std::string, double> numbers;
  std::map<std::string, std::string> strings;
};

namespace {

struct KeySpec {
  const char* name;
  bool is_string;
  double number_default;
  const char* string_default;
};

// Defaults mirror the reference pipeline settings.
const KeySpec kKeys[] = {
    {"audio.rate", false, 4000.0, nullptr},
    {"stft.window_length", false, 2048.0, nullptr},
    {"stft.overlap", false, 0.75, nullptr},
    {"stft.fft_length", false, 2048.0, nullptr},
    {"stft.window", true, 0.0, "hann"},
    {"nmf.beta", false, 1.0, nullptr},
    {"nmf.sparsity", false, 0.001, nullptr},
    {"nmf.max_iter", false, 500.0, nullptr},
    {"nmf.seed", false, 0.0, nullptr},
    {"nmf.floor", false, 1e-12, nullptr},
    {"nmf.tol", false, 0.0, nullptr},
    {"nmcf.heart_components", false, 20.0, nullptr},
    {"nmcf.lung_components", false, 20.0, nullptr},
    {"nmcf.noise_components", false, 10.0, nullptr},
    {"nmcf.noise_sparsity", false, 0.0, nullptr},
    {"method", true, 0.0, "nmcf"},
    {"baseline.shah_components", false, 20.0, nullptr},
    {"baseline.cq_components", false, 119.0, nullptr},
    {"baseline.cq_heart_components", false, 55.0, nullptr},
    {"baseline.rolloff_fraction", false, 0.85, nullptr},
    {"metrics.gate_halfwidth", false, 0.05, nullptr},
    {"metrics.min_breath_interval", false, 1.0, nullptr},
    {"synth.duration", false, 10.0, nullptr},
    {"synth.seed", false, 0.0, nullptr},
    {"synth.sample_rate", false, 4000.0, nullptr},
    {"synth.heart_bpm", false, 120.0, nullptr},
    {"synth.heart_amp", false, 1.0, nullptr},
    {"synth.heart_s1s2_spacing", false, 0.0, nullptr},
    {"synth.heart_decay", false, 0.06, nullptr},
    {"synth.heart_s1_freq", false, 90.0, nullptr},
    {"synth.heart_s2_freq", false, 110.0, nullptr},
    {"synth.lung_rate", false, 30.0, nullptr},
    {"synth.lung_amp", false, 1.0, nullptr},
    {"synth.lung_ie_ratio", false, 0.5, nullptr},
    {"synth.lung_center", false, 350.0, nullptr},
    {"synth.lung_bandwidth", false, 300.0, nullptr},
    {"synth.lung_depth", false, 0.9, nullptr},
    {"synth.noise_kind", true, 0.0, "white"},
    {"synth.snr_db", false, 0.0, nullptr},
};

const KeySpec* find_key(const char* key) {
  if (!key) return nullptr;
  for (const KeySpec& spec : kKeys) {
    if (std::strcmp(spec.name, key) == 0) return &spec;
  }
  return nullptr;
}

hlsep::StftConfig stft_config_from(const hlsep_config* cfg) {
  hlsep::StftConfig out;
  out.window_length = static_cast<int>(cfg->numbers.at("stft.window_length"));
  out.overlap = cfg->numbers.at("stft.overlap");
  out.fft_length = static_cast<int>(cfg->numbers.at("stft.fft_length"));
  out.window = hlsep::window_kind_from_name(cfg->strings.at("stft.window"));
  return out;
}

hlsep::NmfConfig nmf_config_from(const hlsep_config* cfg) {
  hlsep::NmfConfig out;
  out.beta = cfg->numbers.at("nmf.beta");
  out.sparsity = cfg->numbers.at("nmf.sparsity");
  out.max_iter = static_cast<int>(cfg->numbers.at("nmf.max_iter"));
  out.seed = static_cast<std::uint64_t>(cfg->numbers.at("nmf.seed"));
  out.floor = cfg->numbers.at("nmf.floor");
  out.tol = cfg->numbers.at("nmf.tol");
  return out;
}

hlsep::NmcfConfig nmcf_config_from(const hlsep_config* cfg) {
  hlsep::NmcfConfig out;
  out.nmf = nmf_config_from(cfg);
  out.heart_components = static_cast<int>(cfg->numbers.at("nmcf.heart_components"));
  out.lung_components = static_cast<int>(cfg->numbers.at("nmcf.lung_components"));
  out.noise_components = static_cast<int>(cfg->numbers.at("nmcf.noise_components"));
  out.noise_sparsity = cfg->numbers.at("nmcf.noise_sparsity");
  return out;
}

hlsep::BaselineConfig baseline_config_from(const hlsep_config* cfg) {
  hlsep::BaselineConfig out;
  out.nmf = nmf_config_from(cfg);
  out.shah_components = static_cast<int>(cfg->numbers.at("baseline.shah_components"));
  out.cq_components = static_cast<int>(cfg->numbers.at("baseline.cq_components"));
  out.cq_heart_components =
      static_cast<int>(cfg->numbers.at("baseline.cq_heart_components"));
  out.rolloff_fraction = cfg->numbers.at("baseline.rolloff_fraction");
  out.gate_halfwidth = cfg->numbers.at("metrics.gate_halfwidth");
  return out;
}

hlsep::MixSpec mix_spec_from(const hlsep_config* cfg) {
  hlsep::MixSpec spec;
  spec.duration = cfg->numbers.at("synth.duration");
  spec.sample_rate = cfg->numbers.at("synth.sample_rate");
  spec.seed = static_cast<std::uint64_t>(cfg->numbers.at("synth.seed"));
  spec.heart.rate_bpm = cfg->numbers.at("synth.heart_bpm");
  spec.heart.amplitude = cfg->numbers.at("synth.heart_amp");
  spec.heart.s1s2_spacing = cfg->numbers.at("synth.heart_s1s2_spacing");
  spec.heart.decay = cfg->numbers.at("synth.heart_decay");
  spec.heart.s1_freq = cfg->numbers.at("synth.heart_s1_freq");
  spec.heart.s2_freq = cfg->numbers.at("synth.heart_s2_freq");
  spec.lung.rate_bpm = cfg->numbers.at("synth.lung_rate");
  spec.lung.amplitude = cfg->numbers.at("synth.lung_amp");
  spec.lung.ie_ratio = cfg->numbers.at("synth.lung_ie_ratio");
  spec.lung.band_center = cfg->numbers.at("synth.lung_center");
  spec.lung.bandwidth = cfg->numbers.at("synth.lung_bandwidth");
  spec.lung.depth = cfg->numbers.at("synth.lung_depth");
  spec.noise.kind = hlsep::noise_kind_from_name(cfg->strings.at("synth.noise_kind"));
  spec.noise.snr_db = cfg->numbers.at("synth.snr_db");
  return spec;
}

hlsep::AudioDb db_or_empty(const hlsep_db* db) {
  return db ? db->db : hlsep::AudioDb{};
}

}  // namespace

extern "C" {

const char* hlsep_version(void) { return "0.1.0"; }

const char* hlsep_status_name(int status) {
  switch (status) {
    case HLSEP_OK: return "ok";
    case HLSEP_E_ARG: return "invalid argument";
    case HLSEP_E_FILE: return "file not found";
    case HLSEP_E_FORMAT: return "unsupported format";
    case HLSEP_E_EMPTY: return "empty audio";
    case HLSEP_E_RANGE: return "out of range";
    case HLSEP_E_SHAPE: return "shape mismatch";
    case HLSEP_E_EMPTY_DB: return "empty database";
    case HLSEP_E_DEGENERATE: return "degenerate input";
    case HLSEP_E_NUMERIC: return "numerical failure";
    case HLSEP_E_IO: return "write failure";
    case HLSEP_E_KEY: return "unknown key";
    default: return "unknown status";
  }
}

const char* hlsep_last_error(void) { return g_last_error.c_str(); }

/* ---------------- audio ---------------- */

int hlsep_audio_from_samples(const double* samples, size_t count, double sample_rate,
                             hlsep_audio** out) {
  if (!samples || !out || count == 0) return arg_error("null samples/out or zero count");
  return guarded([&] {
    auto* a = new hlsep_audio;
    a->buf.samples.assign(samples, samples + count);
    a->buf.sample_rate = sample_rate;
    hlsep::require(sample_rate > 0, hlsep::ErrorCode::kBadArgument,
                   "sample rate must be positive");
    *out = a;
  });
}

int hlsep_audio_read_wav(const char* path, hlsep_audio** out) {
  if (!path || !out) return arg_error("null path/out");
  return guarded([&] {
    auto* a = new hlsep_audio;
    try {
      a->buf = hlsep::read_wav(path);
    } catch (...) {
      delete a;
      throw;
    }
    *out = a;
  });
}

int hlsep_audio_write_wav(const hlsep_audio* audio, const char* path, uint64_t* clipped_out) {
  if (!audio || !path) return arg_error("null audio/path");
  return guarded([&] {
    const std::uint64_t clipped = hlsep::write_wav(audio->buf, path);
    if (clipped_out) *clipped_out = clipped;
  });
}

int hlsep_audio_resample(const hlsep_audio* audio, double target_rate, hlsep_audio** out) {
  if (!audio || !out) return arg_error("null audio/out");
  return guarded([&] {
    auto* a = new hlsep_audio;
    try {
      a->buf = hlsep::resample(audio->buf, target_rate);
    } catch (...) {
      delete a;
      throw;
    }
    *out = a;
  });
}

int hlsep_audio_segment(const hlsep_audio* audio, double start_s, double duration_s,
                        hlsep_audio** out) {
  if (!audio || !out) return arg_error("null audio/out");
  return guarded([&] {
    auto* a = new hlsep_audio;
    try {
      a->buf = hlsep::extract_segment(audio->buf, start_s, duration_s);
    } catch (...) {
      delete a;
      throw;
    }
    *out = a;
  });
}

size_t hlsep_audio_size(const hlsep_audio* audio) {
  return audio ? audio->buf.samples.size() : 0;
}

double hlsep_audio_rate(const hlsep_audio* audio) {
  return audio ? audio->buf.sample_rate : 0.0;
}

size_t hlsep_audio_copy(const hlsep_audio* audio, double* out, size_t capacity) {
  if (!audio || !out) return 0;
  const size_t n = std::min(capacity, audio->buf.samples.size());
  std::memcpy(out, audio->buf.samples.data(), n * sizeof(double));
  return n;
}

void hlsep_audio_free(hlsep_audio* audio) { delete audio; }

/* ---------------- config ---------------- */

int hlsep_config_create(hlsep_config** out) {
  if (!out) return arg_error("null out");
  auto* cfg = new hlsep_config;
  for (const KeySpec& spec : kKeys) {
    if (spec.is_string) {
      cfg->strings[spec.name] = spec.string_default;
    } else {
      cfg->numbers[spec.name] = spec.number_default;
    }
  }
  *out = cfg;
  return HLSEP_OK;
}

int hlsep_config_set(hlsep_config* cfg, const char* key, double value) {
  if (!cfg) return arg_error("null config");
  const KeySpec* spec = find_key(key);
  if (!spec || spec->is_string) {
    return set_error(hlsep::ErrorCode::kUnknownKey,
                     std::string("unknown numeric key '") + (key ? key : "") + "'");
  }
  cfg->numbers[spec->name] = value;
  return HLSEP_OK;
}

int hlsep_config_get(const hlsep_config* cfg, const char* key, double* value) {
  if (!cfg || !value) return arg_error("null config/value");
  const KeySpec* spec = find_key(key);
  if (!spec || spec->is_string) {
    return set_error(hlsep::ErrorCode::kUnknownKey,
                     std::string("unknown numeric key '") + (key ? key : "") + "'");
  }
  *value = cfg->numbers.at(spec->name);
  return HLSEP_OK;
}

int hlsep_config_set_str(hlsep_config* cfg, const char* key, const char* value) {
  if (!cfg || !value) return arg_error("null config/value");
  const KeySpec* spec = find_key(key);
  if (!spec || !spec->is_string) {
    return set_error(hlsep::ErrorCode::kUnknownKey,
                     std::string("unknown string key '") + (key ? key : "") + "'");
  }
  return guarded([&] {
    // validate enumerations eagerly
    if (std::strcmp(spec->name, "stft.window") == 0) hlsep::window_kind_from_name(value);
    if (std::strcmp(spec->name, "synth.noise_kind") == 0) hlsep::noise_kind_from_name(value);
    if (std::strcmp(spec->name, "method") == 0) {
      const std::string v = value;
      hlsep::require(v == "nmcf" || v == "supervised" || v == "semi_supervised" ||
                         v == "shah" || v == "cq",
                     hlsep::ErrorCode::kUnknownKey, "unknown method '" + v + "'");
    }
    cfg->strings[spec->name] = value;
  });
}

int hlsep_config_get_str(const hlsep_config* cfg, const char* key, char* buffer,
                         size_t capacity) {
  if (!cfg || !buffer || capacity == 0) return arg_error("null config/buffer");
  const KeySpec* spec = find_key(key);
  if (!spec || !spec->is_string) {
    return set_error(hlsep::ErrorCode::kUnknownKey,
                     std::string("unknown string key '") + (key ? key : "") + "'");
  }
  const std::string& v = cfg->strings.at(spec->name);
  if (v.size() + 1 > capacity) return arg_error("buffer too small");
  std::memcpy(buffer, v.c_str(), v.size() + 1);
  return HLSEP_OK;
}

size_t hlsep_config_count(void) { return sizeof(kKeys) / sizeof(kKeys[0]); }

const char* hlsep_config_key(size_t index) {
  if (index >= hlsep_config_count()) return nullptr;
  return kKeys[index].name;
}

int hlsep_config_key_is_string(const char* key) {
  const KeySpec* spec = find_key(key);
  return spec && spec->is_string ? 1 : 0;
}

void hlsep_config_free(hlsep_config* cfg) { delete cfg; }

/* ---------------- databases ---------------- */

int hlsep_db_create(hlsep_db** out) {
  if (!out) return arg_error("null out");
  *out = new hlsep_db;
  return HLSEP_OK;
}

int hlsep_db_add(hlsep_db* db, const hlsep_audio* audio, double lambda, const char* label) {
  if (!db || !audio) return arg_error("null db/audio");
  return guarded([&] {
    hlsep::require(lambda >= 0.0 && lambda <= 1.0, hlsep::ErrorCode::kBadArgument,
                   "lambda must lie in [0, 1]");
    hlsep::AudioExemplar item;
    item.audio = audio->buf;
    item.lambda = lambda;
    item.label = label ? label : "";
    db->db.items.push_back(std::move(item));
  });
}

size_t hlsep_db_size(const hlsep_db* db) { return db ? db->db.items.size() : 0; }

void hlsep_db_free(hlsep_db* db) { delete db; }

/* ---------------- separation ---------------- */

int hlsep_separate(const hlsep_audio* mixture, const hlsep_db* heart_db,
                   const hlsep_db* lung_db, const hlsep_config* cfg, hlsep_result** out) {
  if (!mixture || !cfg || !out) return arg_error("null mixture/config/out");
  return guarded([&] {
    const hlsep::StftConfig stft_cfg = stft_config_from(cfg);
    const std::string method = cfg->strings.at("method");
    hlsep::SeparationResult res;
    if (method == "shah") {
      res = hlsep::shah_separate(mixture->buf, baseline_config_from(cfg), stft_cfg);
    } else if (method == "cq") {
      res = hlsep::cq_separate(mixture->buf, db_or_empty(heart_db),
                               baseline_config_from(cfg), stft_cfg);
    } else {
      hlsep::NmcfConfig ncfg = nmcf_config_from(cfg);
      if (method == "supervised") {
        ncfg.mode = hlsep::NmcfMode::kSupervised;
      } else if (method == "semi_supervised") {
        ncfg.mode = hlsep::NmcfMode::kSemiSupervised;
      } else {
        ncfg.mode = hlsep::NmcfMode::kCofactorise;
      }
      res = hlsep::separate(mixture->buf, db_or_empty(heart_db), db_or_empty(lung_db),
                            ncfg, stft_cfg);
    }
    auto* r = new hlsep_result;
    r->res = std::move(res);
    for (const auto& [name, stem] : r->res.stems) {
      (void)stem;
      r->stem_names.push_back(name);
    }
    *out = r;
  });
}

size_t hlsep_result_stem_count(const hlsep_result* res) {
  return res ? res->stem_names.size() : 0;
}

const char* hlsep_result_stem_name(const hlsep_result* res, size_t index) {
  if (!res || index >= res->stem_names.size()) return nullptr;
  return res->stem_names[index].c_str();
}

int hlsep_result_stem(const hlsep_result* res, const char* name, hlsep_audio** out) {
  if (!res || !name || !out) return arg_error("null result/name/out");
  const auto it = res->res.stems.find(name);
  if (it == res->res.stems.end()) {
    return set_error(hlsep::ErrorCode::kBadArgument,
                     std::string("no stem named '") + name + "'");
  }
  auto* a = new hlsep_audio;
  a->buf = it->second;
  *out = a;
  return HLSEP_OK;
}

int hlsep_result_mask(const hlsep_result* res, const char* name, size_t* rows, size_t* cols,
                      double* data) {
  if (!res || !name) return arg_error("null result/name");
  const auto it = res->res.masks.find(name);
  if (it == res->res.masks.end()) {
    return set_error(hlsep::ErrorCode::kBadArgument,
                     std::string("no mask named '") + name + "'");
  }
  copy_matrix(it->second.values, rows, cols, data);
  return HLSEP_OK;
}

int hlsep_result_dictionary(const hlsep_result* res, size_t* rows, size_t* cols,
                            double* data) {
  if (!res) return arg_error("null result");
  copy_matrix(res->res.dictionary.m, rows, cols, data);
  return HLSEP_OK;
}

int hlsep_result_activations(const hlsep_result* res, size_t* rows, size_t* cols,
                             double* data) {
  if (!res) return arg_error("null result");
  copy_matrix(res->res.mixture_activations.m, rows, cols, data);
  return HLSEP_OK;
}

size_t hlsep_result_block_count(const hlsep_result* res) {
  return res ? res->res.dictionary.blocks.size() : 0;
}

int hlsep_result_block(const hlsep_result* res, size_t index, char* name_buffer,
                       size_t capacity, size_t* component_count) {
  if (!res) return arg_error("null result");
  if (index >= res->res.dictionary.blocks.size()) return arg_error("block index out of range");
  const hlsep::Block& b = res->res.dictionary.blocks[index];
  if (name_buffer) {
    if (b.name.size() + 1 > capacity) return arg_error("buffer too small");
    std::memcpy(name_buffer, b.name.c_str(), b.name.size() + 1);
  }
  if (component_count) *component_count = static_cast<size_t>(b.count);
  return HLSEP_OK;
}

int hlsep_result_trace(const hlsep_result* res, size_t* count, double* total,
                       double* divergence, double* sparsity, double* exemplar_divergence,
                       double* exemplar_sparsity) {
  if (!res) return arg_error("null result");
  const auto& trace = res->res.trace;
  if (count) *count = trace.size();
  for (size_t i = 0; i < trace.size(); ++i) {
    if (total) total[i] = trace[i].total;
    if (divergence) divergence[i] = trace[i].divergence;
    if (sparsity) sparsity[i] = trace[i].sparsity;
    if (exemplar_divergence) exemplar_divergence[i] = trace[i].exemplar_divergence;
    if (exemplar_sparsity) exemplar_sparsity[i] = trace[i].exemplar_sparsity;
  }
  return HLSEP_OK;
}

void hlsep_result_free(hlsep_result* res) { delete res; }

/* ---------------- analysis ---------------- */

int hlsep_stft_magnitude(const hlsep_audio* audio, const hlsep_config* cfg, size_t* rows,
                         size_t* cols, double* magnitude, double* bin_hz) {
  if (!audio || !cfg) return arg_error("null audio/config");
  return guarded([&] {
    const hlsep::StftConfig stft_cfg = stft_config_from(cfg);
    const hlsep::Spectrogram spec = hlsep::stft(audio->buf, stft_cfg);
    copy_matrix(spec.magnitude, rows, cols, magnitude);
    if (bin_hz) {
      const double step = audio->buf.sample_rate / stft_cfg.fft_length;
      for (Eigen::Index k = 0; k < spec.magnitude.rows(); ++k) {
        bin_hz[k] = k * step;
      }
    }
  });
}

/* ---------------- metrics ---------------- */

namespace {

int rate_common(const hlsep_audio* stem, bool heart, double* rate_b10s, int* low_confidence,
                double* event_times, size_t capacity, size_t* event_count) {
  if (!stem || !rate_b10s) return arg_error("null stem/rate");
  return guarded([&] {
    const hlsep::RateEstimate est =
        heart ? hlsep::heart_rate(stem->buf) : hlsep::breathing_rate(stem->buf);
    *rate_b10s = est.rate;
    if (low_confidence) *low_confidence = est.low_confidence ? 1 : 0;
    if (event_count) *event_count = est.event_times.size();
    if (event_times) {
      const size_t n = std::min(capacity, est.event_times.size());
      std::memcpy(event_times, est.event_times.data(), n * sizeof(double));
    }
  });
}

}  // namespace

int hlsep_heart_rate(const hlsep_audio* stem, double* rate_b10s, int* low_confidence,
                     double* event_times, size_t capacity, size_t* event_count) {
  return rate_common(stem, true, rate_b10s, low_confidence, event_times, capacity,
                     event_count);
}

int hlsep_breathing_rate(const hlsep_audio* stem, double* rate_b10s, int* low_confidence,
                         double* event_times, size_t capacity, size_t* event_count) {
  return rate_common(stem, false, rate_b10s, low_confidence, event_times, capacity,
                     event_count);
}

int hlsep_sdr(const hlsep_audio* estimate, const hlsep_audio* reference, double* db) {
  if (!estimate || !reference || !db) return arg_error("null estimate/reference/db");
  return guarded([&] { *db = hlsep::sdr(estimate->buf, reference->buf); });
}

int hlsep_sir(const hlsep_audio* estimate, const hlsep_audio* reference,
              const hlsep_audio* const* interferers, size_t interferer_count, double* db) {
  if (!estimate || !reference || !db || (!interferers && interferer_count > 0)) {
    return arg_error("null estimate/reference/db/interferers");
  }
  return guarded([&] {
    std::vector<hlsep::AudioBuffer> ibufs;
    ibufs.reserve(interferer_count);
    for (size_t i = 0; i < interferer_count; ++i) {
      hlsep::require(interferers[i] != nullptr, hlsep::ErrorCode::kBadArgument,
                     "null interferer");
      ibufs.push_back(interferers[i]->buf);
    }
    *db = hlsep::sir(estimate->buf, reference->buf, ibufs);
  });
}

int hlsep_wilcoxon(const double* a, const double* b, size_t count, double* p) {
  if (!a || !b || !p) return arg_error("null a/b/p");
  return guarded([&] {
    const std::vector<double> va(a, a + count);
    const std::vector<double> vb(b, b + count);
    *p = hlsep::wilcoxon_one_sided(va, vb);
  });
}

int hlsep_median_iqr(const double* values, size_t count, double* median, double* iqr) {
  if (!values || count == 0) return arg_error("null/empty values");
  return guarded([&] {
    hlsep::median_iqr(std::vector<double>(values, values + count), median, iqr);
  });
}

/* ---------------- synthetic mixtures ---------------- */

int hlsep_synth(const hlsep_config* cfg, hlsep_mix** out) {
  if (!cfg || !out) return arg_error("null config/out");
  return guarded([&] {
    auto* m = new hlsep_mix;
    try {
      m->mix = hlsep::make_mix(mix_spec_from(cfg));
    } catch (...) {
      delete m;
      throw;
    }
    *out = m;
  });
}

int hlsep_mix_audio(const hlsep_mix* mix, const char* name, hlsep_audio** out) {
  if (!mix || !name || !out) return arg_error("null mix/name/out");
  const std::string n = name;
  const hlsep::AudioBuffer* buf = nullptr;
  if (n == "mixture") buf = &mix->mix.mixture;
  else if (n == "heart") buf = &mix->mix.heart;
  else if (n == "lung") buf = &mix->mix.lung;
  else if (n == "noise") buf = &mix->mix.noise;
  if (!buf) {
    return set_error(hlsep::ErrorCode::kBadArgument, "unknown mix stem '" + n + "'");
  }
  auto* a = new hlsep_audio;
  a->buf = *buf;
  *out = a;
  return HLSEP_OK;
}

int hlsep_mix_events(const hlsep_mix* mix, const char* kind, double* out, size_t capacity,
                     size_t* count) {
  if (!mix || !kind) return arg_error("null mix/kind");
  const std::string k = kind;
  const std::vector<double>* events = nullptr;
  if (k == "beats") events = &mix->mix.beat_times;
  else if (k == "breaths") events = &mix->mix.breath_times;
  if (!events) {
    return set_error(hlsep::ErrorCode::kBadArgument, "unknown event kind '" + k + "'");
  }
  if (count) *count = events->size();
  if (out) {
    const size_t n = std::min(capacity, events->size());
    std::memcpy(out, events->data(), n * sizeof(double));
  }
  return HLSEP_OK;
}

int hlsep_mix_rate(const hlsep_mix* mix, const char* kind, double* rate_b10s) {
  if (!mix || !kind || !rate_b10s) return arg_error("null mix/kind/rate");
  const std::string k = kind;
  if (k == "heart") {
    *rate_b10s = mix->mix.heart_rate_b10s;
  } else if (k == "lung") {
    *rate_b10s = mix->mix.breath_rate_b10s;
  } else {
    return set_error(hlsep::ErrorCode::kBadArgument, "unknown rate kind '" + k + "'");
  }
  return HLSEP_OK;
}

int hlsep_mix_noise_gain(const hlsep_mix* mix, double* gain) {
  if (!mix || !gain) return arg_error("null mix/gain");
  *gain = mix->mix.noise_gain;
  return HLSEP_OK;
}

void hlsep_mix_free(hlsep_mix* mix) { delete mix; }

}  // extern "C"
