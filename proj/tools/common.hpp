// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_TOOLS_COMMON_HPP
#define HLSEP_TOOLS_COMMON_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlsep.h"

namespace cli {

// Exit-code taxonomy: 1 usage, 2 data, 3 numerical failure.
struct CliError : std::runtime_error {
  CliError(int code, const std::string& message) : std::runtime_error(message), exit_code(code) {}
  int exit_code;
};

int exit_code_for_status(int status);

// Throws CliError unless the C API call succeeded.
void check(int status, const std::string& context);

// RAII wrappers over the C handles.
struct AudioDeleter { void operator()(hlsep_audio* a) const { hlsep_audio_free(a); } };
struct ConfigDeleter { void operator()(hlsep_config* c) const { hlsep_config_free(c); } };
struct DbDeleter { void operator()(hlsep_db* d) const { hlsep_db_free(d); } };
struct ResultDeleter { void operator()(hlsep_result* r) const { hlsep_result_free(r); } };
struct MixDeleter { void operator()(hlsep_mix* m) const { hlsep_mix_free(m); } };

using AudioPtr = std::unique_ptr<hlsep_audio, AudioDeleter>;
using ConfigPtr = std::unique_ptr<hlsep_config, ConfigDeleter>;
using DbPtr = std::unique_ptr<hlsep_db, DbDeleter>;
using ResultPtr = std::unique_ptr<hlsep_result, ResultDeleter>;
using MixPtr = std::unique_ptr<hlsep_mix, MixDeleter>;

AudioPtr read_audio(const std::filesystem::path& path);
AudioPtr resample_audio(const hlsep_audio* audio, double rate);
std::vector<double> audio_samples(const hlsep_audio* audio);

// Effective configuration: defaults, then the JSON file (--config or the
// HLSEP_CONFIG environment variable), then --set overrides.
ConfigPtr build_config(const std::string& config_file,
                       const std::vector<std::string>& overrides);
nlohmann::json config_to_json(const hlsep_config* cfg);
void write_config_snapshot(const hlsep_config* cfg, const nlohmann::json& meta,
                           const std::filesystem::path& path);

double cfg_num(const hlsep_config* cfg, const std::string& key);
std::string cfg_str(const hlsep_config* cfg, const std::string& key);

// Exemplar database manifest: either a directory holding WAV files
// (lambda 1.0) or manifest.json, or a manifest path itself. Entries are
// resampled to `rate`.
DbPtr load_db(const std::filesystem::path& path, double rate);

// Matrix CSV, "%.12g" cells. The spectrogram variant prefixes each row
// with its bin frequency and emits a header line.
void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& data,
                      std::size_t rows, std::size_t cols);
void write_spectrogram_csv(const std::filesystem::path& path, const std::vector<double>& data,
                           const std::vector<double>& bin_hz, std::size_t rows,
                           std::size_t cols);

// 8-bit grayscale PNG, values min-max scaled.
void write_matrix_png(const std::filesystem::path& path, const std::vector<double>& data,
                      std::size_t rows, std::size_t cols);

// Factor container written next to the stems by `separate` and unpacked
// by `inspect`: dictionary, activations, block table and the soft masks.
struct Factors {
  std::size_t bins = 0;
  std::size_t components = 0;
  std::size_t frames = 0;
  std::vector<std::pair<std::string, std::size_t>> blocks;
  std::vector<double> dictionary;   // bins x components, row-major
  std::vector<double> activations;  // components x frames, row-major
  std::map<std::string, std::vector<double>> masks;  // bins x frames each
};

void write_factors(const std::filesystem::path& path, const Factors& f);
Factors read_factors(const std::filesystem::path& path);
Factors factors_from_result(const hlsep_result* res);

std::vector<std::string> split_csv_list(const std::string& value);

}  // namespace cli

#endif  // HLSEP_TOOLS_COMMON_HPP
