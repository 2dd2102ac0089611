// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

namespace cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for_status(int status) {
  switch (status) {
    case HLSEP_OK:
      return 0;
    case HLSEP_E_ARG:
    case HLSEP_E_KEY:
      return 1;
    case HLSEP_E_NUMERIC:
      return 3;
    default:
      return 2;
  }
}

void check(int status, const std::string& context) {
  if (status != HLSEP_OK) {
    throw CliError(exit_code_for_status(status),
                   context + ": " + hlsep_status_name(status) + " (" + hlsep_last_error() + ")");
  }
}

AudioPtr read_audio(const fs::path& path) {
  hlsep_audio* a = nullptr;
  check(hlsep_audio_read_wav(path.string().c_str(), &a), "reading " + path.string());
  return AudioPtr(a);
}

AudioPtr resample_audio(const hlsep_audio* audio, double rate) {
  hlsep_audio* out = nullptr;
  check(hlsep_audio_resample(audio, rate, &out), "resampling");
  return AudioPtr(out);
}

std::vector<double> audio_samples(const hlsep_audio* audio) {
  std::vector<double> out(hlsep_audio_size(audio));
  hlsep_audio_copy(audio, out.data(), out.size());
  return out;
}

ConfigPtr build_config(const std::string& config_file,
                       const std::vector<std::string>& overrides) {
  hlsep_config* raw = nullptr;
  check(hlsep_config_create(&raw), "creating config");
  ConfigPtr cfg(raw);

  std::string file = config_file;
  if (file.empty()) {
    if (const char* env = std::getenv("HLSEP_CONFIG")) file = env;
  }
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in.good()) throw CliError(2, "cannot open config file: " + file);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw CliError(2, "malformed config file " + file + ": " + e.what());
    }
    const json& body = doc.contains("config") ? doc.at("config") : doc;
    for (const auto& [key, value] : body.items()) {
      if (hlsep_config_key_is_string(key.c_str())) {
        check(hlsep_config_set_str(cfg.get(), key.c_str(),
                                   value.get<std::string>().c_str()),
              "config key " + key);
      } else {
        check(hlsep_config_set(cfg.get(), key.c_str(), value.get<double>()),
              "config key " + key);
      }
    }
  }

  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw CliError(1, "--set expects key=value, got: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (hlsep_config_key_is_string(key.c_str())) {
      check(hlsep_config_set_str(cfg.get(), key.c_str(), value.c_str()), "--set " + key);
    } else {
      try {
        check(hlsep_config_set(cfg.get(), key.c_str(), std::stod(value)), "--set " + key);
      } catch (const std::invalid_argument&) {
        throw CliError(1, "--set " + key + ": not a number: " + value);
      }
    }
  }
  return cfg;
}

json config_to_json(const hlsep_config* cfg) {
  json out = json::object();
  for (std::size_t i = 0; i < hlsep_config_count(); ++i) {
    const char* key = hlsep_config_key(i);
    if (hlsep_config_key_is_string(key)) {
      char buf[128];
      check(hlsep_config_get_str(cfg, key, buf, sizeof buf), key);
      out[key] = std::string(buf);
    } else {
      double v = 0.0;
      check(hlsep_config_get(cfg, key, &v), key);
      out[key] = v;
    }
  }
  return out;
}

void write_config_snapshot(const hlsep_config* cfg, const json& meta, const fs::path& path) {
  json doc;
  doc["tool"] = "hlsep";
  doc["version"] = hlsep_version();
  doc["config"] = config_to_json(cfg);
  if (!meta.is_null()) doc["meta"] = meta;
  std::ofstream out(path);
  if (!out.good()) throw CliError(2, "cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

double cfg_num(const hlsep_config* cfg, const std::string& key) {
  double v = 0.0;
  check(hlsep_config_get(cfg, key.c_str(), &v), "config key " + key);
  return v;
}

std::string cfg_str(const hlsep_config* cfg, const std::string& key) {
  char buf[128];
  check(hlsep_config_get_str(cfg, key.c_str(), buf, sizeof buf), "config key " + key);
  return buf;
}

DbPtr load_db(const fs::path& path, double rate) {
  fs::path manifest;
  fs::path base;
  if (fs::is_directory(path)) {
    base = path;
    manifest = path / "manifest.json";
  } else {
    base = path.parent_path();
    manifest = path;
  }

  hlsep_db* raw = nullptr;
  check(hlsep_db_create(&raw), "creating database");
  DbPtr db(raw);

  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    if (!in.good()) throw CliError(2, "cannot open database manifest: " + manifest.string());
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw CliError(2, "malformed manifest " + manifest.string() + ": " + e.what());
    }
    if (!doc.contains("items") || !doc["items"].is_array()) {
      throw CliError(2, "manifest lacks an items array: " + manifest.string());
    }
    for (const json& item : doc["items"]) {
      const std::string rel = item.at("path").get<std::string>();
      const fs::path wav = base / rel;
      const double lambda = item.value("lambda", 1.0);
      const std::string label = item.value("label", fs::path(rel).stem().string());
      AudioPtr audio = read_audio(wav);
      AudioPtr at_rate = resample_audio(audio.get(), rate);
      check(hlsep_db_add(db.get(), at_rate.get(), lambda, label.c_str()),
            "adding " + wav.string());
    }
  } else if (fs::is_directory(path)) {
    // Bare directory of WAV files, unit weights.
    std::vector<fs::path> wavs;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.path().extension() == ".wav") wavs.push_back(entry.path());
    }
    std::sort(wavs.begin(), wavs.end());
    for (const fs::path& wav : wavs) {
      AudioPtr audio = read_audio(wav);
      AudioPtr at_rate = resample_audio(audio.get(), rate);
      check(hlsep_db_add(db.get(), at_rate.get(), 1.0, wav.stem().string().c_str()),
            "adding " + wav.string());
    }
  } else {
    throw CliError(2, "database manifest not found: " + manifest.string());
  }

  if (hlsep_db_size(db.get()) == 0) {
    throw CliError(2, "database is empty: " + path.string());
  }
  return db;
}

namespace {

void write_rows(std::ofstream& out, const std::vector<double>& data, std::size_t rows,
                std::size_t cols, const std::vector<double>* row_prefix) {
  char buf[40];
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_prefix) {
      std::snprintf(buf, sizeof buf, "%.12g", (*row_prefix)[r]);
      out << buf << (cols ? "," : "");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      std::snprintf(buf, sizeof buf, "%.12g", data[r * cols + c]);
      out << buf;
      if (c + 1 < cols) out << ",";
    }
    out << "\n";
  }
}

}  // namespace

void write_matrix_csv(const fs::path& path, const std::vector<double>& data,
                      std::size_t rows, std::size_t cols) {
  std::ofstream out(path);
  if (!out.good()) throw CliError(2, "cannot write " + path.string());
  write_rows(out, data, rows, cols, nullptr);
}

void write_spectrogram_csv(const fs::path& path, const std::vector<double>& data,
                           const std::vector<double>& bin_hz, std::size_t rows,
                           std::size_t cols) {
  std::ofstream out(path);
  if (!out.good()) throw CliError(2, "cannot write " + path.string());
  out << "bin_hz";
  for (std::size_t c = 0; c < cols; ++c) out << ",frame_" << c;
  out << "\n";
  write_rows(out, data, rows, cols, &bin_hz);
}

// ---------------------------------------------------------------------
// Minimal PNG writer: 8-bit grayscale, zlib stream with stored blocks.

namespace {

std::uint32_t crc32_update(std::uint32_t crc, const unsigned char* p, std::size_t n) {
  static std::uint32_t table[256];
  static bool init = false;
  if (!init) {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      table[i] = c;
    }
    init = true;
  }
  crc ^= 0xFFFFFFFFu;
  for (std::size_t i = 0; i < n; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

void put_be32(std::vector<unsigned char>& v, std::uint32_t x) {
  v.push_back(static_cast<unsigned char>((x >> 24) & 0xFF));
  v.push_back(static_cast<unsigned char>((x >> 16) & 0xFF));
  v.push_back(static_cast<unsigned char>((x >> 8) & 0xFF));
  v.push_back(static_cast<unsigned char>(x & 0xFF));
}

void append_chunk(std::vector<unsigned char>& png, const char type[4],
                  const std::vector<unsigned char>& body) {
  put_be32(png, static_cast<std::uint32_t>(body.size()));
  std::vector<unsigned char> typed(type, type + 4);
  typed.insert(typed.end(), body.begin(), body.end());
  png.insert(png.end(), typed.begin(), typed.end());
  put_be32(png, crc32_update(0, typed.data(), typed.size()));
}

}  // namespace

void write_matrix_png(const fs::path& path, const std::vector<double>& data,
                      std::size_t rows, std::size_t cols) {
  double lo = data.empty() ? 0.0 : data[0];
  double hi = lo;
  for (double v : data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo > 0 ? hi - lo : 1.0;

  // Raw scanlines: filter byte 0 + row pixels.
  std::vector<unsigned char> raw;
  raw.reserve(rows * (cols + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    raw.push_back(0);
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = (data[r * cols + c] - lo) / span;
      raw.push_back(static_cast<unsigned char>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5));
    }
  }

  // zlib: header + stored deflate blocks + adler32.
  std::vector<unsigned char> z;
  z.push_back(0x78);
  z.push_back(0x01);
  std::size_t off = 0;
  while (off < raw.size() || raw.empty()) {
    const std::size_t n = std::min<std::size_t>(65535, raw.size() - off);
    const bool final = off + n >= raw.size();
    z.push_back(final ? 1 : 0);
    z.push_back(static_cast<unsigned char>(n & 0xFF));
    z.push_back(static_cast<unsigned char>((n >> 8) & 0xFF));
    z.push_back(static_cast<unsigned char>(~n & 0xFF));
    z.push_back(static_cast<unsigned char>((~n >> 8) & 0xFF));
    z.insert(z.end(), raw.begin() + static_cast<std::ptrdiff_t>(off),
             raw.begin() + static_cast<std::ptrdiff_t>(off + n));
    off += n;
    if (final) break;
  }
  std::uint32_t a = 1, b = 0;
  for (unsigned char c : raw) {
    a = (a + c) % 65521;
    b = (b + a) % 65521;
  }
  put_be32(z, (b << 16) | a);

  std::vector<unsigned char> png = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  std::vector<unsigned char> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(cols));
  put_be32(ihdr, static_cast<std::uint32_t>(rows));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", z);
  append_chunk(png, "IEND", {});

  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw CliError(2, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
}

// ---------------------------------------------------------------------
// factors.bin

namespace {

constexpr char kFactorsMagic[4] = {'H', 'L', 'S', 'F'};
constexpr std::uint32_t kFactorsVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t x) {
  out.write(reinterpret_cast<const char*>(&x), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t x = 0;
  in.read(reinterpret_cast<char*>(&x), 4);
  return x;
}

void put_doubles(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::ifstream& in, std::size_t n) {
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  return v;
}

}  // namespace

void write_factors(const fs::path& path, const Factors& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw CliError(2, "cannot write " + path.string());
  out.write(kFactorsMagic, 4);
  put_u32(out, kFactorsVersion);
  put_u32(out, static_cast<std::uint32_t>(f.bins));
  put_u32(out, static_cast<std::uint32_t>(f.components));
  put_u32(out, static_cast<std::uint32_t>(f.frames));
  put_u32(out, static_cast<std::uint32_t>(f.blocks.size()));
  for (const auto& [name, count] : f.blocks) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(count));
  }
  put_doubles(out, f.dictionary);
  put_doubles(out, f.activations);
  put_u32(out, static_cast<std::uint32_t>(f.masks.size()));
  for (const auto& [name, values] : f.masks) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_doubles(out, values);
  }
  if (!out.good()) throw CliError(2, "write failed: " + path.string());
}

Factors read_factors(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw CliError(2, "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kFactorsMagic, 4) != 0) {
    throw CliError(2, "not a factors file: " + path.string());
  }
  if (get_u32(in) != kFactorsVersion) throw CliError(2, "unsupported factors version");
  Factors f;
  f.bins = get_u32(in);
  f.components = get_u32(in);
  f.frames = get_u32(in);
  const std::uint32_t n_blocks = get_u32(in);
  for (std::uint32_t i = 0; i < n_blocks; ++i) {
    const std::uint32_t len = get_u32(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const std::uint32_t count = get_u32(in);
    f.blocks.emplace_back(name, count);
  }
  f.dictionary = get_doubles(in, f.bins * f.components);
  f.activations = get_doubles(in, f.components * f.frames);
  const std::uint32_t n_masks = get_u32(in);
  for (std::uint32_t i = 0; i < n_masks; ++i) {
    const std::uint32_t len = get_u32(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    f.masks[name] = get_doubles(in, f.bins * f.frames);
  }
  if (!in.good()) throw CliError(2, "truncated factors file: " + path.string());
  return f;
}

Factors factors_from_result(const hlsep_result* res) {
  Factors f;
  std::size_t rows = 0, cols = 0;
  check(hlsep_result_dictionary(res, &rows, &cols, nullptr), "dictionary dims");
  f.bins = rows;
  f.components = cols;
  f.dictionary.resize(rows * cols);
  check(hlsep_result_dictionary(res, &rows, &cols, f.dictionary.data()), "dictionary");

  check(hlsep_result_activations(res, &rows, &cols, nullptr), "activation dims");
  f.frames = cols;
  f.activations.resize(rows * cols);
  check(hlsep_result_activations(res, &rows, &cols, f.activations.data()), "activations");

  for (std::size_t i = 0; i < hlsep_result_block_count(res); ++i) {
    char name[64];
    std::size_t count = 0;
    check(hlsep_result_block(res, i, name, sizeof name, &count), "block");
    f.blocks.emplace_back(name, count);
    std::vector<double> mask(f.bins * f.frames);
    check(hlsep_result_mask(res, name, &rows, &cols, mask.data()), "mask");
    f.masks[name] = std::move(mask);
  }
  return f;
}

std::vector<std::string> split_csv_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string item = value.substr(start, comma == std::string::npos
                                                     ? std::string::npos
                                                     : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace cli
