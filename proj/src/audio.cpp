// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "error.hpp"
#include "fir.hpp"

namespace hlsep {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& v, std::uint32_t x) {
  v.push_back(static_cast<unsigned char>(x & 0xFF));
  v.push_back(static_cast<unsigned char>((x >> 8) & 0xFF));
  v.push_back(static_cast<unsigned char>((x >> 16) & 0xFF));
  v.push_back(static_cast<unsigned char>((x >> 24) & 0xFF));
}

void put_u16(std::vector<unsigned char>& v, std::uint16_t x) {
  v.push_back(static_cast<unsigned char>(x & 0xFF));
  v.push_back(static_cast<unsigned char>((x >> 8) & 0xFF));
}

double decode_sample(const unsigned char* p, int bits, int format) {
  if (format == 3) {  // IEEE float
    if (bits == 32) {
      float f;
      std::memcpy(&f, p, 4);
      return static_cast<double>(f);
    }
    double d;
    std::memcpy(&d, p, 8);
    return d;
  }
  switch (bits) {
    case 8:
      // 8-bit WAV is unsigned.
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      std::int16_t s;
      std::memcpy(&s, p, 2);
      return s / 32768.0;
    }
    case 24: {
      std::int32_t s = static_cast<std::int32_t>(p[0]) | (static_cast<std::int32_t>(p[1]) << 8) |
                       (static_cast<std::int32_t>(p[2]) << 16);
      if (s & 0x800000) s |= ~0xFFFFFF;  // sign extend
      return s / 8388608.0;
    }
    case 32: {
      std::int32_t s;
      std::memcpy(&s, p, 4);
      return s / 2147483648.0;
    }
    default:
      fail(ErrorCode::kBadFormat, "unsupported PCM bit depth " + std::to_string(bits));
  }
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kFileNotFound, "cannot open WAV file: " + path);

  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  require(bytes.size() >= 44, ErrorCode::kBadFormat, "file too short for RIFF/WAVE: " + path);
  require(std::memcmp(bytes.data(), "RIFF", 4) == 0 && std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          ErrorCode::kBadFormat, "not a RIFF/WAVE file: " + path);

  int format = 0;
  int channels = 0;
  int bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t len = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0 && body + 16 <= bytes.size()) {
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == 0xFFFE && len >= 40 && body + 26 <= bytes.size()) {
        // WAVE_FORMAT_EXTENSIBLE: first two bytes of the SubFormat GUID
        // carry the effective format tag.
        format = read_u16(bytes.data() + body + 24);
      }
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = std::min<std::size_t>(len, bytes.size() - body);
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  require(format != 0 && channels > 0 && rate > 0, ErrorCode::kBadFormat,
          "missing or malformed fmt chunk: " + path);
  require(format == 1 || format == 3, ErrorCode::kBadFormat,
          "unsupported WAV format tag " + std::to_string(format));
  if (format == 3) {
    require(bits == 32 || bits == 64, ErrorCode::kBadFormat,
            "unsupported float bit depth " + std::to_string(bits));
  } else {
    require(bits == 8 || bits == 16 || bits == 24 || bits == 32, ErrorCode::kBadFormat,
            "unsupported PCM bit depth " + std::to_string(bits));
  }

  const std::size_t bytes_per_sample = static_cast<std::size_t>(bits) / 8;
  const std::size_t frame_size = bytes_per_sample * static_cast<std::size_t>(channels);
  const std::size_t frames = frame_size ? data_len / frame_size : 0;
  require(frames > 0, ErrorCode::kEmptyAudio, "WAV file holds no audio: " + path);

  AudioBuffer out;
  out.sample_rate = static_cast<double>(rate);
  out.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const unsigned char* p = bytes.data() + data_off + f * frame_size;
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      acc += decode_sample(p + static_cast<std::size_t>(c) * bytes_per_sample, bits, format);
    }
    out.samples[f] = acc / channels;
  }
  return out;
}

std::uint64_t write_wav(const AudioBuffer& buf, const std::string& path) {
  require(buf.sample_rate > 0, ErrorCode::kBadArgument, "buffer has no sample rate");
  require(!buf.samples.empty(), ErrorCode::kEmptyAudio, "refusing to write empty buffer");

  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(buf.sample_rate));
  const std::uint32_t n = static_cast<std::uint32_t>(buf.samples.size());
  const std::uint32_t data_len = n * 2;

  std::vector<unsigned char> bytes;
  bytes.reserve(44 + data_len);
  const char* riff = "RIFF";
  const char* wave = "WAVEfmt ";
  bytes.insert(bytes.end(), riff, riff + 4);
  put_u32(bytes, 36 + data_len);
  bytes.insert(bytes.end(), wave, wave + 8);
  put_u32(bytes, 16);       // fmt chunk size
  put_u16(bytes, 1);        // PCM
  put_u16(bytes, 1);        // mono
  put_u32(bytes, rate);
  put_u32(bytes, rate * 2); // byte rate
  put_u16(bytes, 2);        // block align
  put_u16(bytes, 16);       // bits
  const char* data = "data";
  bytes.insert(bytes.end(), data, data + 4);
  put_u32(bytes, data_len);

  std::uint64_t clipped = 0;
  for (double x : buf.samples) {
    double v = x;
    if (v > 1.0) {
      v = 1.0;
      ++clipped;
    } else if (v < -1.0) {
      v = -1.0;
      ++clipped;
    }
    // Scale by 2^15 and saturate the positive rail; keeps the read/write
    // round-trip error within one LSB (2^-15).
    long q = std::lround(v * 32768.0);
    q = std::clamp<long>(q, -32768, 32767);
    const std::int16_t s = static_cast<std::int16_t>(q);
    bytes.push_back(static_cast<unsigned char>(s & 0xFF));
    bytes.push_back(static_cast<unsigned char>((s >> 8) & 0xFF));
  }

  std::ofstream outf(path, std::ios::binary);
  require(outf.good(), ErrorCode::kIo, "cannot open for writing: " + path);
  outf.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  require(outf.good(), ErrorCode::kIo, "write failed: " + path);
  return clipped;
}

AudioBuffer resample(const AudioBuffer& buf, double target_rate) {
  require(target_rate > 0, ErrorCode::kBadArgument, "target rate must be positive");
  require(buf.sample_rate > 0, ErrorCode::kBadArgument, "buffer has no sample rate");
  if (buf.sample_rate == target_rate) return buf;
  require(!buf.samples.empty(), ErrorCode::kEmptyAudio, "cannot resample empty buffer");

  const double in_rate = buf.sample_rate;
  const double band = std::min(in_rate, target_rate);
  const double cutoff = 0.45 * band;
  const double transition = 0.05 * band;
  const double atten_db = 70.0;  // comfortably above the 60 dB contract

  // Kernel sized like design_lowpass so the stopband spec carries over.
  const double beta = 0.1102 * (atten_db - 8.7);
  const double delta_omega = 2.0 * kPi * transition / in_rate;
  int half = static_cast<int>(std::ceil((atten_db - 7.95) / (2.285 * delta_omega) / 2.0)) + 1;
  half = std::max(half, 8);
  const double i0_beta = bessel_i0(beta);
  const double fc = cutoff / in_rate;

  const std::size_t n_in = buf.samples.size();
  const std::size_t n_out =
      static_cast<std::size_t>(std::llround(static_cast<double>(n_in) * target_rate / in_rate));

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(std::max<std::size_t>(n_out, 1), 0.0);

  const double step = in_rate / target_rate;  // input samples per output sample
  for (std::size_t j = 0; j < out.samples.size(); ++j) {
    const double center = static_cast<double>(j) * step;
    const std::ptrdiff_t m_lo =
        std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(center)) - half);
    const std::ptrdiff_t m_hi = std::min<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(n_in) - 1,
        static_cast<std::ptrdiff_t>(std::floor(center)) + half);
    double acc = 0.0;
    for (std::ptrdiff_t m = m_lo; m <= m_hi; ++m) {
      const double t = static_cast<double>(m) - center;
      const double r = t / half;
      if (r <= -1.0 || r >= 1.0) continue;
      const double w = bessel_i0(beta * std::sqrt(1.0 - r * r)) / i0_beta;
      double k;
      if (std::abs(t) < 1e-12) {
        k = 2.0 * fc;
      } else {
        k = std::sin(2.0 * kPi * fc * t) / (kPi * t);
      }
      acc += buf.samples[static_cast<std::size_t>(m)] * k * w;
    }
    out.samples[j] = acc;
  }
  return out;
}

AudioBuffer extract_segment(const AudioBuffer& buf, double start_s, double duration_s) {
  require(buf.sample_rate > 0, ErrorCode::kBadArgument, "buffer has no sample rate");
  require(start_s >= 0 && duration_s >= 0, ErrorCode::kOutOfRange,
          "segment start/duration must be non-negative");
  const std::size_t begin =
      static_cast<std::size_t>(std::llround(start_s * buf.sample_rate));
  const std::size_t count =
      static_cast<std::size_t>(std::llround(duration_s * buf.sample_rate));
  require(begin <= buf.samples.size() && count <= buf.samples.size() - begin,
          ErrorCode::kOutOfRange, "segment window exceeds buffer");

  AudioBuffer out;
  out.sample_rate = buf.sample_rate;
  out.samples.assign(buf.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     buf.samples.begin() + static_cast<std::ptrdiff_t>(begin + count));
  return out;
}

}  // namespace hlsep
