// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_AUDIO_HPP
#define HLSEP_AUDIO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace hlsep {

// Mono audio. Samples are dimensionless amplitudes, nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  double sample_rate = 0.0;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// Reads a RIFF/WAVE file. Supported encodings: PCM 8/16/24/32-bit integer
// and IEEE float 32/64-bit, any channel count (channels are averaged to
// mono). Missing file, unsupported encoding and zero-length audio raise
// distinct error codes.
AudioBuffer read_wav(const std::string& path);

// Writes 16-bit PCM mono at the buffer's rate. Samples outside [-1, 1]
// saturate; the return value counts clipped samples.
std::uint64_t write_wav(const AudioBuffer& buf, const std::string& path);

// Sample-rate conversion with a Kaiser windowed-sinc kernel (cutoff at
// 0.45x the smaller of the two rates, stopband >= 60 dB down before
// decimation). Equal rates return the input unchanged.
AudioBuffer resample(const AudioBuffer& buf, double target_rate);

// Copies round(duration * rate) samples starting at round(start * rate).
AudioBuffer extract_segment(const AudioBuffer& buf, double start_s, double duration_s);

}  // namespace hlsep

#endif  // HLSEP_AUDIO_HPP
