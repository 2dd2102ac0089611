// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_SYNTH_HPP
#define HLSEP_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "audio.hpp"

namespace hlsep {

// Deterministic chest-sound stand-ins with exact ground truth. Heart
// pulses sit in the 50-250 Hz band, lung noise around 350 Hz, matching
// the neonatal band conventions used by the separators.

struct HeartSpec {
  double rate_bpm = 120.0;     // 70-220
  double amplitude = 1.0;
  double s1s2_spacing = 0.0;   // seconds; <= 0 picks 0.33 of the beat period
  double decay = 0.06;         // seconds, pulse e-folding time
  double s1_freq = 90.0;       // Hz
  double s2_freq = 110.0;      // Hz
};

struct LungSpec {
  double rate_bpm = 30.0;      // breaths per minute, > 0
  double amplitude = 1.0;
  double ie_ratio = 0.5;       // inspiration/expiration duration ratio
  double band_center = 350.0;  // Hz
  double bandwidth = 300.0;    // Hz
  double depth = 0.9;          // breath-cycle modulation depth in [0, 1]
};

enum class NoiseKind { kNone, kWhite, kBabble, kBursts };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kWhite;
  double snr_db = 0.0;  // heart+lung power over noise power
};

struct MixSpec {
  HeartSpec heart;
  LungSpec lung;
  NoiseSpec noise;
  double duration = 10.0;      // seconds
  double sample_rate = 4000.0;
  std::uint64_t seed = 0;
};

NoiseKind noise_kind_from_name(const std::string& name);
std::string noise_kind_name(NoiseKind kind);

struct GenResult {
  AudioBuffer audio;
  std::vector<double> event_times;  // S1 onsets / breath-cycle starts
};

// Periodic S1/S2 damped-tone pulse pairs (S2 at 0.6 relative amplitude,
// mild seeded per-beat gain jitter).
GenResult gen_heart(const MixSpec& spec);

// Band noise amplitude-modulated by an inspiration/expiration cycle.
GenResult gen_lung(const MixSpec& spec);

// Unscaled interference for the configured kind.
AudioBuffer gen_noise(const MixSpec& spec);

struct MixResult {
  AudioBuffer mixture;
  AudioBuffer heart;
  AudioBuffer lung;
  AudioBuffer noise;  // already scaled to the requested SNR
  std::vector<double> beat_times;
  std::vector<double> breath_times;
  double heart_rate_b10s = 0.0;
  double breath_rate_b10s = 0.0;
  double noise_gain = 0.0;  // scale applied to the raw noise
};

// Scales the noise so 10*log10(P_heart+lung / P_noise) = snr_db and sums
// the stems; ground-truth stems add up to the mixture sample for sample.
MixResult make_mix(const MixSpec& spec);

}  // namespace hlsep

#endif  // HLSEP_SYNTH_HPP
