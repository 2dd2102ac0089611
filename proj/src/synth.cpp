// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "synth.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "fir.hpp"
#include "rng.hpp"

namespace hlsep {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kS2Gain = 0.6;

// Independent sub-streams so heart/lung/noise stay stable when one spec
// field changes.
constexpr std::uint64_t kHeartTag = 1;
constexpr std::uint64_t kLungTag = 2;
constexpr std::uint64_t kNoiseTag = 3;

void validate(const MixSpec& spec) {
  require(spec.sample_rate > 0 && spec.duration > 0, ErrorCode::kBadArgument,
          "mix spec needs positive duration and sample rate");
  require(spec.heart.rate_bpm >= 70.0 && spec.heart.rate_bpm <= 220.0,
          ErrorCode::kBadArgument, "heart rate outside 70-220 bpm");
  require(spec.lung.rate_bpm > 0.0, ErrorCode::kBadArgument,
          "breathing rate must be positive");
  require(spec.lung.depth >= 0.0 && spec.lung.depth <= 1.0, ErrorCode::kBadArgument,
          "lung modulation depth outside [0, 1]");
}

void add_pulse(std::vector<double>& x, double fs, double onset_s, double freq,
               double amp, double decay) {
  const std::size_t start = static_cast<std::size_t>(std::llround(onset_s * fs));
  const std::size_t len = static_cast<std::size_t>(std::llround(5.0 * decay * fs));
  for (std::size_t i = 0; i < len && start + i < x.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    x[start + i] += amp * std::exp(-t / decay) * std::sin(2.0 * kPi * freq * t);
  }
}

double mean_square(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

}  // namespace

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "white") return NoiseKind::kWhite;
  if (name == "babble") return NoiseKind::kBabble;
  if (name == "bursts") return NoiseKind::kBursts;
  fail(ErrorCode::kUnknownKey, "unknown noise kind '" + name + "'");
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kBabble: return "babble";
    case NoiseKind::kBursts: return "bursts";
  }
  return "white";
}

GenResult gen_heart(const MixSpec& spec) {
  validate(spec);
  const double fs = spec.sample_rate;
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration * fs));
  GenResult out;
  out.audio.sample_rate = fs;
  out.audio.samples.assign(n, 0.0);

  const double period = 60.0 / spec.heart.rate_bpm;
  const double spacing =
      spec.heart.s1s2_spacing > 0.0 ? spec.heart.s1s2_spacing : 0.33 * period;
  Rng rng(Rng::derive_seed(spec.seed, kHeartTag));

  const double t0 = 0.05;
  for (int k = 0;; ++k) {
    const double beat = t0 + k * period;
    if (beat >= spec.duration) break;
    const double jitter = 1.0 + 0.15 * (2.0 * rng.uniform(0.0, 1.0) - 1.0);
    const double amp = spec.heart.amplitude * jitter;
    add_pulse(out.audio.samples, fs, beat, spec.heart.s1_freq, amp, spec.heart.decay);
    add_pulse(out.audio.samples, fs, beat + spacing, spec.heart.s2_freq, kS2Gain * amp,
              spec.heart.decay);
    out.event_times.push_back(beat);
  }
  return out;
}

GenResult gen_lung(const MixSpec& spec) {
  validate(spec);
  const double fs = spec.sample_rate;
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration * fs));
  GenResult out;
  out.audio.sample_rate = fs;
  out.audio.samples.assign(n, 0.0);

  Rng rng(Rng::derive_seed(spec.seed, kLungTag));
  std::vector<double> noise(n);
  for (double& v : noise) v = rng.gaussian();
  const double lo = std::max(1.0, spec.lung.band_center - 0.5 * spec.lung.bandwidth);
  const double hi = std::min(0.49 * fs, spec.lung.band_center + 0.5 * spec.lung.bandwidth);
  noise = apply_fir(noise, design_bandpass(lo, hi, 50.0, 60.0, fs));

  const double period = 60.0 / spec.lung.rate_bpm;
  const double insp_frac = spec.lung.ie_ratio / (1.0 + spec.lung.ie_ratio);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double phase = std::fmod(t, period) / period;
    double cycle;
    if (phase < insp_frac) {
      const double u = phase / insp_frac;
      cycle = std::sin(kPi * u) * std::sin(kPi * u);
    } else {
      const double u = (phase - insp_frac) / (1.0 - insp_frac);
      cycle = 0.5 * std::sin(kPi * u) * std::sin(kPi * u);
    }
    const double env = spec.lung.depth * cycle + (1.0 - spec.lung.depth);
    out.audio.samples[i] = spec.lung.amplitude * env * noise[i];
  }

  for (int k = 0;; ++k) {
    const double start = k * period;
    if (start >= spec.duration) break;
    out.event_times.push_back(start);
  }
  return out;
}

AudioBuffer gen_noise(const MixSpec& spec) {
  validate(spec);
  const double fs = spec.sample_rate;
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration * fs));
  AudioBuffer out;
  out.sample_rate = fs;
  out.samples.assign(n, 0.0);
  if (spec.noise.kind == NoiseKind::kNone) return out;

  Rng rng(Rng::derive_seed(spec.seed, kNoiseTag));
  switch (spec.noise.kind) {
    case NoiseKind::kNone:
      break;
    case NoiseKind::kWhite: {
      for (double& v : out.samples) v = rng.gaussian();
      break;
    }
    case NoiseKind::kBabble: {
      // Lowpassed chatter with slow multiplicative modulation.
      std::vector<double> base(n);
      for (double& v : base) v = rng.gaussian();
      base = apply_fir(base, design_lowpass(800.0, 200.0, 60.0, fs));
      const double f1 = rng.uniform(0.8, 1.8);
      const double f2 = rng.uniform(0.2, 0.6);
      const double p1 = rng.uniform(0.0, 2.0 * kPi);
      const double p2 = rng.uniform(0.0, 2.0 * kPi);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double am = (1.0 + 0.5 * std::sin(2.0 * kPi * f1 * t + p1)) *
                          (1.0 + 0.3 * std::sin(2.0 * kPi * f2 * t + p2));
        out.samples[i] = base[i] * am;
      }
      break;
    }
    case NoiseKind::kBursts: {
      // Sparse broadband transients over a faint bed, the equipment-clatter
      // case the unsupervised block exists for.
      for (double& v : out.samples) v = 0.05 * rng.gaussian();
      const int events = std::max(1, static_cast<int>(std::lround(3.0 * spec.duration)));
      for (int e = 0; e < events; ++e) {
        const double onset = rng.uniform(0.0, spec.duration);
        const double amp = rng.uniform(0.5, 1.5);
        const std::size_t start = static_cast<std::size_t>(std::llround(onset * fs));
        const std::size_t len = static_cast<std::size_t>(std::llround(0.15 * fs));
        for (std::size_t i = 0; i < len && start + i < n; ++i) {
          const double t = static_cast<double>(i) / fs;
          out.samples[start + i] += amp * std::exp(-t / 0.03) * rng.gaussian();
        }
      }
      break;
    }
  }
  return out;
}

MixResult make_mix(const MixSpec& spec) {
  validate(spec);
  GenResult heart = gen_heart(spec);
  GenResult lung = gen_lung(spec);
  AudioBuffer noise = gen_noise(spec);

  MixResult out;
  out.beat_times = std::move(heart.event_times);
  out.breath_times = std::move(lung.event_times);
  out.heart_rate_b10s = spec.heart.rate_bpm / 6.0;
  out.breath_rate_b10s = spec.lung.rate_bpm / 6.0;

  const std::size_t n = heart.audio.samples.size();
  require(lung.audio.samples.size() == n && noise.samples.size() == n,
          ErrorCode::kShapeMismatch, "mix stems disagree in length");

  std::vector<double> hl(n);
  for (std::size_t i = 0; i < n; ++i) {
    hl[i] = heart.audio.samples[i] + lung.audio.samples[i];
  }

  if (spec.noise.kind != NoiseKind::kNone) {
    const double p_hl = mean_square(hl);
    const double p_n = mean_square(noise.samples);
    require(p_hl > 0.0, ErrorCode::kDegenerate,
            "cannot set an SNR against silent heart+lung content");
    if (p_n > 0.0) {
      out.noise_gain = std::sqrt(p_hl / (p_n * std::pow(10.0, spec.noise.snr_db / 10.0)));
      for (double& v : noise.samples) v *= out.noise_gain;
    }
  }

  out.mixture.sample_rate = spec.sample_rate;
  out.mixture.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.mixture.samples[i] = hl[i] + noise.samples[i];
  }
  out.heart = std::move(heart.audio);
  out.lung = std::move(lung.audio);
  out.noise = std::move(noise);
  return out;
}

}  // namespace hlsep
