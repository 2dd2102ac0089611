// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <cstring>

#include "error.hpp"
#include "metrics.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace hlsep;

TEST_CASE("gen_heart beat arithmetic") {
  MixSpec spec;
  spec.heart.rate_bpm = 120.0;
  spec.duration = 10.0;
  const GenResult heart = gen_heart(spec);
  REQUIRE(heart.event_times.size() == 20);
  for (std::size_t i = 1; i < heart.event_times.size(); ++i) {
    CHECK(heart.event_times[i] - heart.event_times[i - 1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(heart.audio.samples.size() == 40000);
}

TEST_CASE("gen_heart zero amplitude is silence") {
  MixSpec spec;
  spec.heart.amplitude = 0.0;
  const GenResult heart = gen_heart(spec);
  for (double v : heart.audio.samples) CHECK(v == 0.0);
}

TEST_CASE("gen_heart concentrates energy in the 50-250 Hz band") {
  MixSpec spec;
  spec.duration = 2.0;
  spec.heart.rate_bpm = 150.0;
  const GenResult heart = gen_heart(spec);
  CHECK(oracle::band_energy_fraction(heart.audio.samples, spec.sample_rate, 50.0, 250.0) >=
        0.9);
}

TEST_CASE("gen_lung cycle count and modulation") {
  MixSpec spec;
  spec.lung.rate_bpm = 30.0;
  spec.duration = 10.0;
  const GenResult lung = gen_lung(spec);
  CHECK(lung.event_times.size() == 5);

  // depth 0 keeps the band noise stationary: windowed RMS stays flat
  MixSpec flat = spec;
  flat.lung.depth = 0.0;
  const GenResult steady = gen_lung(flat);
  const std::size_t win = 4000;
  double lo = 1e300, hi = 0.0;
  for (std::size_t start = 0; start + win <= steady.audio.samples.size(); start += win) {
    double acc = 0.0;
    for (std::size_t i = start; i < start + win; ++i) {
      acc += steady.audio.samples[i] * steady.audio.samples[i];
    }
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  CHECK(hi / lo < 1.5);
}

TEST_CASE("breathing_rate closes the loop on clean lung output") {
  MixSpec spec;
  spec.lung.rate_bpm = 36.0;
  spec.duration = 10.0;
  spec.seed = 4;
  const GenResult lung = gen_lung(spec);
  const RateEstimate est = breathing_rate(lung.audio);
  CHECK(std::abs(est.rate - 6.0) <= 1.0);
}

TEST_CASE("mix hits the requested SNR") {
  MixSpec spec;
  spec.noise.kind = NoiseKind::kWhite;
  spec.noise.snr_db = 0.0;
  spec.seed = 9;
  const MixResult mix = make_mix(spec);
  double p_hl = 0.0, p_n = 0.0;
  for (std::size_t i = 0; i < mix.mixture.samples.size(); ++i) {
    const double hl = mix.heart.samples[i] + mix.lung.samples[i];
    p_hl += hl * hl;
    p_n += mix.noise.samples[i] * mix.noise.samples[i];
  }
  CHECK(std::abs(p_n / p_hl - 1.0) < 1e-6);
}

TEST_CASE("mix without noise is the exact stem sum") {
  MixSpec spec;
  spec.noise.kind = NoiseKind::kNone;
  const MixResult mix = make_mix(spec);
  for (std::size_t i = 0; i < mix.mixture.samples.size(); ++i) {
    CHECK(mix.mixture.samples[i] == mix.heart.samples[i] + mix.lung.samples[i]);
    CHECK(mix.noise.samples[i] == 0.0);
  }
}

TEST_CASE("ground-truth stems sum to the mixture sample for sample") {
  for (NoiseKind kind : {NoiseKind::kWhite, NoiseKind::kBabble, NoiseKind::kBursts}) {
    MixSpec spec;
    spec.noise.kind = kind;
    spec.seed = 17;
    spec.duration = 4.0;
    const MixResult mix = make_mix(spec);
    for (std::size_t i = 0; i < mix.mixture.samples.size(); ++i) {
      const double sum = (mix.heart.samples[i] + mix.lung.samples[i]) + mix.noise.samples[i];
      CHECK(mix.mixture.samples[i] == sum);
    }
  }
}

TEST_CASE("fixed spec and seed reproduce bit-identical mixtures") {
  MixSpec spec;
  spec.seed = 1234;
  spec.noise.kind = NoiseKind::kBursts;
  const MixResult a = make_mix(spec);
  const MixResult b = make_mix(spec);
  REQUIRE(a.mixture.samples.size() == b.mixture.samples.size());
  CHECK(std::memcmp(a.mixture.samples.data(), b.mixture.samples.data(),
                    a.mixture.samples.size() * sizeof(double)) == 0);
  CHECK(a.noise_gain == b.noise_gain);
}

TEST_CASE("physiologic range validation") {
  MixSpec slow;
  slow.heart.rate_bpm = 60.0;
  CHECK_THROWS_AS(gen_heart(slow), Error);

  MixSpec still;
  still.lung.rate_bpm = 0.0;
  CHECK_THROWS_AS(gen_lung(still), Error);

  MixSpec silent;
  silent.heart.amplitude = 0.0;
  silent.lung.amplitude = 0.0;
  silent.noise.kind = NoiseKind::kWhite;
  CHECK_THROWS_AS(make_mix(silent), Error);
}
