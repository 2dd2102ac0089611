// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_METRICS_HPP
#define HLSEP_METRICS_HPP

#include <string>
#include <utility>
#include <vector>

#include "audio.hpp"
#include "spectral.hpp"

namespace hlsep {

// Event-rate estimate in events per 10 seconds, plus the detection
// envelope and event times backing it.
struct RateEstimate {
  double rate = 0.0;                // events per 10 s
  std::vector<double> event_times;  // seconds, strictly increasing
  std::vector<double> envelope;     // normalized detection envelope
  double envelope_rate = 0.0;       // Hz
  bool low_confidence = false;
};

struct MetricsConfig {
  double heart_band_low = 25.0;     // Hz, energy envelope band
  double heart_band_high = 250.0;
  double heart_env_cutoff = 20.0;   // Hz, envelope smoothing
  double heart_env_rate = 200.0;    // Hz, envelope sample rate
  double heart_bpm_min = 70.0;
  double heart_bpm_max = 220.0;
  double breath_band_low = 300.0;   // Hz, power envelope band
  double breath_band_high = 450.0;
  double breath_env_cutoff = 2.0;
  double breath_env_rate = 50.0;
  double breath_min_interval = 1.0; // s, minimum inter-breath spacing
  double breath_period_max = 3.3;   // s, slowest breath tracked
  double peak_threshold = 0.4;      // fraction of the envelope maximum
  double acf_margin = 0.08;         // lag guard beyond the rate band
  double gate_halfwidth = 0.05;     // s, beat gate half width
};

// Beats per 10 s from the 25-250 Hz energy envelope: peak detection for
// event times, autocorrelation restricted to the 70-220 bpm band for the
// rate itself.
RateEstimate heart_rate(const AudioBuffer& stem, const MetricsConfig& cfg = {});

// Breaths per 10 s from the 300-450 Hz power envelope.
RateEstimate breathing_rate(const AudioBuffer& stem, const MetricsConfig& cfg = {});

// Per-frame binary gate marking +-halfwidth around each beat (widened to
// half a hop so no beat falls between frame centers).
Eigen::VectorXd beat_frame_gate(const std::vector<double>& beat_times, Eigen::Index frames,
                                const StftConfig& stft_cfg, double sample_rate,
                                double halfwidth = 0.05);

// Signal-to-distortion ratio with optimal scalar projection onto the
// reference; clamped to +-100 dB.
double sdr(const AudioBuffer& estimate, const AudioBuffer& reference);

// Signal-to-interference ratio: target from the reference projection,
// interference from the span of the interferer signals.
double sir(const AudioBuffer& estimate, const AudioBuffer& reference,
           const std::vector<AudioBuffer>& interferers);

// One-sided Wilcoxon signed-rank p-value for the alternative a > b.
// Zero differences are dropped, tied ranks averaged; exact distribution
// up to 25 informative pairs, normal approximation with continuity and
// tie corrections above.
double wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b);

// Median and interquartile range with linear-interpolation quartiles.
void median_iqr(std::vector<double> values, double* median, double* iqr);

struct RateObservation {
  std::string method;
  double estimate_b10s = 0.0;
  double truth_b10s = 0.0;
};

struct RateErrorRow {
  std::string method;
  double median_abs_error = 0.0;
  double iqr = 0.0;
  std::size_t n = 0;
};

// Per-method error summary plus pairwise one-sided Wilcoxon p-values.
// p_values(i, j) tests "method i's errors exceed method j's"; NaN marks
// degenerate or insufficient pairings (explained in notes).
struct RateErrorReport {
  std::vector<RateErrorRow> rows;
  Eigen::MatrixXd p_values;
  std::vector<std::string> notes;
};

RateErrorReport rate_error_report(const std::vector<RateObservation>& results);

}  // namespace hlsep

#endif  // HLSEP_METRICS_HPP
