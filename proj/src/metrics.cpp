// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "error.hpp"
#include "fir.hpp"

namespace hlsep {

namespace {

constexpr double kSilenceFloor = 1e-14;

// Boxcar prefilter + decimation; adequate antialiasing for smooth
// envelopes and cheap at full audio rate.
std::vector<double> decimate_envelope(const std::vector<double>& e, int step) {
  if (step <= 1) return e;
  std::vector<double> out;
  out.reserve(e.size() / static_cast<std::size_t>(step) + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(step) <= e.size();
       i += static_cast<std::size_t>(step)) {
    double acc = 0.0;
    for (int k = 0; k < step; ++k) acc += e[i + static_cast<std::size_t>(k)];
    out.push_back(acc / step);
  }
  return out;
}

struct Envelope {
  std::vector<double> values;  // normalized to max 1 unless silent
  double rate = 0.0;
  double peak = 0.0;           // pre-normalization maximum
};

Envelope band_power_envelope(const AudioBuffer& buf, double band_lo, double band_hi,
                             double smooth_cutoff, double target_rate) {
  const double fs = buf.sample_rate;
  const double transition = std::max(10.0, 0.2 * band_lo);
  std::vector<double> banded =
      apply_fir(buf.samples, design_bandpass(band_lo, band_hi, transition, 60.0, fs));
  for (double& v : banded) v *= v;

  const int step = std::max(1, static_cast<int>(std::lround(fs / target_rate)));
  Envelope env;
  env.rate = fs / step;
  env.values = decimate_envelope(banded, step);

  const double smooth_transition = std::max(0.5, 0.5 * smooth_cutoff);
  env.values = apply_fir(env.values,
                         design_lowpass(smooth_cutoff, smooth_transition, 60.0, env.rate));
  for (double& v : env.values) v = std::max(v, 0.0);

  env.peak = env.values.empty() ? 0.0 : *std::max_element(env.values.begin(), env.values.end());
  if (env.peak > kSilenceFloor) {
    for (double& v : env.values) v /= env.peak;
  }
  return env;
}

// Biased mean-removed autocorrelation peak within [lag_lo, lag_hi]
// seconds, parabolic refinement. Returns period in seconds (0 when no
// usable peak) and the normalized peak height through `strength`.
double acf_period(const std::vector<double>& env, double env_rate, double lag_lo,
                  double lag_hi, double margin, double* strength) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(env.size());
  *strength = 0.0;
  if (n < 8) return 0.0;

  double mean = std::accumulate(env.begin(), env.end(), 0.0) / static_cast<double>(n);
  std::vector<double> c(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) c[i] = env[i] - mean;

  double r0 = 0.0;
  for (double v : c) r0 += v * v;
  r0 /= static_cast<double>(n);
  if (r0 < 1e-18) return 0.0;

  const std::ptrdiff_t l_band_lo = static_cast<std::ptrdiff_t>(std::floor(lag_lo * env_rate));
  const std::ptrdiff_t l_band_hi = static_cast<std::ptrdiff_t>(std::ceil(lag_hi * env_rate));
  const std::ptrdiff_t l_lo =
      std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(std::floor(lag_lo * env_rate * (1.0 - margin))));
  const std::ptrdiff_t l_hi = std::min<std::ptrdiff_t>(
      n - 2, static_cast<std::ptrdiff_t>(std::ceil(lag_hi * env_rate * (1.0 + margin))));
  if (l_hi <= l_lo) return 0.0;

  std::vector<double> r(static_cast<std::size_t>(l_hi - l_lo + 1));
  for (std::ptrdiff_t lag = l_lo; lag <= l_hi; ++lag) {
    double acc = 0.0;
    for (std::ptrdiff_t i = 0; i + lag < n; ++i) {
      acc += c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i + lag)];
    }
    r[static_cast<std::size_t>(lag - l_lo)] = acc / static_cast<double>(n) / r0;
  }

  // Global maximum inside the band proper (guard lags join only through
  // the parabolic neighbors).
  std::ptrdiff_t best = -1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t lag = std::max(l_band_lo, l_lo); lag <= std::min(l_band_hi, l_hi); ++lag) {
    const double v = r[static_cast<std::size_t>(lag - l_lo)];
    if (v > best_v) {
      best_v = v;
      best = lag;
    }
  }
  if (best < 0) return 0.0;
  *strength = best_v;

  // Sub-harmonic guard: cycle-to-cycle variation can push the peak at a
  // multiple of the true period slightly above the fundamental. Take the
  // shortest divisor lag whose own in-band peak comes close to the max.
  for (int divisor = 4; divisor >= 2; --divisor) {
    const std::ptrdiff_t cand = best / divisor;
    if (cand < std::max(l_band_lo, l_lo)) continue;
    const std::ptrdiff_t w = std::max<std::ptrdiff_t>(1, cand / 10);
    std::ptrdiff_t local = -1;
    double local_v = -std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t lag = std::max(cand - w, l_lo); lag <= std::min(cand + w, l_hi); ++lag) {
      const double v = r[static_cast<std::size_t>(lag - l_lo)];
      if (v > local_v) {
        local_v = v;
        local = lag;
      }
    }
    if (local >= 0 && local_v >= 0.75 * best_v) {
      best = local;
      break;
    }
  }

  double refined = static_cast<double>(best);
  if (best > l_lo && best < l_hi) {
    const double ym = r[static_cast<std::size_t>(best - 1 - l_lo)];
    const double y0 = r[static_cast<std::size_t>(best - l_lo)];
    const double yp = r[static_cast<std::size_t>(best + 1 - l_lo)];
    const double denom = ym - 2.0 * y0 + yp;
    if (std::abs(denom) > 1e-18) {
      double delta = 0.5 * (ym - yp) / denom;
      delta = std::clamp(delta, -0.5, 0.5);
      refined += delta;
    }
  }
  return refined / env_rate;
}

std::vector<double> pick_peaks(const std::vector<double>& env, double env_rate,
                               double min_distance_s, double threshold) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < env.size(); ++i) {
    if (env[i] >= threshold && env[i] >= env[i - 1] && env[i] > env[i + 1]) {
      candidates.push_back(i);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t a, std::size_t b) { return env[a] > env[b]; });
  const double min_gap = min_distance_s * env_rate;
  std::vector<std::size_t> accepted;
  for (std::size_t c : candidates) {
    bool ok = true;
    for (std::size_t a : accepted) {
      if (std::abs(static_cast<double>(c) - static_cast<double>(a)) < min_gap) {
        ok = false;
        break;
      }
    }
    if (ok) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end());
  std::vector<double> times;
  times.reserve(accepted.size());
  for (std::size_t a : accepted) times.push_back(static_cast<double>(a) / env_rate);
  return times;
}

RateEstimate estimate_rate(const AudioBuffer& stem, double band_lo, double band_hi,
                           double smooth_cutoff, double env_rate, double period_lo,
                           double period_hi, double min_event_gap, double margin,
                           double peak_threshold) {
  Envelope env = band_power_envelope(stem, band_lo, band_hi, smooth_cutoff, env_rate);

  RateEstimate est;
  est.envelope = env.values;
  est.envelope_rate = env.rate;
  if (env.peak <= kSilenceFloor) {
    est.low_confidence = true;
    return est;  // silence: rate 0, no events
  }

  double strength = 0.0;
  const double period =
      acf_period(env.values, env.rate, period_lo, period_hi, margin, &strength);
  if (period <= 0.0) {
    est.low_confidence = true;
    return est;
  }
  est.rate = 10.0 / period;
  est.low_confidence = strength < 0.15;

  const double gap = std::max(min_event_gap, 0.6 * period);
  est.event_times = pick_peaks(env.values, env.rate, gap, peak_threshold);
  return est;
}

double quantile_type7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double norm_tail(double z) {
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace

RateEstimate heart_rate(const AudioBuffer& stem, const MetricsConfig& cfg) {
  require(stem.sample_rate > 0, ErrorCode::kBadArgument, "stem has no sample rate");
  require(stem.duration() >= 2.0, ErrorCode::kBadArgument,
          "heart_rate requires at least 2 s of audio");
  return estimate_rate(stem, cfg.heart_band_low, cfg.heart_band_high, cfg.heart_env_cutoff,
                       cfg.heart_env_rate, 60.0 / cfg.heart_bpm_max, 60.0 / cfg.heart_bpm_min,
                       0.0, cfg.acf_margin, cfg.peak_threshold);
}

RateEstimate breathing_rate(const AudioBuffer& stem, const MetricsConfig& cfg) {
  require(stem.sample_rate > 0, ErrorCode::kBadArgument, "stem has no sample rate");
  require(stem.duration() >= 4.0, ErrorCode::kBadArgument,
          "breathing_rate requires at least 4 s of audio");
  return estimate_rate(stem, cfg.breath_band_low, cfg.breath_band_high,
                       cfg.breath_env_cutoff, cfg.breath_env_rate, cfg.breath_min_interval,
                       cfg.breath_period_max, cfg.breath_min_interval, cfg.acf_margin,
                       cfg.peak_threshold);
}

Eigen::VectorXd beat_frame_gate(const std::vector<double>& beat_times, Eigen::Index frames,
                                const StftConfig& stft_cfg, double sample_rate,
                                double halfwidth) {
  require(sample_rate > 0, ErrorCode::kBadArgument, "gate needs a sample rate");
  const double hop_s = stft_cfg.hop() / sample_rate;
  const double half_window_s = 0.5 * stft_cfg.window_length / sample_rate;
  const double width = std::max(halfwidth, 0.5 * hop_s);
  Eigen::VectorXd gate = Eigen::VectorXd::Zero(frames);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const double center = static_cast<double>(t) * hop_s + half_window_s;
    for (double b : beat_times) {
      if (std::abs(center - b) <= width) {
        gate(t) = 1.0;
        break;
      }
    }
  }
  return gate;
}

double sdr(const AudioBuffer& estimate, const AudioBuffer& reference) {
  require(estimate.samples.size() == reference.samples.size(), ErrorCode::kShapeMismatch,
          "sdr requires equal lengths");
  const Eigen::Map<const Eigen::VectorXd> e(estimate.samples.data(),
                                            static_cast<Eigen::Index>(estimate.samples.size()));
  const Eigen::Map<const Eigen::VectorXd> r(reference.samples.data(),
                                            static_cast<Eigen::Index>(reference.samples.size()));
  const double rr = r.squaredNorm();
  require(rr > 0.0, ErrorCode::kDegenerate, "sdr reference is silent");
  const double gain = e.dot(r) / rr;
  const double target = gain * gain * rr;
  const double resid = (e - gain * r).squaredNorm();
  if (resid <= 0.0 || target / resid > 1e10) return 100.0;
  if (target <= 0.0 || target / resid < 1e-10) return -100.0;
  return std::clamp(10.0 * std::log10(target / resid), -100.0, 100.0);
}

double sir(const AudioBuffer& estimate, const AudioBuffer& reference,
           const std::vector<AudioBuffer>& interferers) {
  require(!interferers.empty(), ErrorCode::kBadArgument, "sir requires interferers");
  const Eigen::Index n = static_cast<Eigen::Index>(estimate.samples.size());
  require(reference.samples.size() == estimate.samples.size(), ErrorCode::kShapeMismatch,
          "sir requires equal lengths");
  for (const AudioBuffer& b : interferers) {
    require(b.samples.size() == estimate.samples.size(), ErrorCode::kShapeMismatch,
            "sir requires equal lengths");
  }
  const Eigen::Map<const Eigen::VectorXd> e(estimate.samples.data(), n);
  const Eigen::Map<const Eigen::VectorXd> r(reference.samples.data(), n);
  const double rr = r.squaredNorm();
  require(rr > 0.0, ErrorCode::kDegenerate, "sir reference is silent");

  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(interferers.size()) + 1);
  basis.col(0) = r;
  for (std::size_t i = 0; i < interferers.size(); ++i) {
    basis.col(static_cast<Eigen::Index>(i) + 1) =
        Eigen::Map<const Eigen::VectorXd>(interferers[i].samples.data(), n);
  }
  Eigen::MatrixXd gram = basis.transpose() * basis;
  gram.diagonal().array() += 1e-12 * gram.trace();
  const Eigen::VectorXd coef = gram.ldlt().solve(basis.transpose() * e);
  const Eigen::VectorXd full_proj = basis * coef;

  const double gain = e.dot(r) / rr;
  const Eigen::VectorXd target = gain * r;
  const double t2 = target.squaredNorm();
  const double i2 = (full_proj - target).squaredNorm();
  if (i2 <= 0.0 || t2 / i2 > 1e10) return 100.0;
  if (t2 <= 0.0 || t2 / i2 < 1e-10) return -100.0;
  return std::clamp(10.0 * std::log10(t2 / i2), -100.0, 100.0);
}

double wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), ErrorCode::kShapeMismatch,
          "wilcoxon requires paired samples");
  require(a.size() >= 5, ErrorCode::kBadArgument, "wilcoxon requires at least 5 pairs");

  std::vector<double> diffs;
  diffs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  require(!diffs.empty(), ErrorCode::kDegenerate, "wilcoxon: all differences are zero");

  const std::size_t m = diffs.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });

  // Average ranks over ties; doubled ranks stay integral.
  std::vector<double> rank(m, 0.0);
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }

  double w_plus = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (diffs[k] > 0.0) w_plus += rank[k];
  }

  if (m <= 25) {
    // Exact tail by counting sign patterns over the doubled ranks.
    std::vector<long> r2(m);
    long total2 = 0;
    for (std::size_t k = 0; k < m; ++k) {
      r2[k] = std::lround(2.0 * rank[k]);
      total2 += r2[k];
    }
    std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
    count[0] = 1.0;
    long reach = 0;
    for (std::size_t k = 0; k < m; ++k) {
      reach += r2[k];
      for (long s = reach; s >= r2[k]; --s) {
        count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r2[k])];
      }
    }
    const long w2 = std::lround(2.0 * w_plus);
    double tail = 0.0;
    for (long s = w2; s <= total2; ++s) tail += count[static_cast<std::size_t>(s)];
    return tail / std::pow(2.0, static_cast<double>(m));
  }

  const double md = static_cast<double>(m);
  const double mean = md * (md + 1.0) / 4.0;
  double var = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0;
  // tie correction
  i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    const double t = static_cast<double>(j - i + 1);
    if (t > 1.0) var -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  const double z = (w_plus - mean - 0.5) / std::sqrt(var);
  return norm_tail(z);
}

void median_iqr(std::vector<double> values, double* median, double* iqr) {
  require(!values.empty(), ErrorCode::kBadArgument, "median of empty set");
  std::sort(values.begin(), values.end());
  if (median) *median = quantile_type7(values, 0.5);
  if (iqr) *iqr = quantile_type7(values, 0.75) - quantile_type7(values, 0.25);
}

RateErrorReport rate_error_report(const std::vector<RateObservation>& results) {
  require(!results.empty(), ErrorCode::kBadArgument, "empty result set");

  std::vector<std::string> methods;
  std::map<std::string, std::vector<double>> errors;
  for (const RateObservation& obs : results) {
    if (errors.find(obs.method) == errors.end()) methods.push_back(obs.method);
    errors[obs.method].push_back(std::abs(obs.estimate_b10s - obs.truth_b10s));
  }

  RateErrorReport report;
  for (const std::string& name : methods) {
    RateErrorRow row;
    row.method = name;
    row.n = errors[name].size();
    median_iqr(errors[name], &row.median_abs_error, &row.iqr);
    report.rows.push_back(row);
  }

  const Eigen::Index k = static_cast<Eigen::Index>(methods.size());
  report.p_values = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      if (r == c) continue;
      const auto& er = errors[methods[static_cast<std::size_t>(r)]];
      const auto& ec = errors[methods[static_cast<std::size_t>(c)]];
      if (er.size() != ec.size()) {
        report.notes.push_back("unpaired methods: " + methods[static_cast<std::size_t>(r)] +
                               " vs " + methods[static_cast<std::size_t>(c)]);
        continue;
      }
      if (er.size() < 5) {
        report.notes.push_back("insufficient n for " + methods[static_cast<std::size_t>(r)] +
                               " vs " + methods[static_cast<std::size_t>(c)]);
        continue;
      }
      try {
        report.p_values(r, c) = wilcoxon_one_sided(er, ec);
      } catch (const Error&) {
        report.notes.push_back("degenerate comparison: " + methods[static_cast<std::size_t>(r)] +
                               " vs " + methods[static_cast<std::size_t>(c)]);
      }
    }
  }
  return report;
}

}  // namespace hlsep
