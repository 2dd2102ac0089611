// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "fir.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace hlsep {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Kaiser beta for a given stopband attenuation (Kaiser's empirical fit).
double kaiser_beta(double atten_db) {
  if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
  if (atten_db >= 21.0) return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
  return 0.0;
}

}  // namespace

double bessel_i0(double x) {
  // Power series; converges quickly for the beta range used here.
  double sum = 1.0;
  double term = 1.0;
  const double half_x2 = 0.25 * x * x;
  for (int k = 1; k < 64; ++k) {
    term *= half_x2 / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

std::vector<double> design_lowpass(double cutoff_hz, double transition_hz,
                                   double stopband_atten_db, double sample_rate) {
  require(sample_rate > 0 && cutoff_hz > 0 && transition_hz > 0,
          ErrorCode::kBadArgument, "invalid lowpass design parameters");
  require(cutoff_hz < 0.5 * sample_rate, ErrorCode::kBadArgument,
          "lowpass cutoff must be below Nyquist");

  const double beta = kaiser_beta(stopband_atten_db);
  const double delta_omega = 2.0 * kPi * transition_hz / sample_rate;
  int taps = static_cast<int>(std::ceil((stopband_atten_db - 7.95) / (2.285 * delta_omega))) + 1;
  if (taps % 2 == 0) ++taps;
  taps = std::max(taps, 11);

  const int half = taps / 2;
  const double fc = cutoff_hz / sample_rate;  // normalized (cycles/sample)
  const double i0_beta = bessel_i0(beta);

  std::vector<double> h(static_cast<std::size_t>(taps));
  double sum = 0.0;
  for (int n = 0; n < taps; ++n) {
    const double m = static_cast<double>(n - half);
    const double r = m / static_cast<double>(half);
    const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[static_cast<std::size_t>(n)] = 2.0 * fc * sinc(2.0 * fc * m) * w;
    sum += h[static_cast<std::size_t>(n)];
  }
  // Exact unit DC gain.
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> design_bandpass(double low_hz, double high_hz,
                                    double transition_hz,
                                    double stopband_atten_db, double sample_rate) {
  require(low_hz >= 0 && high_hz > low_hz, ErrorCode::kBadArgument,
          "invalid bandpass edges");
  std::vector<double> hi = design_lowpass(high_hz, transition_hz, stopband_atten_db, sample_rate);
  if (low_hz <= 0.0) return hi;
  std::vector<double> lo = design_lowpass(low_hz, transition_hz, stopband_atten_db, sample_rate);
  // Align lengths before subtracting (designs may differ in tap count).
  const std::size_t n = std::max(hi.size(), lo.size());
  std::vector<double> out(n, 0.0);
  const std::size_t oh = (n - hi.size()) / 2;
  const std::size_t ol = (n - lo.size()) / 2;
  for (std::size_t i = 0; i < hi.size(); ++i) out[i + oh] += hi[i];
  for (std::size_t i = 0; i < lo.size(); ++i) out[i + ol] -= lo[i];
  return out;
}

std::vector<double> apply_fir(const std::vector<double>& x,
                              const std::vector<double>& taps) {
  require(taps.size() % 2 == 1, ErrorCode::kBadArgument, "FIR tap count must be odd");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(taps.size());
  const std::ptrdiff_t half = m / 2;
  std::vector<double> y(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, half - i);
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(m, n + half - i);
    double acc = 0.0;
    for (std::ptrdiff_t k = k_lo; k < k_hi; ++k) {
      acc += taps[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(i + k - half)];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

}  // namespace hlsep
