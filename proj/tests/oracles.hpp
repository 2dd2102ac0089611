// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Test-only reference implementations. Everything here is written as
// directly as possible (scalar loops, naive transforms, exhaustive
// enumeration) and stays independent of the library code paths it checks.

#ifndef HLSEP_TESTS_ORACLES_HPP
#define HLSEP_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// ----- naive DFT ------------------------------------------------------

inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      const double ang = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(m) /
                         static_cast<double>(n);
      acc += x[m] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Frequency (Hz) of the largest DFT magnitude below Nyquist.
inline double dft_peak_hz(const std::vector<double>& x, double sample_rate) {
  const auto spec = naive_dft(x);
  const std::size_t half = x.size() / 2;
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double mag = std::abs(spec[k]);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  return static_cast<double>(best) * sample_rate / static_cast<double>(x.size());
}

// Fraction of DFT energy (positive frequencies) inside [lo_hz, hi_hz].
inline double band_energy_fraction(const std::vector<double>& x, double sample_rate,
                                   double lo_hz, double hi_hz) {
  const auto spec = naive_dft(x);
  const std::size_t half = x.size() / 2;
  double in_band = 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(x.size());
    const double e = std::norm(spec[k]);
    total += e;
    if (f >= lo_hz && f <= hi_hz) in_band += e;
  }
  return total > 0.0 ? in_band / total : 0.0;
}

// ----- scalar-loop NMF references --------------------------------------

inline double beta_div_ref(double x, double y, double beta) {
  if (beta == 1.0) {
    return (x > 0.0 ? x * std::log(x / y) : 0.0) + y - x;
  }
  if (beta == 0.0) {
    return x / y - std::log(x / y) - 1.0;
  }
  return (std::pow(x, beta) + (beta - 1.0) * std::pow(y, beta) -
          beta * x * std::pow(y, beta - 1.0)) /
         (beta * (beta - 1.0));
}

inline Eigen::MatrixXd product_ref(const Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                                   double floor) {
  Eigen::MatrixXd out(w.rows(), h.cols());
  for (Eigen::Index f = 0; f < w.rows(); ++f) {
    for (Eigen::Index t = 0; t < h.cols(); ++t) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < w.cols(); ++k) acc += w(f, k) * h(k, t);
      out(f, t) = std::max(acc, floor);
    }
  }
  return out;
}

inline double total_cost_ref(const Eigen::MatrixXd& v, const Eigen::MatrixXd& w,
                             const Eigen::MatrixXd& h, double beta, double mu,
                             double floor) {
  const Eigen::MatrixXd lambda = product_ref(w, h, floor);
  double acc = 0.0;
  for (Eigen::Index f = 0; f < v.rows(); ++f) {
    for (Eigen::Index t = 0; t < v.cols(); ++t) {
      acc += beta_div_ref(v(f, t), lambda(f, t), beta);
    }
  }
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    for (Eigen::Index t = 0; t < h.cols(); ++t) acc += mu * h(k, t);
  }
  return acc;
}

inline Eigen::MatrixXd h_update_ref(const Eigen::MatrixXd& v, const Eigen::MatrixXd& w,
                                    const Eigen::MatrixXd& h, double beta, double mu,
                                    double floor) {
  const Eigen::MatrixXd lambda = product_ref(w, h, floor);
  Eigen::MatrixXd out(h.rows(), h.cols());
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    for (Eigen::Index t = 0; t < h.cols(); ++t) {
      double num = 0.0;
      double dem = 0.0;
      for (Eigen::Index f = 0; f < v.rows(); ++f) {
        num += w(f, k) * std::pow(lambda(f, t), beta - 2.0) * v(f, t);
        dem += w(f, k) * std::pow(lambda(f, t), beta - 1.0);
      }
      dem += mu;
      out(k, t) = std::max(h(k, t) * num / std::max(dem, floor), floor);
    }
  }
  return out;
}

inline Eigen::MatrixXd w_update_ref(const Eigen::MatrixXd& v, const Eigen::MatrixXd& w,
                                    const Eigen::MatrixXd& h, double beta, double floor) {
  const Eigen::MatrixXd lambda = product_ref(w, h, floor);
  const Eigen::Index fs = w.rows();
  const Eigen::Index ks = w.cols();
  Eigen::MatrixXd p(fs, ks), q(fs, ks);
  for (Eigen::Index f = 0; f < fs; ++f) {
    for (Eigen::Index k = 0; k < ks; ++k) {
      double pa = 0.0, qa = 0.0;
      for (Eigen::Index t = 0; t < v.cols(); ++t) {
        pa += std::pow(lambda(f, t), beta - 2.0) * v(f, t) * h(k, t);
        qa += std::pow(lambda(f, t), beta - 1.0) * h(k, t);
      }
      p(f, k) = pa;
      q(f, k) = qa;
    }
  }
  Eigen::MatrixXd out(fs, ks);
  for (Eigen::Index k = 0; k < ks; ++k) {
    double sp = 0.0, sq = 0.0;
    for (Eigen::Index f = 0; f < fs; ++f) {
      sp += w(f, k) * p(f, k);
      sq += w(f, k) * q(f, k);
    }
    for (Eigen::Index f = 0; f < fs; ++f) {
      const double num = p(f, k) + w(f, k) * sq;
      const double dem = q(f, k) + w(f, k) * sp;
      out(f, k) = std::max(w(f, k) * num / std::max(dem, floor), floor);
    }
  }
  // column normalization
  for (Eigen::Index k = 0; k < ks; ++k) {
    double norm = 0.0;
    for (Eigen::Index f = 0; f < fs; ++f) norm += out(f, k) * out(f, k);
    norm = std::sqrt(norm);
    for (Eigen::Index f = 0; f < fs; ++f) {
      out(f, k) = norm < 1e-12 ? 1.0 / std::sqrt(static_cast<double>(fs)) : out(f, k) / norm;
    }
  }
  return out;
}

// ----- Pearson ----------------------------------------------------------

inline double pearson_ref(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// ----- exhaustive Wilcoxon ----------------------------------------------

// One-sided p for a > b by enumerating every sign pattern over the
// observed (tie-averaged) ranks. Practical for m <= ~20.
inline double wilcoxon_enum_ref(const std::vector<double>& a, const std::vector<double>& b,
                                double* point_mass = nullptr) {
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  }
  const std::size_t m = d.size();
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return std::abs(d[x]) < std::abs(d[y]); });
  std::vector<double> rank(m);
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double w_obs = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (d[k] > 0.0) w_obs += rank[k];
  }

  std::uint64_t ge = 0;
  std::uint64_t eq = 0;
  const std::uint64_t patterns = 1ULL << m;
  for (std::uint64_t bits = 0; bits < patterns; ++bits) {
    double w = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (bits & (1ULL << k)) w += rank[k];
    }
    if (w >= w_obs - 1e-9) ++ge;
    if (std::abs(w - w_obs) < 1e-9) ++eq;
  }
  if (point_mass) {
    *point_mass = static_cast<double>(eq) / static_cast<double>(patterns);
  }
  return static_cast<double>(ge) / static_cast<double>(patterns);
}

// ----- misc -------------------------------------------------------------

inline double energy(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

// Least-squares gain of `signal` explained by `target`; squares to the
// captured energy fraction when both are unit-comparable.
inline double projection_gain(const std::vector<double>& signal,
                              const std::vector<double>& target) {
  double num = 0.0, den = 0.0;
  const std::size_t n = std::min(signal.size(), target.size());
  for (std::size_t i = 0; i < n; ++i) {
    num += signal[i] * target[i];
    den += target[i] * target[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline double uniform01(std::uint64_t& state) {
  state = mix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::uint64_t seed, double lo = 0.05, double hi = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  std::uint64_t state = seed;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = lo + (hi - lo) * uniform01(state);
    }
  }
  return m;
}

}  // namespace oracle

#endif  // HLSEP_TESTS_ORACLES_HPP
