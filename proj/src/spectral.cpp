// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>

#include "error.hpp"

namespace hlsep {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaskFloor = 1e-12;

// Small process-wide cache of FFTW plans; planning with FFTW_ESTIMATE is
// deterministic, creation is serialized because the planner is not
// thread-safe.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  void forward(const double* in, std::complex<double>* out, int n) {
    std::lock_guard<std::mutex> lock(mu_);
    Entry& e = entry(n);
    std::copy(in, in + n, e.real.get());
    fftw_execute(e.fwd);
    std::copy(reinterpret_cast<std::complex<double>*>(e.cplx.get()),
              reinterpret_cast<std::complex<double>*>(e.cplx.get()) + n / 2 + 1, out);
  }

  void inverse(const std::complex<double>* in, double* out, int n) {
    std::lock_guard<std::mutex> lock(mu_);
    Entry& e = entry(n);
    std::copy(in, in + n / 2 + 1, reinterpret_cast<std::complex<double>*>(e.cplx.get()));
    fftw_execute(e.inv);
    const double scale = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] = e.real[i] * scale;
  }

 private:
  struct Entry {
    std::unique_ptr<double[]> real;
    std::unique_ptr<fftw_complex[]> cplx;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
  };

  Entry& entry(int n) {
    auto it = entries_.find(n);
    if (it == entries_.end()) {
      Entry e;
      e.real.reset(new double[static_cast<std::size_t>(n)]);
      e.cplx.reset(new fftw_complex[static_cast<std::size_t>(n / 2 + 1)]);
      e.fwd = fftw_plan_dft_r2c_1d(n, e.real.get(), e.cplx.get(), FFTW_ESTIMATE);
      e.inv = fftw_plan_dft_c2r_1d(n, e.cplx.get(), e.real.get(), FFTW_ESTIMATE);
      it = entries_.emplace(n, std::move(e)).first;
    }
    return it->second;
  }

  std::mutex mu_;
  std::map<int, Entry> entries_;
};

}  // namespace

int StftConfig::hop() const {
  require(window_length > 0, ErrorCode::kBadArgument, "window_length must be positive");
  require(overlap >= 0.0 && overlap < 1.0, ErrorCode::kBadArgument,
          "overlap must lie in [0, 1)");
  require(fft_length >= window_length, ErrorCode::kBadArgument,
          "fft_length must be >= window_length");
  const double h = window_length * (1.0 - overlap);
  const int hop_i = static_cast<int>(std::lround(h));
  require(hop_i > 0 && std::abs(h - hop_i) < 1e-9, ErrorCode::kBadArgument,
          "window_length * (1 - overlap) must be a positive integer");
  return hop_i;
}

std::vector<double> make_window(WindowKind kind, int length) {
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  for (int n = 0; n < length; ++n) {
    const double x = 2.0 * kPi * n / length;  // periodic forms
    switch (kind) {
      case WindowKind::kHann:
        w[static_cast<std::size_t>(n)] = 0.5 * (1.0 - std::cos(x));
        break;
      case WindowKind::kHamming:
        w[static_cast<std::size_t>(n)] = 0.54 - 0.46 * std::cos(x);
        break;
      case WindowKind::kRectangular:
        break;
    }
  }
  return w;
}

WindowKind window_kind_from_name(const std::string& name) {
  if (name == "hann") return WindowKind::kHann;
  if (name == "hamming") return WindowKind::kHamming;
  if (name == "rect" || name == "rectangular") return WindowKind::kRectangular;
  fail(ErrorCode::kUnknownKey, "unknown window kind '" + name + "'");
}

std::string window_kind_name(WindowKind kind) {
  switch (kind) {
    case WindowKind::kHann: return "hann";
    case WindowKind::kHamming: return "hamming";
    case WindowKind::kRectangular: return "rect";
  }
  return "hann";
}

double cola_deviation(const StftConfig& cfg) {
  const int hop = cfg.hop();
  const std::vector<double> w = make_window(cfg.window, cfg.window_length);
  // Accumulate squared windows over enough shifts that the middle window
  // span is fully covered, then compare against the mean over that span.
  const int shifts = cfg.window_length / hop + 2;
  const int total = cfg.window_length + (2 * shifts) * hop;
  std::vector<double> acc(static_cast<std::size_t>(total), 0.0);
  for (int s = 0; s <= 2 * shifts; ++s) {
    const int off = s * hop;
    for (int n = 0; n < cfg.window_length; ++n) {
      acc[static_cast<std::size_t>(off + n)] += w[static_cast<std::size_t>(n)] * w[static_cast<std::size_t>(n)];
    }
  }
  const int lo = shifts * hop;
  const int hi = lo + cfg.window_length;
  double mean = 0.0;
  for (int i = lo; i < hi; ++i) mean += acc[static_cast<std::size_t>(i)];
  mean /= (hi - lo);
  double dev = 0.0;
  for (int i = lo; i < hi; ++i) {
    dev = std::max(dev, std::abs(acc[static_cast<std::size_t>(i)] / mean - 1.0));
  }
  return dev;
}

Eigen::Index stft_frame_count(std::size_t samples, const StftConfig& cfg) {
  if (samples < static_cast<std::size_t>(cfg.window_length)) return 0;
  return static_cast<Eigen::Index>((samples - static_cast<std::size_t>(cfg.window_length)) /
                                   static_cast<std::size_t>(cfg.hop())) + 1;
}

std::size_t analyzed_length(Eigen::Index frames, const StftConfig& cfg) {
  if (frames <= 0) return 0;
  return static_cast<std::size_t>(frames - 1) * static_cast<std::size_t>(cfg.hop()) +
         static_cast<std::size_t>(cfg.window_length);
}

Spectrogram stft(const AudioBuffer& buf, const StftConfig& cfg, double sample_rate) {
  const int hop = cfg.hop();
  const Eigen::Index frames = stft_frame_count(buf.samples.size(), cfg);
  require(frames > 0, ErrorCode::kShapeMismatch,
          "input shorter than one analysis window");

  const std::vector<double> w = make_window(cfg.window, cfg.window_length);
  const int f_bins = cfg.bins();

  Spectrogram spec;
  spec.config = cfg;
  spec.sample_rate = sample_rate > 0 ? sample_rate : buf.sample_rate;
  spec.magnitude.resize(f_bins, frames);
  spec.phase.resize(f_bins, frames);

  std::vector<double> frame(static_cast<std::size_t>(cfg.fft_length), 0.0);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(f_bins));
  for (Eigen::Index t = 0; t < frames; ++t) {
    const std::size_t off = static_cast<std::size_t>(t) * static_cast<std::size_t>(hop);
    for (int n = 0; n < cfg.window_length; ++n) {
      frame[static_cast<std::size_t>(n)] =
          buf.samples[off + static_cast<std::size_t>(n)] * w[static_cast<std::size_t>(n)];
    }
    // zero padding beyond window_length persists from initialisation
    FftPlans::instance().forward(frame.data(), out.data(), cfg.fft_length);
    for (int k = 0; k < f_bins; ++k) {
      spec.magnitude(k, t) = std::abs(out[static_cast<std::size_t>(k)]);
      spec.phase(k, t) = std::arg(out[static_cast<std::size_t>(k)]);
    }
  }
  return spec;
}

AudioBuffer istft(const Spectrogram& spec) {
  const StftConfig& cfg = spec.config;
  const int hop = cfg.hop();
  require(spec.magnitude.rows() == cfg.bins() && spec.phase.rows() == cfg.bins() &&
              spec.magnitude.cols() == spec.phase.cols(),
          ErrorCode::kShapeMismatch, "spectrogram dimensions inconsistent with config");
  const Eigen::Index frames = spec.frames();
  require(frames > 0, ErrorCode::kShapeMismatch, "empty spectrogram");

  const std::vector<double> w = make_window(cfg.window, cfg.window_length);
  const std::size_t out_len = analyzed_length(frames, cfg);

  AudioBuffer out;
  out.sample_rate = spec.sample_rate;
  out.samples.assign(out_len, 0.0);
  std::vector<double> wsum(out_len, 0.0);

  const int f_bins = cfg.bins();
  std::vector<std::complex<double>> in(static_cast<std::size_t>(f_bins));
  std::vector<double> frame(static_cast<std::size_t>(cfg.fft_length));
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int k = 0; k < f_bins; ++k) {
      in[static_cast<std::size_t>(k)] =
          std::polar(spec.magnitude(k, t), spec.phase(k, t));
    }
    FftPlans::instance().inverse(in.data(), frame.data(), cfg.fft_length);
    const std::size_t off = static_cast<std::size_t>(t) * static_cast<std::size_t>(hop);
    for (int n = 0; n < cfg.window_length; ++n) {
      const double win = w[static_cast<std::size_t>(n)];
      out.samples[off + static_cast<std::size_t>(n)] += frame[static_cast<std::size_t>(n)] * win;
      wsum[off + static_cast<std::size_t>(n)] += win * win;
    }
  }
  // The normalizer is floored at a fraction of its peak: where the window
  // power is negligible (outermost samples) a modified spectrum no longer
  // cancels the way an analysis frame does, and dividing by ~w^2 would
  // blow those samples up.
  double wsum_max = 0.0;
  for (double v : wsum) wsum_max = std::max(wsum_max, v);
  const double den_floor = std::max(0.01 * wsum_max, kMaskFloor);
  for (std::size_t i = 0; i < out_len; ++i) {
    out.samples[i] /= std::max(wsum[i], den_floor);
  }
  return out;
}

Spectrogram apply_mask(const Spectrogram& spec, const Mask& mask) {
  require(mask.values.rows() == spec.magnitude.rows() &&
              mask.values.cols() == spec.magnitude.cols(),
          ErrorCode::kShapeMismatch, "mask shape does not match spectrogram");
  Spectrogram out = spec;
  out.magnitude = spec.magnitude.cwiseProduct(mask.values);
  return out;
}

std::map<std::string, Mask> build_masks(const Dictionary& dict, const Activations& act) {
  require(dict.blocks.size() == act.blocks.size(), ErrorCode::kShapeMismatch,
          "mask build: block structures differ");
  require(dict.m.cols() == act.m.rows(), ErrorCode::kShapeMismatch,
          "mask build: factor shapes disagree");

  // Denominator assembled as the sum of the block numerators so the
  // family is a partition of unity by construction.
  std::vector<Eigen::MatrixXd> nums;
  nums.reserve(dict.blocks.size());
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(dict.m.rows(), act.m.cols());
  Eigen::Index start = 0;
  for (std::size_t i = 0; i < dict.blocks.size(); ++i) {
    const Block& db = dict.blocks[i];
    require(db.name == act.blocks[i].name && db.count == act.blocks[i].count,
            ErrorCode::kShapeMismatch, "mask build: block mismatch");
    Eigen::MatrixXd num;
    if (db.count > 0) {
      num.noalias() = dict.m.middleCols(start, db.count) * act.m.middleRows(start, db.count);
    } else {
      num = Eigen::MatrixXd::Zero(dict.m.rows(), act.m.cols());
    }
    total += num;
    nums.push_back(std::move(num));
    start += db.count;
  }
  total = total.cwiseMax(kMaskFloor);

  std::map<std::string, Mask> masks;
  for (std::size_t i = 0; i < dict.blocks.size(); ++i) {
    Mask m;
    m.values = nums[i].cwiseQuotient(total);
    masks.emplace(dict.blocks[i].name, std::move(m));
  }
  return masks;
}

}  // namespace hlsep
