// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_SPECTRAL_HPP
#define HLSEP_SPECTRAL_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "audio.hpp"
#include "nmf.hpp"

namespace hlsep {

enum class WindowKind { kHann, kHamming, kRectangular };

struct StftConfig {
  int window_length = 2048;
  double overlap = 0.75;                    // fraction of the window shared by frames
  WindowKind window = WindowKind::kHann;
  int fft_length = 2048;                    // >= window_length

  int hop() const;                          // validates integrality
  int bins() const { return fft_length / 2 + 1; }
};

// Magnitude/phase pair of a short-time Fourier transform. Frame t covers
// samples [t*hop, t*hop + window_length).
struct Spectrogram {
  Eigen::MatrixXd magnitude;  // F x T, non-negative
  Eigen::MatrixXd phase;      // F x T, radians
  StftConfig config;
  double sample_rate = 0.0;

  Eigen::Index bins() const { return magnitude.rows(); }
  Eigen::Index frames() const { return magnitude.cols(); }
};

// Entrywise gain in [0, 1]; a family produced by one separation is a
// partition of unity.
struct Mask {
  Eigen::MatrixXd values;  // F x T
};

std::vector<double> make_window(WindowKind kind, int length);
WindowKind window_kind_from_name(const std::string& name);
std::string window_kind_name(WindowKind kind);

// Worst-case interior deviation of the squared-window overlap-add profile
// from its design constant (0 for a COLA-compliant configuration).
double cola_deviation(const StftConfig& cfg);

// Analysis. The trailing samples that do not fill a whole window are
// dropped; input must cover at least one window.
Spectrogram stft(const AudioBuffer& buf, const StftConfig& cfg, double sample_rate = 0.0);

// Weighted overlap-add synthesis with per-sample window-power
// normalization; reconstructs the analyzed region of an unmodified
// spectrogram to rounding error.
AudioBuffer istft(const Spectrogram& spec);

// Entrywise product on the magnitude; phase is carried through.
Spectrogram apply_mask(const Spectrogram& spec, const Mask& mask);

// Soft masks per block: mask_b = (W_b H_b) / sum_b (W_b H_b), denominator
// floored at 1e-12. The returned family sums to one entrywise.
std::map<std::string, Mask> build_masks(const Dictionary& dict, const Activations& act);

// Number of analysis frames for a given sample count (0 if too short).
Eigen::Index stft_frame_count(std::size_t samples, const StftConfig& cfg);

// Length of the analyzed region: (T-1)*hop + window_length.
std::size_t analyzed_length(Eigen::Index frames, const StftConfig& cfg);

}  // namespace hlsep

#endif  // HLSEP_SPECTRAL_HPP
