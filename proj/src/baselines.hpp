// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_BASELINES_HPP
#define HLSEP_BASELINES_HPP

#include "nmcf.hpp"

namespace hlsep {

struct BaselineConfig {
  NmfConfig nmf;
  int shah_components = 20;
  int cq_components = 119;
  int cq_heart_components = 55;   // highest-scoring components assigned to heart
  double rolloff_fraction = 0.85;
  double heart_band_low = 50.0;   // Hz, component seeding bands
  double heart_band_high = 250.0;
  double lung_band_low = 250.0;
  double lung_band_high = 1000.0;
  double gate_halfwidth = 0.05;   // seconds, temporal-correlation gate
};

// Per-component clustering criteria; `combined` sums the min-max
// normalized criteria with roll-off inverted (low roll-off reads as
// heart-like).
struct ClusterCriteria {
  Eigen::VectorXd spectral_correlation;
  Eigen::VectorXd temporal_correlation;
  Eigen::VectorXd rolloff_hz;
  Eigen::VectorXd combined;
};

// Maximum Pearson correlation between a basis column and the database
// items' time-averaged magnitude spectra. Constant inputs score 0.
double spectral_correlation(const Eigen::VectorXd& basis, const ExemplarDb& heart_db);

// Pearson correlation between a component's activation row and a
// per-frame heart-beat gate.
double temporal_correlation(const Eigen::VectorXd& activation, const Eigen::VectorXd& gate);

// Lowest frequency below which the column accumulates `fraction` of its
// energy; all-zero columns return Nyquist.
double spectral_rolloff(const Eigen::VectorXd& basis, double fraction,
                        double sample_rate, int fft_length);

ClusterCriteria compute_cluster_criteria(const Dictionary& dict, const Activations& act,
                                         const ExemplarDb& heart_db,
                                         const Eigen::VectorXd& gate,
                                         double rolloff_fraction, double sample_rate,
                                         int fft_length);

// Min-max normalizes each criterion across components and sums them with
// the roll-off inverted; invariant under positive affine rescaling of any
// single raw criterion.
Eigen::VectorXd combine_criteria(const Eigen::VectorXd& spectral_corr,
                                 const Eigen::VectorXd& temporal_corr,
                                 const Eigen::VectorXd& rolloff_hz);

// Blind factorisation with band-seeded iterative clustering of the
// components into heart and lung (cluster references tracked as member
// means, cosine similarity). Every component is assigned; the two masks
// partition the mixture.
SeparationResult shah_separate(const AudioBuffer& mixture, const BaselineConfig& cfg,
                               const StftConfig& stft_cfg);

// Blind factorisation scored by the three clustering criteria against a
// clean heart reference database; the top-scoring components become the
// heart block, the remainder lung.
SeparationResult cq_separate(const AudioBuffer& mixture, const AudioDb& heart_db,
                             const BaselineConfig& cfg, const StftConfig& stft_cfg);

}  // namespace hlsep

#endif  // HLSEP_BASELINES_HPP
