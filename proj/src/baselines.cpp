// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "metrics.hpp"

namespace hlsep {

namespace {

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  if (n != y.size() || n < 2) return 0.0;
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::VectorXd cx = x.array() - mx;
  const Eigen::VectorXd cy = y.array() - my;
  const double sx = cx.norm();
  const double sy = cy.norm();
  // degenerate variance convention; threshold relative to the mean so a
  // numerically constant vector still counts as flat
  const double tiny_x = 1e-12 * std::max(1.0, std::abs(mx) * std::sqrt(static_cast<double>(n)));
  const double tiny_y = 1e-12 * std::max(1.0, std::abs(my) * std::sqrt(static_cast<double>(n)));
  if (sx < tiny_x || sy < tiny_y) return 0.0;
  return cx.dot(cy) / (sx * sy);
}

double cosine_similarity(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx < 1e-15 || ny < 1e-15) return 0.0;
  return x.dot(y) / (nx * ny);
}

// Sum of squared column entries over a frequency band.
double band_power(const Eigen::VectorXd& basis, double lo_hz, double hi_hz,
                  double sample_rate, int fft_length) {
  const double bin_hz = sample_rate / fft_length;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const double f = k * bin_hz;
    if (f >= lo_hz && f < hi_hz) acc += basis(k) * basis(k);
  }
  return acc;
}

Eigen::VectorXd min_max_normalize(const Eigen::VectorXd& v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi - lo < 1e-15) return Eigen::VectorXd::Constant(v.size(), 0.5);
  return (v.array() - lo) / (hi - lo);
}

// Rebuilds the factorisation with the given component order and a
// two-block heart|lung partition.
void reorder_two_blocks(const FactorizeResult& fr, const std::vector<Eigen::Index>& heart,
                        const std::vector<Eigen::Index>& lung, Dictionary* dict,
                        Activations* act) {
  const Eigen::Index k = fr.dictionary.m.cols();
  require(static_cast<Eigen::Index>(heart.size() + lung.size()) == k,
          ErrorCode::kShapeMismatch, "cluster assignment does not cover all components");
  dict->blocks = {Block{"heart", static_cast<Eigen::Index>(heart.size())},
                  Block{"lung", static_cast<Eigen::Index>(lung.size())}};
  act->blocks = dict->blocks;
  dict->m.resize(fr.dictionary.m.rows(), k);
  act->m.resize(k, fr.activations.m.cols());
  Eigen::Index at = 0;
  for (Eigen::Index c : heart) {
    dict->m.col(at) = fr.dictionary.m.col(c);
    act->m.row(at) = fr.activations.m.row(c);
    ++at;
  }
  for (Eigen::Index c : lung) {
    dict->m.col(at) = fr.dictionary.m.col(c);
    act->m.row(at) = fr.activations.m.row(c);
    ++at;
  }
}

SeparationResult assemble(const Spectrogram& spec, Dictionary dict, Activations act,
                          const FactorizeResult& fr, const StftConfig& stft_cfg,
                          double sample_rate) {
  SeparationResult res;
  res.masks = build_masks(dict, act);
  for (const auto& [name, mask] : res.masks) {
    res.stems.emplace(name, istft(apply_mask(spec, mask)));
  }
  res.dictionary = std::move(dict);
  res.mixture_activations = std::move(act);
  res.trace = fr.trace;
  res.monotonicity_warnings = fr.monotonicity_warnings;
  res.stft_config = stft_cfg;
  res.sample_rate = sample_rate;
  return res;
}

}  // namespace

double spectral_correlation(const Eigen::VectorXd& basis, const ExemplarDb& heart_db) {
  require(!heart_db.empty(), ErrorCode::kEmptyDatabase,
          "spectral correlation needs a reference database");
  double best = -1.0;
  for (const Exemplar& e : heart_db.items) {
    require(e.magnitude.rows() == basis.size(), ErrorCode::kShapeMismatch,
            "database spectrum size does not match basis");
    const Eigen::VectorXd mean_spectrum = e.magnitude.rowwise().mean();
    best = std::max(best, pearson(basis, mean_spectrum));
  }
  return best;
}

double temporal_correlation(const Eigen::VectorXd& activation, const Eigen::VectorXd& gate) {
  require(activation.size() == gate.size(), ErrorCode::kShapeMismatch,
          "activation/gate frame counts differ");
  return pearson(activation, gate);
}

double spectral_rolloff(const Eigen::VectorXd& basis, double fraction,
                        double sample_rate, int fft_length) {
  require(fraction > 0.0 && fraction < 1.0, ErrorCode::kBadArgument,
          "roll-off fraction must lie in (0, 1)");
  const double total = basis.squaredNorm();
  const double nyquist = 0.5 * sample_rate;
  if (total <= 0.0) return nyquist;
  const double bin_hz = sample_rate / fft_length;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    acc += basis(k) * basis(k);
    if (acc >= fraction * total) return k * bin_hz;
  }
  return nyquist;
}

ClusterCriteria compute_cluster_criteria(const Dictionary& dict, const Activations& act,
                                         const ExemplarDb& heart_db,
                                         const Eigen::VectorXd& gate,
                                         double rolloff_fraction, double sample_rate,
                                         int fft_length) {
  const Eigen::Index k = dict.m.cols();
  ClusterCriteria crit;
  crit.spectral_correlation.resize(k);
  crit.temporal_correlation.resize(k);
  crit.rolloff_hz.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    crit.spectral_correlation(c) = spectral_correlation(dict.m.col(c), heart_db);
    crit.temporal_correlation(c) = temporal_correlation(act.m.row(c).transpose(), gate);
    crit.rolloff_hz(c) = spectral_rolloff(dict.m.col(c), rolloff_fraction, sample_rate,
                                          fft_length);
  }
  crit.combined =
      combine_criteria(crit.spectral_correlation, crit.temporal_correlation, crit.rolloff_hz);
  return crit;
}

Eigen::VectorXd combine_criteria(const Eigen::VectorXd& spectral_corr,
                                 const Eigen::VectorXd& temporal_corr,
                                 const Eigen::VectorXd& rolloff_hz) {
  return min_max_normalize(spectral_corr) + min_max_normalize(temporal_corr) +
         (1.0 - min_max_normalize(rolloff_hz).array()).matrix();
}

SeparationResult shah_separate(const AudioBuffer& mixture, const BaselineConfig& cfg,
                               const StftConfig& stft_cfg) {
  const Spectrogram spec = stft(mixture, stft_cfg);
  const FactorizeResult fr =
      factorize(spec.magnitude, static_cast<Eigen::Index>(cfg.shah_components), cfg.nmf);
  const Eigen::Index k = fr.dictionary.m.cols();
  require(k >= 2, ErrorCode::kBadArgument, "clustering needs at least two components");

  // Component band power: basis-band energy scaled by the activation
  // energy, so "strongest in band" reflects reconstruction power rather
  // than basis shape alone.
  Eigen::VectorXd heart_power(k), lung_power(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double act = fr.activations.m.row(c).squaredNorm();
    heart_power(c) = act * band_power(fr.dictionary.m.col(c), cfg.heart_band_low,
                                      cfg.heart_band_high, mixture.sample_rate,
                                      stft_cfg.fft_length);
    lung_power(c) = act * band_power(fr.dictionary.m.col(c), cfg.lung_band_low,
                                     cfg.lung_band_high, mixture.sample_rate,
                                     stft_cfg.fft_length);
  }

  Eigen::Index seed_h, seed_l;
  heart_power.maxCoeff(&seed_h);
  lung_power.maxCoeff(&seed_l);
  if (seed_h == seed_l) {
    // One component dominates both bands: it keeps the stronger band and
    // the other cluster reseeds from its runner-up.
    const Eigen::Index winner = seed_h;
    Eigen::VectorXd masked = (heart_power(winner) >= lung_power(winner)) ? lung_power : heart_power;
    masked(winner) = -1.0;
    Eigen::Index runner;
    masked.maxCoeff(&runner);
    if (heart_power(winner) >= lung_power(winner)) {
      seed_l = runner;
    } else {
      seed_h = runner;
    }
  }

  std::vector<Eigen::Index> heart{seed_h};
  std::vector<Eigen::Index> lung{seed_l};
  Eigen::VectorXd ref_h = fr.dictionary.m.col(seed_h);
  Eigen::VectorXd ref_l = fr.dictionary.m.col(seed_l);
  std::vector<bool> assigned(static_cast<std::size_t>(k), false);
  assigned[static_cast<std::size_t>(seed_h)] = true;
  assigned[static_cast<std::size_t>(seed_l)] = true;

  for (Eigen::Index round = 2; round < k; ++round) {
    // Best-first: the unassigned component most similar to either
    // reference joins that cluster, then the reference becomes the member
    // mean.
    Eigen::Index best_c = -1;
    bool to_heart = true;
    double best_sim = -2.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      if (assigned[static_cast<std::size_t>(c)]) continue;
      const double sh = cosine_similarity(fr.dictionary.m.col(c), ref_h);
      const double sl = cosine_similarity(fr.dictionary.m.col(c), ref_l);
      if (sh > best_sim) {
        best_sim = sh;
        best_c = c;
        to_heart = true;
      }
      if (sl > best_sim) {
        best_sim = sl;
        best_c = c;
        to_heart = false;
      }
    }
    assigned[static_cast<std::size_t>(best_c)] = true;
    std::vector<Eigen::Index>& cluster = to_heart ? heart : lung;
    cluster.push_back(best_c);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(fr.dictionary.m.rows());
    for (Eigen::Index m : cluster) mean += fr.dictionary.m.col(m);
    mean /= static_cast<double>(cluster.size());
    (to_heart ? ref_h : ref_l) = mean;
  }

  std::sort(heart.begin(), heart.end());
  std::sort(lung.begin(), lung.end());
  Dictionary dict;
  Activations act;
  reorder_two_blocks(fr, heart, lung, &dict, &act);
  return assemble(spec, std::move(dict), std::move(act), fr, stft_cfg, mixture.sample_rate);
}

SeparationResult cq_separate(const AudioBuffer& mixture, const AudioDb& heart_db,
                             const BaselineConfig& cfg, const StftConfig& stft_cfg) {
  require(!heart_db.empty(), ErrorCode::kEmptyDatabase,
          "clustering baseline needs a heart reference database");
  const Spectrogram spec = stft(mixture, stft_cfg);
  const ExemplarDb db = transform_db(heart_db, stft_cfg, mixture.sample_rate);

  const FactorizeResult fr =
      factorize(spec.magnitude, static_cast<Eigen::Index>(cfg.cq_components), cfg.nmf);
  const Eigen::Index k = fr.dictionary.m.cols();
  require(cfg.cq_heart_components > 0 && cfg.cq_heart_components < cfg.cq_components,
          ErrorCode::kBadArgument, "heart component count must split the decomposition");

  MetricsConfig mcfg;
  mcfg.gate_halfwidth = cfg.gate_halfwidth;
  const RateEstimate beats = heart_rate(mixture, mcfg);
  const Eigen::VectorXd gate = beat_frame_gate(beats.event_times, spec.frames(), stft_cfg,
                                               mixture.sample_rate, cfg.gate_halfwidth);

  const ClusterCriteria crit =
      compute_cluster_criteria(fr.dictionary, fr.activations, db, gate, cfg.rolloff_fraction,
                               mixture.sample_rate, stft_cfg.fft_length);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (crit.combined(a) != crit.combined(b)) return crit.combined(a) > crit.combined(b);
    return crit.rolloff_hz(a) < crit.rolloff_hz(b);
  });

  std::vector<Eigen::Index> heart(order.begin(), order.begin() + cfg.cq_heart_components);
  std::vector<Eigen::Index> lung(order.begin() + cfg.cq_heart_components, order.end());
  std::sort(heart.begin(), heart.end());
  std::sort(lung.begin(), lung.end());

  Dictionary dict;
  Activations act;
  reorder_two_blocks(fr, heart, lung, &dict, &act);
  return assemble(spec, std::move(dict), std::move(act), fr, stft_cfg, mixture.sample_rate);
}

}  // namespace hlsep
