// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_NMCF_HPP
#define HLSEP_NMCF_HPP

#include <map>
#include <string>
#include <vector>

#include "nmf.hpp"
#include "spectral.hpp"

namespace hlsep {

// One reference recording: magnitude spectrogram, quality weight in
// [0, 1], free-form label.
struct Exemplar {
  Eigen::MatrixXd magnitude;
  double lambda = 1.0;
  std::string label;
};

struct ExemplarDb {
  std::vector<Exemplar> items;
  bool empty() const { return items.empty(); }
};

// Audio-level database entry; spectrograms are derived at separation time
// with the mixture's analysis config.
struct AudioExemplar {
  AudioBuffer audio;
  double lambda = 1.0;
  std::string label;
};

struct AudioDb {
  std::vector<AudioExemplar> items;
  bool empty() const { return items.empty(); }
};

enum class NmcfMode { kCofactorise, kSupervised, kSemiSupervised };

struct NmcfConfig {
  NmfConfig nmf;
  int heart_components = 20;
  int lung_components = 20;
  int noise_components = 10;
  // Surplus L1 weight on the mixture activations of blocks without an
  // exemplar anchor (the unsupervised noise block; in semi-supervised
  // mode every untrained block). A free atom then has to out-explain the
  // anchored blocks by a margin before it holds activation, which keeps
  // in-model sources out of the free stems. 0 is the plain joint update.
  double noise_sparsity = 0.0;
  NmcfMode mode = NmcfMode::kCofactorise;
};

// Factors produced by a joint run. Exemplar activations follow database
// item order.
struct CofactorizeResult {
  Dictionary dictionary;
  Activations mixture_activations;
  std::vector<Eigen::MatrixXd> heart_activations;
  std::vector<Eigen::MatrixXd> lung_activations;
  std::vector<CostPoint> trace;  // joint objective; trace[0] = initial value
  int monotonicity_warnings = 0;
};

struct SeparationResult {
  std::map<std::string, AudioBuffer> stems;  // one per dictionary block
  std::map<std::string, Mask> masks;
  Dictionary dictionary;
  Activations mixture_activations;
  std::vector<CostPoint> trace;
  int monotonicity_warnings = 0;
  StftConfig stft_config;
  NmcfConfig nmcf_config;
  double sample_rate = 0.0;
};

// Joint factorisation of the mixture with weighted heart/lung exemplar
// databases and an unsupervised noise block. Per iteration: mixture
// activations step against the full dictionary, each exemplar's
// activations step against its block, then every block steps once from a
// shared reconstruction, pooling the mixture statistics with the
// lambda-weighted exemplar statistics, and is renormalized. With all
// lambda = 0 the run reproduces a blind three-block factorize seed for
// seed, bit for bit.
CofactorizeResult cofactorize(const Eigen::MatrixXd& mixture_magnitude,
                              const ExemplarDb& heart_db, const ExemplarDb& lung_db,
                              const NmcfConfig& cfg);

// Two-phase supervised NMF: heart and lung dictionaries learned from
// their databases (exemplars concatenated along time), then frozen while
// only the mixture activations update. `noise_components` adds an
// optional free block (0 reproduces the classic fully supervised layout).
CofactorizeResult supervised_nmf(const Eigen::MatrixXd& mixture_magnitude,
                                 const ExemplarDb& heart_db, const ExemplarDb& lung_db,
                                 const NmcfConfig& cfg, int noise_components = 0);

// Heart dictionary trained then frozen; lung and noise blocks stay free
// and fit the mixture blind.
CofactorizeResult semi_supervised_nmf(const Eigen::MatrixXd& mixture_magnitude,
                                      const ExemplarDb& heart_db, const NmcfConfig& cfg);

// Full pipeline: analysis, joint factorisation (mode from cfg), soft
// masks, synthesis of one stem per block with the mixture phase.
SeparationResult separate(const AudioBuffer& mixture, const AudioDb& heart_db,
                          const AudioDb& lung_db, const NmcfConfig& cfg,
                          const StftConfig& stft_cfg);

// Analysis-config helper shared by separate() and the baselines.
ExemplarDb transform_db(const AudioDb& db, const StftConfig& stft_cfg, double expect_rate);

namespace detail {

// One dictionary block of the joint problem.
struct EngineBlock {
  std::string name;
  Eigen::Index count = 0;
  bool fixed = false;                     // frozen dictionary columns
  Eigen::MatrixXd initial;                // required when fixed
  const std::vector<Exemplar>* exemplars = nullptr;
  double extra_sparsity = 0.0;            // surplus L1 on this block's mixture rows
};

struct EngineResult {
  Dictionary dictionary;
  Activations mixture_activations;
  std::vector<std::vector<Eigen::MatrixXd>> exemplar_activations;  // per block, per item
  std::vector<CostPoint> trace;
  int monotonicity_warnings = 0;
};

EngineResult run_engine(const Eigen::MatrixXd& V, const std::vector<EngineBlock>& blocks,
                        const NmfConfig& cfg);

}  // namespace detail

}  // namespace hlsep

#endif  // HLSEP_NMCF_HPP
