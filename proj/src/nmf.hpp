// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef HLSEP_NMF_HPP
#define HLSEP_NMF_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace hlsep {

// A named contiguous run of components inside a factorisation. Dictionary
// columns and activation rows share the same partition.
struct Block {
  std::string name;
  Eigen::Index count = 0;
};

// Non-negative basis matrix W (F x K) with its column partition.
struct Dictionary {
  Eigen::MatrixXd m;  // F x K
  std::vector<Block> blocks;

  Eigen::Index components() const { return m.cols(); }
  Eigen::Index bins() const { return m.rows(); }
  // First column of the named block; count returned through `count`.
  Eigen::Index block_start(const std::string& name, Eigen::Index* count = nullptr) const;
};

// Non-negative activation matrix H (K x T), rows partitioned like the
// dictionary columns.
struct Activations {
  Eigen::MatrixXd m;  // K x T
  std::vector<Block> blocks;
};

struct NmfConfig {
  double beta = 1.0;        // divergence order; 1 = Kullback-Leibler
  double sparsity = 0.001;  // L1 weight on activations
  int max_iter = 500;
  std::uint64_t seed = 0;
  double floor = 1e-12;     // clamp applied to factors and reconstructions
  double tol = 0.0;         // relative cost-decrease stop; 0 disables
};

// One objective evaluation. `total` is the sum of the other fields.
struct CostPoint {
  double total = 0.0;
  double divergence = 0.0;          // D_beta(V | W H)
  double sparsity = 0.0;            // mu * ||H||_1
  double exemplar_divergence = 0.0; // lambda-weighted exemplar fit terms
  double exemplar_sparsity = 0.0;   // mu * ||H_i||_1 over exemplars
};

struct FactorizeResult {
  Dictionary dictionary;
  Activations activations;
  std::vector<CostPoint> trace;  // trace[0] = initial cost, then one per iteration
  int monotonicity_warnings = 0; // cost increases beyond slack (possible with sparsity > 0)
};

// Scalar beta-divergence d_beta(x | y), case-selected on beta with the
// usual continuous extensions at x = 0.
double beta_divergence(double x, double y, double beta);

// Sum of entrywise divergences between V and (W * H) plus the L1 penalty
// on H. The dictionary is expected column-normalized.
CostPoint total_cost(const Eigen::MatrixXd& V, const Dictionary& dict,
                     const Activations& act, const NmfConfig& cfg);

// One multiplicative update of H against a fixed normalized dictionary.
// `row_penalty` (optional, length K) adds a per-row surplus L1 weight on
// top of cfg.sparsity; zero entries leave the update arithmetic
// bit-identical to the unpenalized form.
Activations update_activations(const Eigen::MatrixXd& V, const Dictionary& dict,
                               const Activations& act, const NmfConfig& cfg,
                               const Eigen::VectorXd* row_penalty = nullptr);

// One multiplicative update of every dictionary block (shared
// reconstruction, computed once) followed by column normalization.
Dictionary update_dictionary(const Eigen::MatrixXd& V, const Dictionary& dict,
                             const Activations& act, const NmfConfig& cfg);

// Divides each column by its L2 norm; columns with vanishing norm become
// uniform with value 1/sqrt(F).
Dictionary normalize_columns(const Dictionary& dict);

// Alternating multiplicative updates until max_iter or the relative cost
// decrease falls below tol. Blocked overload keeps a named partition
// through the run; the plain overload uses a single block.
FactorizeResult factorize(const Eigen::MatrixXd& V, const std::vector<Block>& blocks,
                          const NmfConfig& cfg);
FactorizeResult factorize(const Eigen::MatrixXd& V, Eigen::Index k, const NmfConfig& cfg);

class Rng;

// --- shared update machinery (used by the co-factoriser as well) ---
namespace detail {

// Elementwise power with exact fast paths for exponents -1, 0, 1.
Eigen::MatrixXd elementwise_pow(const Eigen::MatrixXd& m, double p);

// Multiplicative-update statistics for a dictionary block: the attraction
// term P = (Lambda^(beta-2) o V) H_b^T and repulsion term
// Q = Lambda^(beta-1) H_b^T, both F x k.
void dictionary_block_stats(const Eigen::MatrixXd& V, const Eigen::MatrixXd& lambda_rec,
                            const Eigen::MatrixXd& h_block, double beta,
                            Eigen::MatrixXd* p_out, Eigen::MatrixXd* q_out);

// Applies the normalized-dictionary multiplicative ratio with the column
// self-coupling correction terms, then floors.
Eigen::MatrixXd apply_dictionary_update(const Eigen::MatrixXd& w_block,
                                        const Eigen::MatrixXd& p,
                                        const Eigen::MatrixXd& q, double floor);

// Seeded uniform (0, 1] fill, row-major order.
void fill_uniform(Eigen::MatrixXd* m, Rng& rng);

Eigen::MatrixXd floored_product(const Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                                double floor);

}  // namespace detail

}  // namespace hlsep

#endif  // HLSEP_NMF_HPP
