// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "nmf.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"
#include "rng.hpp"

namespace hlsep {

Eigen::Index Dictionary::block_start(const std::string& name, Eigen::Index* count) const {
  Eigen::Index start = 0;
  for (const Block& b : blocks) {
    if (b.name == name) {
      if (count) *count = b.count;
      return start;
    }
    start += b.count;
  }
  fail(ErrorCode::kBadArgument, "no block named '" + name + "'");
}

namespace {

Eigen::Index total_components(const std::vector<Block>& blocks) {
  Eigen::Index k = 0;
  for (const Block& b : blocks) k += b.count;
  return k;
}

void check_blocks(const Dictionary& dict, const Activations& act) {
  require(dict.blocks.size() == act.blocks.size(), ErrorCode::kShapeMismatch,
          "dictionary and activations disagree on block count");
  for (std::size_t i = 0; i < dict.blocks.size(); ++i) {
    require(dict.blocks[i].name == act.blocks[i].name &&
                dict.blocks[i].count == act.blocks[i].count,
            ErrorCode::kShapeMismatch, "dictionary/activation block mismatch");
  }
  require(dict.m.cols() == act.m.rows(), ErrorCode::kShapeMismatch,
          "dictionary columns != activation rows");
  require(total_components(dict.blocks) == dict.m.cols(), ErrorCode::kShapeMismatch,
          "block counts do not sum to component count");
}

}  // namespace

namespace detail {

Eigen::MatrixXd elementwise_pow(const Eigen::MatrixXd& m, double p) {
  if (p == 0.0) return Eigen::MatrixXd::Ones(m.rows(), m.cols());
  if (p == 1.0) return m;
  if (p == -1.0) return m.cwiseInverse();
  return m.array().pow(p).matrix();
}

Eigen::MatrixXd floored_product(const Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                                double floor) {
  Eigen::MatrixXd lambda = w * h;
  lambda = lambda.cwiseMax(floor);
  return lambda;
}

void dictionary_block_stats(const Eigen::MatrixXd& V, const Eigen::MatrixXd& lambda_rec,
                            const Eigen::MatrixXd& h_block, double beta,
                            Eigen::MatrixXd* p_out, Eigen::MatrixXd* q_out) {
  // P = (Lambda^(beta-2) o V) H^T, Q = Lambda^(beta-1) H^T. The beta = 1
  // repulsion collapses to a broadcast of H row sums.
  if (beta == 1.0) {
    p_out->noalias() = V.cwiseQuotient(lambda_rec) * h_block.transpose();
    const Eigen::VectorXd row_sums = h_block.rowwise().sum();
    q_out->noalias() = Eigen::VectorXd::Ones(V.rows()) * row_sums.transpose();
  } else {
    const Eigen::MatrixXd lp2 = elementwise_pow(lambda_rec, beta - 2.0);
    p_out->noalias() = lp2.cwiseProduct(V) * h_block.transpose();
    q_out->noalias() = elementwise_pow(lambda_rec, beta - 1.0) * h_block.transpose();
  }
}

Eigen::MatrixXd apply_dictionary_update(const Eigen::MatrixXd& w_block,
                                        const Eigen::MatrixXd& p,
                                        const Eigen::MatrixXd& q, double floor) {
  // Normalized-dictionary ratio: the rank-one terms re-inject each
  // column's own gradient mass so the subsequent renormalization cannot
  // undo the step.
  const Eigen::RowVectorXd sq = (w_block.cwiseProduct(q)).colwise().sum();
  const Eigen::RowVectorXd sp = (w_block.cwiseProduct(p)).colwise().sum();
  const Eigen::MatrixXd num = p + w_block.cwiseProduct(
      Eigen::VectorXd::Ones(w_block.rows()) * sq);
  const Eigen::MatrixXd dem = q + w_block.cwiseProduct(
      Eigen::VectorXd::Ones(w_block.rows()) * sp);
  Eigen::MatrixXd out = w_block.cwiseProduct(num.cwiseQuotient(dem.cwiseMax(floor)));
  return out.cwiseMax(floor);
}

void fill_uniform(Eigen::MatrixXd* m, Rng& rng) {
  for (Eigen::Index r = 0; r < m->rows(); ++r) {
    for (Eigen::Index c = 0; c < m->cols(); ++c) {
      (*m)(r, c) = rng.uniform_pos();
    }
  }
}

}  // namespace detail

double beta_divergence(double x, double y, double beta) {
  require(std::isfinite(x) && std::isfinite(y), ErrorCode::kNumeric,
          "beta_divergence requires finite inputs");
  require(y > 0.0 && x >= 0.0, ErrorCode::kBadArgument,
          "beta_divergence requires x >= 0, y > 0");
  if (beta == 1.0) {
    const double xlog = x > 0.0 ? x * (std::log(x) - std::log(y)) : 0.0;
    return xlog + (y - x);
  }
  if (beta == 0.0) {
    if (x == 0.0) return std::numeric_limits<double>::infinity();
    const double r = x / y;
    return r - std::log(r) - 1.0;
  }
  const double xb = std::pow(x, beta);
  const double yb = std::pow(y, beta);
  return (xb - yb - beta * std::pow(y, beta - 1.0) * (x - y)) / (beta * (beta - 1.0));
}

CostPoint total_cost(const Eigen::MatrixXd& V, const Dictionary& dict,
                     const Activations& act, const NmfConfig& cfg) {
  check_blocks(dict, act);
  require(V.rows() == dict.m.rows() && V.cols() == act.m.cols(),
          ErrorCode::kShapeMismatch, "cost: V shape does not match factors");

  const Eigen::MatrixXd lambda = detail::floored_product(dict.m, act.m, cfg.floor);
  double div = 0.0;
  if (cfg.beta == 1.0) {
    // Loop form keeps the x log x extension exact at zero entries.
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
      for (Eigen::Index r = 0; r < V.rows(); ++r) {
        const double x = V(r, c);
        const double y = lambda(r, c);
        div += (x > 0.0 ? x * (std::log(x) - std::log(y)) : 0.0) + (y - x);
      }
    }
  } else {
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
      for (Eigen::Index r = 0; r < V.rows(); ++r) {
        div += beta_divergence(V(r, c), lambda(r, c), cfg.beta);
      }
    }
  }
  CostPoint pt;
  pt.divergence = div;
  pt.sparsity = cfg.sparsity * act.m.sum();
  pt.total = pt.divergence + pt.sparsity;
  return pt;
}

Activations update_activations(const Eigen::MatrixXd& V, const Dictionary& dict,
                               const Activations& act, const NmfConfig& cfg,
                               const Eigen::VectorXd* row_penalty) {
  check_blocks(dict, act);
  require(V.rows() == dict.m.rows() && V.cols() == act.m.cols(),
          ErrorCode::kShapeMismatch, "activation update: shape mismatch");
  require(!row_penalty || row_penalty->size() == act.m.rows(), ErrorCode::kShapeMismatch,
          "activation update: penalty length mismatch");

  const Eigen::MatrixXd lambda = detail::floored_product(dict.m, act.m, cfg.floor);
  Eigen::MatrixXd num(act.m.rows(), act.m.cols());
  Eigen::MatrixXd dem(act.m.rows(), act.m.cols());
  if (cfg.beta == 1.0) {
    num.noalias() = dict.m.transpose() * V.cwiseQuotient(lambda);
    const Eigen::VectorXd col_sums = dict.m.colwise().sum();
    dem.noalias() = col_sums * Eigen::RowVectorXd::Ones(act.m.cols());
  } else {
    num.noalias() = dict.m.transpose() *
                    detail::elementwise_pow(lambda, cfg.beta - 2.0).cwiseProduct(V);
    dem.noalias() = dict.m.transpose() * detail::elementwise_pow(lambda, cfg.beta - 1.0);
  }
  dem.array() += cfg.sparsity;
  if (row_penalty) {
    dem.colwise() += *row_penalty;
  }

  Activations out = act;
  out.m = act.m.cwiseProduct(num.cwiseQuotient(dem.cwiseMax(cfg.floor)));
  out.m = out.m.cwiseMax(cfg.floor);
  return out;
}

Dictionary update_dictionary(const Eigen::MatrixXd& V, const Dictionary& dict,
                             const Activations& act, const NmfConfig& cfg) {
  check_blocks(dict, act);
  require(V.rows() == dict.m.rows() && V.cols() == act.m.cols(),
          ErrorCode::kShapeMismatch, "dictionary update: shape mismatch");

  // One reconstruction shared by every block: all columns step from the
  // same point, matching the co-factoriser's pooled update exactly.
  const Eigen::MatrixXd lambda = detail::floored_product(dict.m, act.m, cfg.floor);

  Dictionary out = dict;
  Eigen::Index start = 0;
  for (const Block& b : dict.blocks) {
    if (b.count > 0) {
      const auto w_block = dict.m.middleCols(start, b.count);
      const auto h_block = act.m.middleRows(start, b.count);
      Eigen::MatrixXd p, q;
      detail::dictionary_block_stats(V, lambda, h_block, cfg.beta, &p, &q);
      out.m.middleCols(start, b.count) =
          detail::apply_dictionary_update(w_block, p, q, cfg.floor);
    }
    start += b.count;
  }
  return normalize_columns(out);
}

Dictionary normalize_columns(const Dictionary& dict) {
  Dictionary out = dict;
  const Eigen::Index f = dict.m.rows();
  for (Eigen::Index c = 0; c < dict.m.cols(); ++c) {
    const double norm = dict.m.col(c).norm();
    if (norm < 1e-12) {
      out.m.col(c).setConstant(1.0 / std::sqrt(static_cast<double>(f)));
    } else {
      out.m.col(c) = dict.m.col(c) / norm;
    }
  }
  return out;
}

FactorizeResult factorize(const Eigen::MatrixXd& V, const std::vector<Block>& blocks,
                          const NmfConfig& cfg) {
  const Eigen::Index k = total_components(blocks);
  require(k >= 1, ErrorCode::kBadArgument, "factorize requires at least one component");
  require(V.minCoeff() >= 0.0, ErrorCode::kBadArgument, "factorize requires non-negative V");
  require(cfg.max_iter >= 1, ErrorCode::kBadArgument, "max_iter must be positive");

  // Activations drawn before the dictionary; per-block machinery relies on
  // this order for seed-for-seed agreement with the co-factoriser.
  Rng rng(cfg.seed);
  Activations act;
  act.blocks = blocks;
  act.m.resize(k, V.cols());
  detail::fill_uniform(&act.m, rng);

  Dictionary dict;
  dict.blocks = blocks;
  dict.m.resize(V.rows(), k);
  detail::fill_uniform(&dict.m, rng);
  dict = normalize_columns(dict);

  FactorizeResult res;
  res.trace.reserve(static_cast<std::size_t>(cfg.max_iter) + 1);
  res.trace.push_back(total_cost(V, dict, act, cfg));

  for (int it = 0; it < cfg.max_iter; ++it) {
    act = update_activations(V, dict, act, cfg);
    dict = update_dictionary(V, dict, act, cfg);
    const CostPoint cost = total_cost(V, dict, act, cfg);
    const double prev_total = res.trace.back().total;
    if (cost.total > prev_total + 1e-9 * (1.0 + std::abs(prev_total))) {
      ++res.monotonicity_warnings;
    }
    res.trace.push_back(cost);
    if (cfg.tol > 0.0) {
      const double drop = prev_total - cost.total;
      if (drop >= 0.0 && drop < cfg.tol * std::max(std::abs(prev_total), 1e-30)) break;
    }
  }

  res.dictionary = std::move(dict);
  res.activations = std::move(act);
  return res;
}

FactorizeResult factorize(const Eigen::MatrixXd& V, Eigen::Index k, const NmfConfig& cfg) {
  return factorize(V, {Block{"all", k}}, cfg);
}

}  // namespace hlsep
