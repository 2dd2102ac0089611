// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <cstring>

#include "error.hpp"
#include "nmf.hpp"
#include "oracles.hpp"

using namespace hlsep;

namespace {

Dictionary make_dict(const Eigen::MatrixXd& m, std::vector<Block> blocks = {}) {
  Dictionary d;
  d.m = m;
  d.blocks = blocks.empty() ? std::vector<Block>{Block{"all", m.cols()}} : std::move(blocks);
  return normalize_columns(d);
}

Activations make_act(const Eigen::MatrixXd& m, std::vector<Block> blocks = {}) {
  Activations a;
  a.m = m;
  a.blocks = blocks.empty() ? std::vector<Block>{Block{"all", m.rows()}} : std::move(blocks);
  return a;
}

}  // namespace

TEST_CASE("beta_divergence closed forms") {
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    CHECK(beta_divergence(0.7, 0.7, beta) == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(std::abs(beta_divergence(2.0, 1.0, 2.0) - 0.5) < 1e-12);
  CHECK(std::abs(beta_divergence(1.0, 2.0, 0.0) - (std::log(2.0) - 0.5)) < 1e-12);
  // Euclidean case reduces to (x-y)^2/2 everywhere
  CHECK(std::abs(beta_divergence(3.0, 1.5, 2.0) - 0.5 * 1.5 * 1.5) < 1e-12);
  // KL at x = 0 extends to y
  CHECK(beta_divergence(0.0, 0.3, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("beta_divergence agrees with the scalar oracle on random inputs") {
  std::uint64_t state = 42;
  for (int i = 0; i < 200; ++i) {
    const double x = oracle::uniform01(state) * 3.0;
    const double y = 0.05 + oracle::uniform01(state) * 3.0;
    for (double beta : {0.5, 1.0, 1.3, 2.0}) {
      const double got = beta_divergence(x, y, beta);
      const double want = oracle::beta_div_ref(x, y, beta);
      CHECK(std::abs(got - want) <= 1e-9 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("beta_divergence input validation") {
  CHECK_THROWS_AS(beta_divergence(std::nan(""), 1.0, 1.0), Error);
  CHECK_THROWS_AS(beta_divergence(1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(beta_divergence(-1.0, 1.0, 2.0), Error);
}

TEST_CASE("total_cost of an exact factorisation") {
  const Dictionary dict = make_dict(oracle::random_matrix(8, 3, 1));
  const Activations act = make_act(oracle::random_matrix(3, 6, 2));
  const Eigen::MatrixXd v = dict.m * act.m;

  NmfConfig cfg;
  cfg.sparsity = 0.0;
  CHECK(total_cost(v, dict, act, cfg).total <= 1e-12);

  cfg.sparsity = 0.001;
  const CostPoint pt = total_cost(v, dict, act, cfg);
  CHECK(pt.sparsity == doctest::Approx(0.001 * act.m.sum()).epsilon(1e-12));
  CHECK(pt.total == doctest::Approx(0.001 * act.m.sum()).epsilon(1e-9));
}

TEST_CASE("total_cost matches the scalar-loop oracle") {
  const Dictionary dict = make_dict(oracle::random_matrix(8, 3, 3));
  const Activations act = make_act(oracle::random_matrix(3, 6, 4));
  const Eigen::MatrixXd v = oracle::random_matrix(8, 6, 5);
  for (double beta : {0.5, 1.0, 2.0}) {
    NmfConfig cfg;
    cfg.beta = beta;
    cfg.sparsity = 0.001;
    const double got = total_cost(v, dict, act, cfg).total;
    const double want =
        oracle::total_cost_ref(v, dict.m, act.m, beta, cfg.sparsity, cfg.floor);
    CHECK(std::abs(got - want) <= 1e-9 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("update_activations fixed point, descent and zero-row behavior") {
  NmfConfig cfg;
  cfg.sparsity = 0.0;

  Dictionary dict = make_dict(oracle::random_matrix(10, 4, 6));
  Activations act = make_act(oracle::random_matrix(4, 7, 7));
  const Eigen::MatrixXd v_exact = dict.m * act.m;

  const Activations fixed = update_activations(v_exact, dict, act, cfg);
  CHECK(((fixed.m - act.m).cwiseAbs().array() / act.m.array()).maxCoeff() < 1e-9);

  const Eigen::MatrixXd v = oracle::random_matrix(10, 7, 8);
  const double before = total_cost(v, dict, act, cfg).total;
  const Activations stepped = update_activations(v, dict, act, cfg);
  const double after = total_cost(v, dict, stepped, cfg).total;
  CHECK(after <= before + 1e-9 * (1.0 + std::abs(before)));
  CHECK(stepped.m.minCoeff() >= cfg.floor);

  // a floored row at an exact factorisation stays at the floor
  Activations with_zero = act;
  with_zero.m.row(2).setConstant(cfg.floor);
  const Eigen::MatrixXd v_zero = dict.m * with_zero.m;
  const Activations kept = update_activations(v_zero, dict, with_zero, cfg);
  CHECK(kept.m.row(2).maxCoeff() <= 2.0 * cfg.floor);
}

TEST_CASE("update_dictionary fixed point, descent and unit columns") {
  NmfConfig cfg;
  cfg.sparsity = 0.0;

  Dictionary dict = make_dict(oracle::random_matrix(10, 4, 9));
  Activations act = make_act(oracle::random_matrix(4, 7, 10));
  const Eigen::MatrixXd v_exact = dict.m * act.m;

  const Dictionary fixed = update_dictionary(v_exact, dict, act, cfg);
  CHECK((fixed.m - dict.m).cwiseAbs().maxCoeff() < 1e-6);

  const Eigen::MatrixXd v = oracle::random_matrix(10, 7, 11);
  const double before = total_cost(v, dict, act, cfg).total;
  const Dictionary stepped = update_dictionary(v, dict, act, cfg);
  const double after = total_cost(v, stepped, act, cfg).total;
  CHECK(after <= before + 1e-9 * (1.0 + std::abs(before)));
  for (Eigen::Index c = 0; c < stepped.m.cols(); ++c) {
    CHECK(std::abs(stepped.m.col(c).norm() - 1.0) < 1e-9);
  }
  CHECK(stepped.m.minCoeff() >= 0.0);
}

TEST_CASE("matrix updates agree with scalar-loop references") {
  for (double beta : {0.5, 1.0, 2.0}) {
    NmfConfig cfg;
    cfg.beta = beta;
    cfg.sparsity = 0.001;
    const Dictionary dict = make_dict(oracle::random_matrix(9, 4, 12));
    const Activations act = make_act(oracle::random_matrix(4, 8, 13));
    const Eigen::MatrixXd v = oracle::random_matrix(9, 8, 14);

    const Activations h_got = update_activations(v, dict, act, cfg);
    const Eigen::MatrixXd h_want =
        oracle::h_update_ref(v, dict.m, act.m, beta, cfg.sparsity, cfg.floor);
    CHECK(((h_got.m - h_want).cwiseAbs().array() / h_want.array()).maxCoeff() < 1e-9);

    const Dictionary w_got = update_dictionary(v, dict, act, cfg);
    const Eigen::MatrixXd w_want = oracle::w_update_ref(v, dict.m, act.m, beta, cfg.floor);
    CHECK(((w_got.m - w_want).cwiseAbs().array() / w_want.array()).maxCoeff() < 1e-9);
  }
}

TEST_CASE("normalize_columns cases") {
  Dictionary d;
  d.blocks = {Block{"all", 1}};
  d.m.resize(2, 1);
  d.m << 3.0, 4.0;
  const Dictionary n = normalize_columns(d);
  CHECK(n.m(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n.m(1, 0) == doctest::Approx(0.8).epsilon(1e-12));

  const Dictionary again = normalize_columns(n);
  CHECK((again.m - n.m).cwiseAbs().maxCoeff() < 1e-9);

  Dictionary z;
  z.blocks = {Block{"all", 1}};
  z.m = Eigen::MatrixXd::Zero(4, 1);
  const Dictionary u = normalize_columns(z);
  for (Eigen::Index f = 0; f < 4; ++f) CHECK(u.m(f, 0) == doctest::Approx(0.5));
}

TEST_CASE("factorize recovers synthetic factorisations") {
  const Eigen::MatrixXd w0 = oracle::random_matrix(12, 3, 15);
  const Eigen::MatrixXd h0 = oracle::random_matrix(3, 10, 16);
  const Eigen::MatrixXd v = w0 * h0;

  NmfConfig cfg;
  cfg.max_iter = 400;
  cfg.sparsity = 0.0;
  const FactorizeResult res = factorize(v, 3, cfg);
  CHECK(res.trace.back().total <= 1e-3 * res.trace.front().total);
  CHECK(res.monotonicity_warnings == 0);
}

TEST_CASE("factorize rank-1 outer product") {
  Eigen::VectorXd a = oracle::random_matrix(10, 1, 17);
  Eigen::VectorXd b = oracle::random_matrix(8, 1, 18);
  const Eigen::MatrixXd v = a * b.transpose();
  NmfConfig cfg;
  cfg.max_iter = 300;
  cfg.sparsity = 0.0;
  const FactorizeResult res = factorize(v, 1, cfg);
  const Eigen::MatrixXd rec = res.dictionary.m * res.activations.m;
  CHECK((rec - v).norm() / v.norm() <= 1e-3);
}

TEST_CASE("factorize is deterministic under a fixed seed") {
  const Eigen::MatrixXd v = oracle::random_matrix(16, 12, 19);
  NmfConfig cfg;
  cfg.max_iter = 40;
  cfg.seed = 321;
  const FactorizeResult a = factorize(v, 5, cfg);
  const FactorizeResult b = factorize(v, 5, cfg);
  CHECK(std::memcmp(a.dictionary.m.data(), b.dictionary.m.data(),
                    sizeof(double) * a.dictionary.m.size()) == 0);
  CHECK(std::memcmp(a.activations.m.data(), b.activations.m.data(),
                    sizeof(double) * a.activations.m.size()) == 0);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].total == b.trace[i].total);
  }
}

TEST_CASE("factorize monotone for beta=1 across random problems") {
  std::uint64_t state = 77;
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index f = 4 + static_cast<Eigen::Index>(oracle::uniform01(state) * 28);
    const Eigen::Index t = 4 + static_cast<Eigen::Index>(oracle::uniform01(state) * 28);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(oracle::uniform01(state) * 5);
    const Eigen::MatrixXd v = oracle::random_matrix(f, t, oracle::mix64(state));

    NmfConfig cfg;
    cfg.max_iter = 50;
    cfg.sparsity = 0.0;
    cfg.seed = trial;
    const FactorizeResult res = factorize(v, k, cfg);
    CHECK(res.monotonicity_warnings == 0);
    CHECK(res.dictionary.m.minCoeff() >= 0.0);
    CHECK(res.activations.m.minCoeff() >= cfg.floor);
  }
}

TEST_CASE("factorize early stop on relative tolerance") {
  const Eigen::MatrixXd v = oracle::random_matrix(10, 8, 20);
  NmfConfig cfg;
  cfg.max_iter = 500;
  cfg.tol = 1e-4;
  const FactorizeResult res = factorize(v, 3, cfg);
  CHECK(res.trace.size() < 501);
}
