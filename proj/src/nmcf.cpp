// Copyright 2026 hlsep authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "nmcf.hpp"

#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace hlsep {

namespace {

// KL-style divergence sum with the x log x -> 0 extension; shared by the
// joint objective's exemplar terms.
double divergence_sum(const Eigen::MatrixXd& V, const Eigen::MatrixXd& lambda_rec,
                      double beta) {
  double div = 0.0;
  if (beta == 1.0) {
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
      for (Eigen::Index r = 0; r < V.rows(); ++r) {
        const double x = V(r, c);
        const double y = lambda_rec(r, c);
        div += (x > 0.0 ? x * (std::log(x) - std::log(y)) : 0.0) + (y - x);
      }
    }
  } else {
    for (Eigen::Index c = 0; c < V.cols(); ++c) {
      for (Eigen::Index r = 0; r < V.rows(); ++r) {
        div += beta_divergence(V(r, c), lambda_rec(r, c), beta);
      }
    }
  }
  return div;
}

void normalize_block_in_place(Eigen::Ref<Eigen::MatrixXd> block) {
  const Eigen::Index f = block.rows();
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    const double norm = block.col(c).norm();
    if (norm < 1e-12) {
      block.col(c).setConstant(1.0 / std::sqrt(static_cast<double>(f)));
    } else {
      block.col(c) /= norm;
    }
  }
}

// Derived-stream seeds for sub-problems, so the mixture factors consume
// the seed exactly like a blind factorize run.
constexpr std::uint64_t kHeartTrainTag = 101;
constexpr std::uint64_t kLungTrainTag = 102;

}  // namespace

namespace detail {

EngineResult run_engine(const Eigen::MatrixXd& V, const std::vector<EngineBlock>& blocks,
                        const NmfConfig& cfg) {
  require(V.minCoeff() >= 0.0, ErrorCode::kBadArgument, "mixture magnitude must be non-negative");
  require(cfg.max_iter >= 1, ErrorCode::kBadArgument, "max_iter must be positive");

  const Eigen::Index f_bins = V.rows();
  const Eigen::Index frames = V.cols();
  Eigen::Index k_total = 0;
  Eigen::Index k_free = 0;
  for (const EngineBlock& b : blocks) {
    require(b.count >= 0, ErrorCode::kBadArgument, "negative block size");
    if (b.fixed) {
      require(b.initial.rows() == f_bins && b.initial.cols() == b.count,
              ErrorCode::kShapeMismatch, "fixed block '" + b.name + "' has wrong shape");
    }
    if (b.exemplars) {
      for (const Exemplar& e : *b.exemplars) {
        require(e.magnitude.rows() == f_bins, ErrorCode::kShapeMismatch,
                "exemplar '" + e.label + "' bin count differs from mixture");
        require(e.lambda >= 0.0 && e.lambda <= 1.0, ErrorCode::kBadArgument,
                "exemplar weight outside [0, 1]");
      }
    }
    k_total += b.count;
    if (!b.fixed) k_free += b.count;
  }
  require(k_total >= 1, ErrorCode::kBadArgument, "no components configured");

  std::vector<Block> partition;
  partition.reserve(blocks.size());
  for (const EngineBlock& b : blocks) partition.push_back(Block{b.name, b.count});

  // Activations first, dictionary second, both row-major from the mixture
  // stream; exemplar activations use derived streams.
  Rng rng(cfg.seed);
  Activations h_m;
  h_m.blocks = partition;
  h_m.m.resize(k_total, frames);
  detail::fill_uniform(&h_m.m, rng);

  std::vector<std::vector<Eigen::MatrixXd>> exemplar_acts(blocks.size());
  {
    std::uint64_t item_index = 0;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      if (!blocks[bi].exemplars) continue;
      exemplar_acts[bi].reserve(blocks[bi].exemplars->size());
      for (const Exemplar& e : *blocks[bi].exemplars) {
        Rng item_rng(Rng::derive_seed(cfg.seed, item_index++));
        Eigen::MatrixXd h(blocks[bi].count, e.magnitude.cols());
        detail::fill_uniform(&h, item_rng);
        exemplar_acts[bi].push_back(std::move(h));
      }
    }
  }

  Dictionary dict;
  dict.blocks = partition;
  dict.m.resize(f_bins, k_total);
  {
    Eigen::MatrixXd free_cols(f_bins, k_free);
    detail::fill_uniform(&free_cols, rng);
    Eigen::Index start = 0;
    Eigen::Index free_start = 0;
    for (const EngineBlock& b : blocks) {
      if (b.count > 0) {
        if (b.fixed) {
          dict.m.middleCols(start, b.count) = b.initial;
        } else {
          dict.m.middleCols(start, b.count) = free_cols.middleCols(free_start, b.count);
          free_start += b.count;
        }
      }
      start += b.count;
    }
    start = 0;
    for (const EngineBlock& b : blocks) {
      if (!b.fixed && b.count > 0) {
        normalize_block_in_place(dict.m.middleCols(start, b.count));
      }
      start += b.count;
    }
  }

  // Single-block dictionary views for the exemplar activation updates.
  auto block_dictionary = [&](std::size_t bi, Eigen::Index start) {
    Dictionary d;
    d.blocks = {Block{blocks[bi].name, blocks[bi].count}};
    d.m = dict.m.middleCols(start, blocks[bi].count);
    return d;
  };

  Eigen::VectorXd row_penalty = Eigen::VectorXd::Zero(k_total);
  {
    Eigen::Index start = 0;
    for (const EngineBlock& b : blocks) {
      if (b.extra_sparsity > 0.0 && b.count > 0) {
        row_penalty.segment(start, b.count).setConstant(b.extra_sparsity);
      }
      start += b.count;
    }
  }

  auto evaluate = [&]() {
    CostPoint pt = total_cost(V, dict, h_m, cfg);
    for (Eigen::Index r = 0; r < k_total; ++r) {
      if (row_penalty(r) > 0.0) {
        pt.sparsity += row_penalty(r) * h_m.m.row(r).sum();
      }
    }
    Eigen::Index start = 0;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      if (blocks[bi].exemplars && blocks[bi].count > 0) {
        const auto w_block = dict.m.middleCols(start, blocks[bi].count);
        for (std::size_t i = 0; i < blocks[bi].exemplars->size(); ++i) {
          const Exemplar& e = (*blocks[bi].exemplars)[i];
          const Eigen::MatrixXd& h_i = exemplar_acts[bi][i];
          if (e.lambda > 0.0) {
            const Eigen::MatrixXd rec = detail::floored_product(w_block, h_i, cfg.floor);
            pt.exemplar_divergence += e.lambda * divergence_sum(e.magnitude, rec, cfg.beta);
          }
          pt.exemplar_sparsity += cfg.sparsity * h_i.sum();
        }
      }
      start += blocks[bi].count;
    }
    pt.total = pt.divergence + pt.sparsity + pt.exemplar_divergence + pt.exemplar_sparsity;
    return pt;
  };

  EngineResult res;
  res.trace.reserve(static_cast<std::size_t>(cfg.max_iter) + 1);
  res.trace.push_back(evaluate());

  for (int it = 0; it < cfg.max_iter; ++it) {
    // Mixture activations against the full dictionary.
    h_m = update_activations(V, dict, h_m, cfg, &row_penalty);

    // Exemplar activations against their block.
    {
      Eigen::Index start = 0;
      for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        if (blocks[bi].exemplars && blocks[bi].count > 0) {
          const Dictionary bd = block_dictionary(bi, start);
          for (std::size_t i = 0; i < blocks[bi].exemplars->size(); ++i) {
            Activations a;
            a.blocks = bd.blocks;
            a.m = std::move(exemplar_acts[bi][i]);
            a = update_activations((*blocks[bi].exemplars)[i].magnitude, bd, a, cfg);
            exemplar_acts[bi][i] = std::move(a.m);
          }
        }
        start += blocks[bi].count;
      }
    }

    // Dictionary blocks: every block steps from the same mixture
    // reconstruction; exemplar statistics join their block's pool scaled
    // by lambda.
    const Eigen::MatrixXd lambda_m = detail::floored_product(dict.m, h_m.m, cfg.floor);
    {
      Eigen::Index start = 0;
      for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const EngineBlock& b = blocks[bi];
        if (!b.fixed && b.count > 0) {
          const auto w_block = dict.m.middleCols(start, b.count);
          const auto h_block = h_m.m.middleRows(start, b.count);
          Eigen::MatrixXd p, q;
          detail::dictionary_block_stats(V, lambda_m, h_block, cfg.beta, &p, &q);
          if (b.exemplars) {
            for (std::size_t i = 0; i < b.exemplars->size(); ++i) {
              const Exemplar& e = (*b.exemplars)[i];
              if (e.lambda <= 0.0) continue;
              const Eigen::MatrixXd rec =
                  detail::floored_product(w_block, exemplar_acts[bi][i], cfg.floor);
              Eigen::MatrixXd pi, qi;
              detail::dictionary_block_stats(e.magnitude, rec, exemplar_acts[bi][i],
                                             cfg.beta, &pi, &qi);
              p += e.lambda * pi;
              q += e.lambda * qi;
            }
          }
          dict.m.middleCols(start, b.count) =
              detail::apply_dictionary_update(w_block, p, q, cfg.floor);
          normalize_block_in_place(dict.m.middleCols(start, b.count));
        }
        start += b.count;
      }
    }

    const CostPoint cost = evaluate();
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
  res.mixture_activations = std::move(h_m);
  res.exemplar_activations = std::move(exemplar_acts);
  return res;
}

}  // namespace detail

CofactorizeResult cofactorize(const Eigen::MatrixXd& mixture_magnitude,
                              const ExemplarDb& heart_db, const ExemplarDb& lung_db,
                              const NmcfConfig& cfg) {
  require(!heart_db.empty(), ErrorCode::kEmptyDatabase,
          "co-factorisation requires a non-empty heart database");
  require(!lung_db.empty(), ErrorCode::kEmptyDatabase,
          "co-factorisation requires a non-empty lung database");

  std::vector<detail::EngineBlock> blocks(3);
  blocks[0] = {"heart", cfg.heart_components, false, {}, &heart_db.items, 0.0};
  blocks[1] = {"lung", cfg.lung_components, false, {}, &lung_db.items, 0.0};
  blocks[2] = {"noise", cfg.noise_components, false, {}, nullptr, cfg.noise_sparsity};

  detail::EngineResult er = detail::run_engine(mixture_magnitude, blocks, cfg.nmf);

  CofactorizeResult out;
  out.dictionary = std::move(er.dictionary);
  out.mixture_activations = std::move(er.mixture_activations);
  out.heart_activations = std::move(er.exemplar_activations[0]);
  out.lung_activations = std::move(er.exemplar_activations[1]);
  out.trace = std::move(er.trace);
  out.monotonicity_warnings = er.monotonicity_warnings;
  return out;
}

CofactorizeResult supervised_nmf(const Eigen::MatrixXd& mixture_magnitude,
                                 const ExemplarDb& heart_db, const ExemplarDb& lung_db,
                                 const NmcfConfig& cfg, int noise_components) {
  require(!heart_db.empty(), ErrorCode::kEmptyDatabase,
          "supervised NMF requires a non-empty heart database");
  require(!lung_db.empty(), ErrorCode::kEmptyDatabase,
          "supervised NMF requires a non-empty lung database");

  auto train = [&](const ExemplarDb& db, Eigen::Index k, std::uint64_t tag) {
    Eigen::Index frames = 0;
    for (const Exemplar& e : db.items) {
      require(e.magnitude.rows() == mixture_magnitude.rows(), ErrorCode::kShapeMismatch,
              "exemplar bin count differs from mixture");
      frames += e.magnitude.cols();
    }
    Eigen::MatrixXd v(mixture_magnitude.rows(), frames);
    Eigen::Index at = 0;
    for (const Exemplar& e : db.items) {
      v.middleCols(at, e.magnitude.cols()) = e.magnitude;
      at += e.magnitude.cols();
    }
    NmfConfig train_cfg = cfg.nmf;
    train_cfg.seed = Rng::derive_seed(cfg.nmf.seed, tag);
    return factorize(v, k, train_cfg).dictionary.m;
  };

  const Eigen::MatrixXd w_heart = train(heart_db, cfg.heart_components, kHeartTrainTag);
  const Eigen::MatrixXd w_lung = train(lung_db, cfg.lung_components, kLungTrainTag);

  std::vector<detail::EngineBlock> blocks;
  blocks.push_back({"heart", cfg.heart_components, true, w_heart, nullptr, 0.0});
  blocks.push_back({"lung", cfg.lung_components, true, w_lung, nullptr, 0.0});
  if (noise_components > 0) {
    blocks.push_back({"noise", noise_components, false, {}, nullptr, cfg.noise_sparsity});
  }

  detail::EngineResult er = detail::run_engine(mixture_magnitude, blocks, cfg.nmf);

  CofactorizeResult out;
  out.dictionary = std::move(er.dictionary);
  out.mixture_activations = std::move(er.mixture_activations);
  out.trace = std::move(er.trace);
  out.monotonicity_warnings = er.monotonicity_warnings;
  return out;
}

CofactorizeResult semi_supervised_nmf(const Eigen::MatrixXd& mixture_magnitude,
                                      const ExemplarDb& heart_db, const NmcfConfig& cfg) {
  require(!heart_db.empty(), ErrorCode::kEmptyDatabase,
          "semi-supervised NMF requires a non-empty heart database");

  Eigen::Index frames = 0;
  for (const Exemplar& e : heart_db.items) frames += e.magnitude.cols();
  Eigen::MatrixXd v(mixture_magnitude.rows(), frames);
  Eigen::Index at = 0;
  for (const Exemplar& e : heart_db.items) {
    require(e.magnitude.rows() == mixture_magnitude.rows(), ErrorCode::kShapeMismatch,
            "exemplar bin count differs from mixture");
    v.middleCols(at, e.magnitude.cols()) = e.magnitude;
    at += e.magnitude.cols();
  }
  NmfConfig train_cfg = cfg.nmf;
  train_cfg.seed = Rng::derive_seed(cfg.nmf.seed, kHeartTrainTag);
  const Eigen::MatrixXd w_heart =
      factorize(v, cfg.heart_components, train_cfg).dictionary.m;

  std::vector<detail::EngineBlock> blocks;
  blocks.push_back({"heart", cfg.heart_components, true, w_heart, nullptr, 0.0});
  if (cfg.lung_components > 0) {
    blocks.push_back({"lung", cfg.lung_components, false, {}, nullptr, cfg.noise_sparsity});
  }
  if (cfg.noise_components > 0) {
    blocks.push_back({"noise", cfg.noise_components, false, {}, nullptr, cfg.noise_sparsity});
  }

  detail::EngineResult er = detail::run_engine(mixture_magnitude, blocks, cfg.nmf);

  CofactorizeResult out;
  out.dictionary = std::move(er.dictionary);
  out.mixture_activations = std::move(er.mixture_activations);
  out.trace = std::move(er.trace);
  out.monotonicity_warnings = er.monotonicity_warnings;
  return out;
}

ExemplarDb transform_db(const AudioDb& db, const StftConfig& stft_cfg, double expect_rate) {
  ExemplarDb out;
  out.items.reserve(db.items.size());
  for (const AudioExemplar& item : db.items) {
    require(item.audio.sample_rate == expect_rate, ErrorCode::kShapeMismatch,
            "exemplar '" + item.label + "' sample rate differs from mixture");
    require(item.lambda >= 0.0 && item.lambda <= 1.0, ErrorCode::kBadArgument,
            "exemplar weight outside [0, 1] for '" + item.label + "'");
    Exemplar e;
    e.magnitude = stft(item.audio, stft_cfg).magnitude;
    e.lambda = item.lambda;
    e.label = item.label;
    out.items.push_back(std::move(e));
  }
  return out;
}

SeparationResult separate(const AudioBuffer& mixture, const AudioDb& heart_db,
                          const AudioDb& lung_db, const NmcfConfig& cfg,
                          const StftConfig& stft_cfg) {
  const Spectrogram spec = stft(mixture, stft_cfg);

  CofactorizeResult factors;
  switch (cfg.mode) {
    case NmcfMode::kCofactorise:
      factors = cofactorize(spec.magnitude,
                            transform_db(heart_db, stft_cfg, mixture.sample_rate),
                            transform_db(lung_db, stft_cfg, mixture.sample_rate), cfg);
      break;
    case NmcfMode::kSupervised:
      factors = supervised_nmf(spec.magnitude,
                               transform_db(heart_db, stft_cfg, mixture.sample_rate),
                               transform_db(lung_db, stft_cfg, mixture.sample_rate), cfg,
                               /*noise_components=*/0);
      break;
    case NmcfMode::kSemiSupervised:
      factors = semi_supervised_nmf(
          spec.magnitude, transform_db(heart_db, stft_cfg, mixture.sample_rate), cfg);
      break;
  }

  SeparationResult res;
  res.masks = build_masks(factors.dictionary, factors.mixture_activations);
  for (const auto& [name, mask] : res.masks) {
    res.stems.emplace(name, istft(apply_mask(spec, mask)));
  }
  res.dictionary = std::move(factors.dictionary);
  res.mixture_activations = std::move(factors.mixture_activations);
  res.trace = std::move(factors.trace);
  res.monotonicity_warnings = factors.monotonicity_warnings;
  res.stft_config = stft_cfg;
  res.nmcf_config = cfg;
  res.sample_rate = mixture.sample_rate;
  return res;
}

}  // namespace hlsep
