#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "netrank/embedding.hpp"
#include "netrank/graph.hpp"
#include "netrank/rng.hpp"

namespace netrank {

enum class LineOrder { First, Second, Both };

struct LineConfig {
  int dim_total = 80;
  LineOrder order = LineOrder::Both;  // Both concatenates dim/2 + dim/2 halves
  int negatives = 5;
  long long sample_count = 0;  // 0 = 100 * n_edges
  double lr = 0.025;           // linear decay to lr * 1e-4
  std::uint64_t seed = 1;
};

// Uniform draw over the deduplicated edge list (the network is unweighted).
inline std::pair<int, int> sample_edge(const Graph& g, Rng& rng) {
  if (g.n_edges < 1) throw std::runtime_error("sample_edge: empty graph");
  return g.edges[size_t(rng.uniform_int(g.n_edges))];
}

struct LineResult {
  EmbeddingMatrix embedding;
  std::vector<double> loss_first, loss_second;  // mean loss per training chunk
};

namespace detail_line {

// One proximity order trained by edge sampling with negative draws from the
// undirected degree^0.75 distribution. Second order scores source vertex
// vectors against target context vectors; only vertex vectors are exported.
inline Dense train_order(const Graph& g, bool second_order, int dim, int negatives,
                         long long samples, double lr, std::uint64_t seed,
                         std::vector<double>& chunk_loss) {
  Rng rng(seed);
  int n = g.n_nodes;
  UndirectedView view = build_undirected(g);
  std::vector<double> cum(size_t(n), 0.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += std::pow(double(view.degree(i)), 0.75);
    cum[size_t(i)] = acc;
  }
  auto sample_negative = [&]() {
    double u = rng.uniform() * cum.back();
    return int(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
  };

  Dense vertex(n, dim), context(n, dim);
  for (double& v : vertex.raw()) v = rng.uniform(-0.5 / dim, 0.5 / dim);

  const int n_chunks = 10;
  long long chunk = std::max(1ll, samples / n_chunks);
  double loss = 0.0;
  long long in_chunk = 0;
  std::vector<double> err(static_cast<size_t>(dim));
  for (long long s = 0; s < samples; ++s) {
    double rho = lr * std::max(1e-4, 1.0 - double(s) / double(samples + 1));
    auto [u, v] = sample_edge(g, rng);
    auto src = vertex.row(u);
    std::fill(err.begin(), err.end(), 0.0);
    for (int k = 0; k <= negatives; ++k) {
      int target = k == 0 ? v : sample_negative();
      double label = k == 0 ? 1.0 : 0.0;
      auto dst = second_order ? context.row(target) : vertex.row(target);
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += src[size_t(d)] * dst[size_t(d)];
      double sig = 1.0 / (1.0 + std::exp(-dot));
      loss += label > 0.5 ? -std::log(std::max(sig, 1e-12))
                          : -std::log(std::max(1.0 - sig, 1e-12));
      double gcoef = (label - sig) * rho;
      for (int d = 0; d < dim; ++d) {
        err[size_t(d)] += gcoef * dst[size_t(d)];
        dst[size_t(d)] += gcoef * src[size_t(d)];
      }
    }
    for (int d = 0; d < dim; ++d) src[size_t(d)] += err[size_t(d)];
    ++in_chunk;
    if (in_chunk == chunk || s + 1 == samples) {
      chunk_loss.push_back(loss / double(in_chunk));
      loss = 0.0;
      in_chunk = 0;
    }
  }
  return vertex;
}

}  // namespace detail_line

inline LineResult line_train(const Graph& g, const LineConfig& cfg) {
  if (g.n_edges < 1) throw std::runtime_error("line_train: graph has no edges");
  if (cfg.dim_total < 1) throw std::runtime_error("line_train: dim_total must be >= 1");
  if (cfg.order == LineOrder::Both && cfg.dim_total % 2 != 0) {
    throw std::runtime_error("line_train: order=both needs an even dim_total");
  }
  long long samples = cfg.sample_count > 0 ? cfg.sample_count : 100ll * g.n_edges;
  if (samples < g.n_edges) {
    throw std::runtime_error("line_train: sample_count must be >= n_edges");
  }

  LineResult res;
  res.embedding.row_ids = g.node_ids;
  res.embedding.dim = cfg.dim_total;
  res.embedding.values = Dense(g.n_nodes, cfg.dim_total);

  auto copy_block = [&](const Dense& src, int col0) {
    for (int i = 0; i < src.rows(); ++i) {
      for (int j = 0; j < src.cols(); ++j) res.embedding.values.at(i, col0 + j) = src.at(i, j);
    }
  };

  if (cfg.order == LineOrder::First) {
    Dense v = detail_line::train_order(g, false, cfg.dim_total, cfg.negatives, samples, cfg.lr,
                                       derive_seed(cfg.seed, "line.first"), res.loss_first);
    copy_block(v, 0);
  } else if (cfg.order == LineOrder::Second) {
    Dense v = detail_line::train_order(g, true, cfg.dim_total, cfg.negatives, samples, cfg.lr,
                                       derive_seed(cfg.seed, "line.second"), res.loss_second);
    copy_block(v, 0);
  } else {
    int half = cfg.dim_total / 2;
    Dense v1 = detail_line::train_order(g, false, half, cfg.negatives, samples, cfg.lr,
                                        derive_seed(cfg.seed, "line.first"), res.loss_first);
    Dense v2 = detail_line::train_order(g, true, half, cfg.negatives, samples, cfg.lr,
                                        derive_seed(cfg.seed, "line.second"), res.loss_second);
    copy_block(v1, 0);
    copy_block(v2, half);
  }
  if (!all_finite(res.embedding.values)) throw std::runtime_error("line_train: non-finite embedding");
  return res;
}

}  // namespace netrank
