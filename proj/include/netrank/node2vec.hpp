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

struct Node2VecConfig {
  double p = 1.0, q = 1.0;
  int walk_length = 40;
  int walks_per_node = 10;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  int dim = 80;
  double lr = 0.025;
  bool undirected = true;  // walk on the undirected view; sinks strand pure out-walks
  std::uint64_t seed = 1;
};

struct WalkSet {
  std::vector<std::vector<int>> walks;
  int walk_length = 0;
  int walks_per_node = 0;
  double p = 1.0, q = 1.0;
  int n_nodes = 0;
};

// Walk adjacency: the undirected view by default, or out-edges only.
inline UndirectedView build_walk_view(const Graph& g, bool undirected) {
  if (undirected) return build_undirected(g);
  UndirectedView v;
  v.n = g.n_nodes;
  v.offsets = g.out_offsets;
  v.nbrs = g.out_targets;
  return v;
}

// Second-order bias over neighbors(cur), given the previous step: weight 1/p
// for returning to prev, 1 for nodes adjacent to prev, 1/q otherwise.
// Returned pairs are (neighbor, probability), normalized to sum 1.
inline std::vector<std::pair<int, double>> transition_distribution(const UndirectedView& view,
                                                                   int prev, int cur, double p,
                                                                   double q) {
  if (p <= 0.0 || q <= 0.0) throw std::runtime_error("transition_distribution: p, q must be > 0");
  auto nbrs = view.neighbors(cur);
  if (nbrs.empty()) throw std::runtime_error("transition_distribution: node has no neighbors");
  if (!view.adjacent(cur, prev)) {
    throw std::runtime_error("transition_distribution: prev-cur is not an edge");
  }
  std::vector<std::pair<int, double>> out;
  out.reserve(nbrs.size());
  double total = 0.0;
  for (int nb : nbrs) {
    double w;
    if (nb == prev) {
      w = 1.0 / p;
    } else if (view.adjacent(prev, nb)) {
      w = 1.0;
    } else {
      w = 1.0 / q;
    }
    total += w;
    out.emplace_back(nb, w);
  }
  for (auto& [nb, w] : out) w /= total;
  return out;
}

namespace detail_n2v {

inline int sample_categorical(const std::vector<std::pair<int, double>>& dist, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [node, prob] : dist) {
    acc += prob;
    if (u < acc) return node;
  }
  return dist.back().first;
}

}  // namespace detail_n2v

// walks_per_node biased walks from every node, each under its own derived
// seed so walk generation could be farmed out without changing results.
// Isolated nodes yield the degenerate single-node walk.
inline WalkSet generate_walks(const Graph& g, const Node2VecConfig& cfg) {
  if (cfg.walk_length < 1 || cfg.walks_per_node < 1) {
    throw std::runtime_error("generate_walks: walk_length and walks_per_node must be positive");
  }
  UndirectedView view = build_walk_view(g, cfg.undirected);
  WalkSet ws;
  ws.walk_length = cfg.walk_length;
  ws.walks_per_node = cfg.walks_per_node;
  ws.p = cfg.p;
  ws.q = cfg.q;
  ws.n_nodes = g.n_nodes;
  ws.walks.reserve(size_t(g.n_nodes) * size_t(cfg.walks_per_node));
  for (int w = 0; w < cfg.walks_per_node; ++w) {
    for (int start = 0; start < g.n_nodes; ++start) {
      Rng rng(derive_seed(cfg.seed, "n2v.walk",
                          std::uint64_t(w) * std::uint64_t(g.n_nodes) + std::uint64_t(start)));
      std::vector<int> walk{start};
      if (view.degree(start) > 0) {
        auto first_nbrs = view.neighbors(start);
        walk.push_back(first_nbrs[size_t(rng.uniform_int(int(first_nbrs.size())))]);
        while (int(walk.size()) < cfg.walk_length) {
          int cur = walk.back();
          int prev = walk[walk.size() - 2];
          if (view.degree(cur) == 0) break;  // directed mode can hit sinks
          auto dist = transition_distribution(view, prev, cur, cfg.p, cfg.q);
          walk.push_back(detail_n2v::sample_categorical(dist, rng));
        }
      }
      ws.walks.push_back(std::move(walk));
    }
  }
  return ws;
}

struct SkipgramResult {
  Dense vectors;  // n_nodes x dim
  std::vector<double> epoch_loss;
};

// Skip-gram with negative sampling over the walk corpus. Negatives come
// from the corpus unigram distribution raised to 0.75. Single-threaded by
// contract so a fixed seed is bit-reproducible.
inline SkipgramResult train_skipgram(const WalkSet& ws, int dim, int window, int negatives,
                                     int epochs, double lr, std::uint64_t seed) {
  if (ws.walks.empty()) throw std::runtime_error("train_skipgram: empty walk set");
  if (dim < 1 || window < 1) throw std::runtime_error("train_skipgram: dim and window must be >= 1");
  int n = ws.n_nodes;
  Rng rng(derive_seed(seed, "n2v.sgns"));

  // corpus unigram^0.75 cumulative table
  std::vector<double> cum(size_t(n), 0.0);
  {
    std::vector<double> counts(size_t(n), 0.0);
    for (const auto& walk : ws.walks) {
      for (int node : walk) counts[size_t(node)] += 1.0;
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += std::pow(counts[size_t(i)], 0.75);
      cum[size_t(i)] = acc;
    }
  }
  auto sample_negative = [&]() {
    double u = rng.uniform() * cum.back();
    return int(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
  };

  Dense in_vec(n, dim), out_vec(n, dim);
  for (double& v : in_vec.raw()) v = rng.uniform(-0.5 / dim, 0.5 / dim);

  long long total_pairs = 0;
  for (const auto& walk : ws.walks) {
    int len = int(walk.size());
    for (int i = 0; i < len; ++i) {
      total_pairs += std::min(len - 1, i + window) - std::max(0, i - window);
    }
  }
  long long planned = total_pairs * epochs;
  long long processed = 0;

  SkipgramResult res;
  std::vector<double> err(static_cast<size_t>(dim));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double loss = 0.0;
    long long pairs = 0;
    for (const auto& walk : ws.walks) {
      int len = int(walk.size());
      for (int i = 0; i < len; ++i) {
        int center = walk[size_t(i)];
        auto u = in_vec.row(center);
        for (int j = std::max(0, i - window); j <= std::min(len - 1, i + window); ++j) {
          if (j == i) continue;
          double step = lr * std::max(1e-4, 1.0 - double(processed) / double(planned + 1));
          ++processed;
          ++pairs;
          std::fill(err.begin(), err.end(), 0.0);
          for (int k = 0; k <= negatives; ++k) {
            int target = k == 0 ? walk[size_t(j)] : sample_negative();
            double label = k == 0 ? 1.0 : 0.0;
            auto v = out_vec.row(target);
            double dot = 0.0;
            for (int d = 0; d < dim; ++d) dot += u[size_t(d)] * v[size_t(d)];
            double sig = 1.0 / (1.0 + std::exp(-dot));
            loss += label > 0.5 ? -std::log(std::max(sig, 1e-12))
                                : -std::log(std::max(1.0 - sig, 1e-12));
            double gcoef = (label - sig) * step;
            for (int d = 0; d < dim; ++d) {
              err[size_t(d)] += gcoef * v[size_t(d)];
              v[size_t(d)] += gcoef * u[size_t(d)];
            }
          }
          for (int d = 0; d < dim; ++d) u[size_t(d)] += err[size_t(d)];
        }
      }
    }
    res.epoch_loss.push_back(pairs > 0 ? loss / double(pairs) : 0.0);
  }
  res.vectors = std::move(in_vec);
  return res;
}

struct Node2VecResult {
  EmbeddingMatrix embedding;
  std::vector<double> epoch_loss;
};

inline Node2VecResult node2vec_embed(const Graph& g, const Node2VecConfig& cfg) {
  WalkSet ws = generate_walks(g, cfg);
  SkipgramResult sg =
      train_skipgram(ws, cfg.dim, cfg.window, cfg.negatives, cfg.epochs, cfg.lr, cfg.seed);
  if (!all_finite(sg.vectors)) throw std::runtime_error("node2vec_embed: non-finite embedding");
  Node2VecResult res;
  res.embedding.row_ids = g.node_ids;
  res.embedding.dim = cfg.dim;
  res.embedding.values = std::move(sg.vectors);
  res.epoch_loss = std::move(sg.epoch_loss);
  return res;
}

}  // namespace netrank
