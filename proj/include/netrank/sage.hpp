#pragma once

#include <vector>

#include "netrank/dense.hpp"
#include "netrank/graph.hpp"
#include "netrank/layers.hpp"
#include "netrank/rng.hpp"

namespace netrank {

// Row-normalized mean aggregation over an undirected neighbor structure.
// Nodes without neighbors aggregate the zero vector.
struct MeanAggregator {
  std::vector<int> offsets, nbrs;
  int n = 0;

  std::span<const int> neighbors(int v) const {
    return {nbrs.data() + offsets[size_t(v)], size_t(offsets[size_t(v) + 1] - offsets[size_t(v)])};
  }
  int degree(int v) const { return offsets[size_t(v) + 1] - offsets[size_t(v)]; }

  // A_hat * X
  Dense aggregate(const Dense& x) const {
    check_shape(x.rows() == n, "MeanAggregator::aggregate");
    Dense out(n, x.cols());
    for (int v = 0; v < n; ++v) {
      int deg = degree(v);
      if (deg == 0) continue;
      auto ov = out.row(v);
      for (int u : neighbors(v)) {
        auto xu = x.row(u);
        for (int j = 0; j < x.cols(); ++j) ov[size_t(j)] += xu[size_t(j)];
      }
      for (int j = 0; j < x.cols(); ++j) ov[size_t(j)] /= double(deg);
    }
    return out;
  }

  // A_hat^T * G; the neighbor relation is symmetric, so this distributes
  // each row back over the same neighborhoods with the source normalizer.
  Dense aggregate_transpose(const Dense& g) const {
    check_shape(g.rows() == n, "MeanAggregator::aggregate_transpose");
    Dense out(n, g.cols());
    for (int v = 0; v < n; ++v) {
      int deg = degree(v);
      if (deg == 0) continue;
      double inv = 1.0 / double(deg);
      auto gv = g.row(v);
      for (int u : neighbors(v)) {
        auto ou = out.row(u);
        for (int j = 0; j < g.cols(); ++j) ou[size_t(j)] += gv[size_t(j)] * inv;
      }
    }
    return out;
  }
};

inline MeanAggregator aggregator_from_view(const UndirectedView& view) {
  MeanAggregator a;
  a.n = view.n;
  a.offsets = view.offsets;
  a.nbrs = view.nbrs;
  return a;
}

inline MeanAggregator aggregator_from_graph(const Graph& g) {
  return aggregator_from_view(build_undirected(g));
}

// GraphSAGE convolution with mean aggregation:
//   z_v = W_self * h_v + W_neigh * mean_{u in N(v)} h_u + b
struct SageConv {
  Dense W_self, W_neigh;  // out x in
  Dense b;                // out x 1
  Dense dW_self, dW_neigh, db;
  Dense x_cache, ax_cache;

  void init(int in_dim, int out_dim, Rng& rng) {
    W_self = Dense(out_dim, in_dim);
    W_neigh = Dense(out_dim, in_dim);
    b = Dense(out_dim, 1);
    glorot_init(W_self, in_dim, out_dim, rng);
    glorot_init(W_neigh, in_dim, out_dim, rng);
    dW_self = Dense(out_dim, in_dim);
    dW_neigh = Dense(out_dim, in_dim);
    db = Dense(out_dim, 1);
  }

  Dense forward(const MeanAggregator& agg, const Dense& x) {
    check_shape(x.cols() == W_self.cols(), "SageConv::forward");
    x_cache = x;
    ax_cache = agg.aggregate(x);
    Dense z = matmul_nt(x, W_self);
    Dense zn = matmul_nt(ax_cache, W_neigh);
    add_inplace(z, zn);
    for (int i = 0; i < z.rows(); ++i) {
      for (int j = 0; j < z.cols(); ++j) z.at(i, j) += b.at(j, 0);
    }
    return z;
  }

  Dense backward(const MeanAggregator& agg, const Dense& gz) {
    dW_self = matmul_tn(gz, x_cache);
    dW_neigh = matmul_tn(gz, ax_cache);
    db.fill(0.0);
    for (int i = 0; i < gz.rows(); ++i) {
      for (int j = 0; j < gz.cols(); ++j) db.at(j, 0) += gz.at(i, j);
    }
    Dense gx = matmul(gz, W_self);
    Dense g_neigh = matmul(gz, W_neigh);
    add_inplace(gx, agg.aggregate_transpose(g_neigh));
    return gx;
  }

  std::vector<Dense*> params() { return {&W_self, &W_neigh, &b}; }
  std::vector<Dense*> grads() { return {&dW_self, &dW_neigh, &db}; }
};

}  // namespace netrank
