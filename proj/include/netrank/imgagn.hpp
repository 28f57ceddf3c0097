#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "netrank/embedding.hpp"
#include "netrank/graph.hpp"
#include "netrank/grad_check.hpp"
#include "netrank/layers.hpp"
#include "netrank/optim.hpp"
#include "netrank/rng.hpp"
#include "netrank/sage.hpp"

namespace netrank {

struct ImgagnConfig {
  int dim = 80;          // encoder output width
  int enc_hidden = 128;  // width between the two convolutions
  int noise_dim = 100;
  int gen_hidden1 = 256, gen_hidden2 = 128;
  double dropout = 0.5;
  int gen_epochs = 30;
  int disc_epochs_per_gen = 20;
  double lr = 0.01;
};

// Three affine layers with ReLU between them and Tanh on the output; the
// output width equals the number of real minority nodes.
struct Generator {
  AffineLayer l1, l2, l3;
  ReluLayer r1, r2;
  TanhLayer out;

  void init(int noise_dim, int h1, int h2, int n_minority, Rng& rng) {
    l1.init(noise_dim, h1, rng);
    l2.init(h1, h2, rng);
    l3.init(h2, n_minority, rng);
  }

  Dense forward(const Dense& z) {
    return out.forward(l3.forward(r2.forward(l2.forward(r1.forward(l1.forward(z))))));
  }

  void backward(const Dense& g_out) {
    l1.backward(r1.backward(l2.backward(r2.backward(l3.backward(out.backward(g_out))))));
  }

  std::vector<Dense*> params() { return {&l1.W, &l1.b, &l2.W, &l2.b, &l3.W, &l3.b}; }
  std::vector<Dense*> grads() { return {&l1.dW, &l1.db, &l2.dW, &l2.db, &l3.dW, &l3.db}; }
};

// Synthetic minority nodes: softmax mixture weights over the real minority,
// features as the weighted average, and an edge wherever a weight reaches
// the uniform level 1/|minority| (inclusive, so every row keeps >= 1 edge).
struct SyntheticBatch {
  int count = 0;
  Dense weights;   // count x n_minority, rows sum to 1
  Dense features;  // count x f, = weights * minority features
  std::vector<std::pair<int, int>> edges;  // (synthetic row, minority column)
};

// edge (synthetic i -> minority j) exists iff weight_ij >= 1/|minority|;
// the row max always reaches the uniform level, so no row is left isolated
inline std::vector<std::pair<int, int>> synthetic_edges_from_weights(const Dense& weights) {
  double level = 1.0 / double(weights.cols());
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < weights.rows(); ++i) {
    for (int j = 0; j < weights.cols(); ++j) {
      if (weights.at(i, j) >= level) edges.emplace_back(i, j);
    }
  }
  return edges;
}

inline SyntheticBatch generate_synthetic(Generator& gen, const Dense& z,
                                         const Dense& minority_features) {
  int m = minority_features.rows();
  if (m < 2) throw std::runtime_error("generate_synthetic: need at least 2 minority nodes");
  if (z.rows() <= 0) throw std::runtime_error("generate_synthetic: empty noise batch");
  SyntheticBatch batch;
  batch.count = z.rows();
  Dense tanh_out = gen.forward(z);
  check_shape(tanh_out.cols() == m, "generate_synthetic: generator width");
  batch.weights = softmax_rows(tanh_out);
  batch.features = matmul(batch.weights, minority_features);
  batch.edges = synthetic_edges_from_weights(batch.weights);
  return batch;
}

// Two SAGEConv layers separated by ReLU and dropout; the second layer's
// output is the latent embedding (default width 80).
struct SageEncoder {
  SageConv c1, c2;
  ReluLayer relu;
  DropoutLayer drop;

  void init(int in_dim, int hidden, int out_dim, double dropout_rate, Rng& rng) {
    c1.init(in_dim, hidden, rng);
    c2.init(hidden, out_dim, rng);
    drop.rate = dropout_rate;
  }

  int out_dim() const { return c2.W_self.rows(); }

  Dense forward(const MeanAggregator& agg, const Dense& x, Mode mode, Rng& rng) {
    return c2.forward(agg, drop.forward(relu.forward(c1.forward(agg, x)), mode, rng));
  }

  Dense backward(const MeanAggregator& agg, const Dense& g_out) {
    return c1.backward(agg, relu.backward(drop.backward(c2.backward(agg, g_out))));
  }

  std::vector<Dense*> params() {
    return {&c1.W_self, &c1.W_neigh, &c1.b, &c2.W_self, &c2.W_neigh, &c2.b};
  }
  std::vector<Dense*> grads() {
    return {&c1.dW_self, &c1.dW_neigh, &c1.db, &c2.dW_self, &c2.dW_neigh, &c2.db};
  }
};

// Single SAGEConv head mapping embeddings to the three classes
// {real-positive, real-negative, synthetic}, softmax on top.
struct Discriminator {
  SageConv head;

  void init(int in_dim, Rng& rng) { head.init(in_dim, 3, rng); }

  Dense forward_logits(const MeanAggregator& agg, const Dense& embeddings) {
    return head.forward(agg, embeddings);
  }
  Dense backward(const MeanAggregator& agg, const Dense& g_logits) {
    return head.backward(agg, g_logits);
  }
  std::vector<Dense*> params() { return {&head.W_self, &head.W_neigh, &head.b}; }
  std::vector<Dense*> grads() { return {&head.dW_self, &head.dW_neigh, &head.db}; }
};

// Row-stochastic class probabilities for every node.
inline Dense discriminate(const Dense& embeddings, Discriminator& disc,
                          const MeanAggregator& agg) {
  check_shape(embeddings.cols() == disc.head.W_self.cols(), "discriminate");
  return softmax_rows(disc.forward_logits(agg, embeddings));
}

struct TrainLog {
  int disc_epochs_per_gen = 0;
  struct EpochLog {
    double gen_loss = 0.0;
    std::vector<double> disc_losses;
  };
  std::vector<EpochLog> epochs;
};

inline void write_train_log(const TrainLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_train_log: cannot open " + path);
  char buf[40];
  out << "# disc_epochs_per_gen_epoch=" << log.disc_epochs_per_gen << "\n";
  out << "epoch\tgen_loss\tdisc_loss_first\tdisc_loss_last\tdisc_epochs\n";
  for (size_t e = 0; e < log.epochs.size(); ++e) {
    const auto& ep = log.epochs[e];
    out << (e + 1);
    std::snprintf(buf, sizeof buf, "%.9g", ep.gen_loss);
    out << '\t' << buf;
    std::snprintf(buf, sizeof buf, "%.9g", ep.disc_losses.empty() ? 0.0 : ep.disc_losses.front());
    out << '\t' << buf;
    std::snprintf(buf, sizeof buf, "%.9g", ep.disc_losses.empty() ? 0.0 : ep.disc_losses.back());
    out << '\t' << buf << '\t' << ep.disc_losses.size() << "\n";
  }
}

struct ImgagnResult {
  EmbeddingMatrix embedding;  // real nodes only
  TrainLog log;
  int synthetic_count = 0;
};

namespace detail_imgagn {

// real undirected adjacency plus synthetic<->minority attachment edges
inline MeanAggregator augmented_aggregator(const UndirectedView& real,
                                           const std::vector<int>& minority_nodes,
                                           const SyntheticBatch& batch) {
  int n = real.n;
  int total = n + batch.count;
  std::vector<std::vector<int>> extra(static_cast<size_t>(total));
  for (const auto& [si, mj] : batch.edges) {
    int synth_node = n + si;
    int real_node = minority_nodes[size_t(mj)];
    extra[size_t(synth_node)].push_back(real_node);
    extra[size_t(real_node)].push_back(synth_node);
  }
  MeanAggregator agg;
  agg.n = total;
  agg.offsets.assign(size_t(total) + 1, 0);
  for (int v = 0; v < total; ++v) {
    int base = v < n ? real.degree(v) : 0;
    agg.offsets[size_t(v) + 1] = agg.offsets[size_t(v)] + base + int(extra[size_t(v)].size());
  }
  agg.nbrs.resize(size_t(agg.offsets.back()));
  for (int v = 0; v < total; ++v) {
    int pos = agg.offsets[size_t(v)];
    if (v < n) {
      auto nb = real.neighbors(v);
      std::copy(nb.begin(), nb.end(), agg.nbrs.begin() + pos);
      pos += int(nb.size());
    }
    std::sort(extra[size_t(v)].begin(), extra[size_t(v)].end());
    std::copy(extra[size_t(v)].begin(), extra[size_t(v)].end(), agg.nbrs.begin() + pos);
  }
  return agg;
}

}  // namespace detail_imgagn

// Adversarial embedding for the imbalanced graph. Each outer epoch runs a
// fixed count of discriminator epochs (3-class cross-entropy on the true
// classes, training encoder + discriminator) followed by one generator
// update that pushes synthetic rows toward the real-positive class. When
// the classes are already balanced the adversarial half is skipped and the
// encoder/discriminator train alone.
inline ImgagnResult train_imgagn(const Graph& g, const FeatureMatrix& features,
                                 const LabelSet& labels, const ImgagnConfig& cfg,
                                 std::uint64_t seed) {
  labels.validate();
  int n = g.n_nodes;
  int f = features.cols();
  // features must cover every node; the encoder has no imputation path
  Dense x(n, f);
  for (int v = 0; v < n; ++v) {
    auto it = features.row_of.find(g.node_ids[size_t(v)]);
    if (it == features.row_of.end()) {
      throw std::runtime_error("train_imgagn: node " + g.node_ids[size_t(v)] +
                               " has no feature row");
    }
    auto src = features.values.row(it->second);
    std::copy(src.begin(), src.end(), x.row(v).begin());
  }

  std::vector<int> target(size_t(n), -1);  // -1 = unlabeled, excluded from the loss
  std::vector<int> minority_nodes, majority_nodes;
  for (int v = 0; v < n; ++v) {
    const std::string& id = g.node_ids[size_t(v)];
    if (!labels.in_universe(id)) continue;
    if (labels.is_positive(id)) {
      target[size_t(v)] = 0;
      minority_nodes.push_back(v);
    } else {
      target[size_t(v)] = 1;
      majority_nodes.push_back(v);
    }
  }
  if (minority_nodes.empty()) throw std::runtime_error("train_imgagn: no positive nodes in graph");
  if (majority_nodes.empty()) throw std::runtime_error("train_imgagn: no negative nodes in graph");

  int m = int(minority_nodes.size());
  int synth_count = int(majority_nodes.size()) - m;
  bool adversarial = synth_count > 0 && m >= 2;

  Rng init_rng(derive_seed(seed, "imgagn.init"));
  Rng noise_rng(derive_seed(seed, "imgagn.noise"));
  Rng drop_rng(derive_seed(seed, "imgagn.dropout"));

  SageEncoder enc;
  enc.init(f, cfg.enc_hidden, cfg.dim, cfg.dropout, init_rng);
  Discriminator disc;
  disc.init(cfg.dim, init_rng);
  Generator gen;
  if (adversarial) gen.init(cfg.noise_dim, cfg.gen_hidden1, cfg.gen_hidden2, m, init_rng);

  std::vector<Dense*> dparams = enc.params();
  {
    auto hp = disc.params();
    dparams.insert(dparams.end(), hp.begin(), hp.end());
  }
  std::vector<Dense*> dgrads = enc.grads();
  {
    auto hg = disc.grads();
    dgrads.insert(dgrads.end(), hg.begin(), hg.end());
  }
  AdamState disc_opt;
  disc_opt.lr = cfg.lr;
  disc_opt.init(dparams);
  AdamState gen_opt;
  gen_opt.lr = cfg.lr;
  if (adversarial) gen_opt.init(gen.params());

  Dense minority_features(m, f);
  for (int j = 0; j < m; ++j) {
    auto src = x.row(minority_nodes[size_t(j)]);
    std::copy(src.begin(), src.end(), minority_features.row(j).begin());
  }

  UndirectedView real_view = build_undirected(g);

  auto sample_noise = [&]() {
    Dense z(synth_count, cfg.noise_dim);
    for (double& v : z.raw()) v = noise_rng.uniform(-1.0, 1.0);
    return z;
  };

  auto make_augmented = [&](const SyntheticBatch& batch, MeanAggregator& agg, Dense& x_aug,
                            std::vector<int>& target_aug) {
    agg = detail_imgagn::augmented_aggregator(real_view, minority_nodes, batch);
    x_aug = Dense(n + batch.count, f);
    for (int v = 0; v < n; ++v) {
      auto src = x.row(v);
      std::copy(src.begin(), src.end(), x_aug.row(v).begin());
    }
    for (int i = 0; i < batch.count; ++i) {
      auto src = batch.features.row(i);
      std::copy(src.begin(), src.end(), x_aug.row(n + i).begin());
    }
    target_aug = target;
    target_aug.resize(size_t(n + batch.count), 2);  // synthetic class
  };

  TrainLog log;
  log.disc_epochs_per_gen = cfg.disc_epochs_per_gen;

  SyntheticBatch batch;  // stays empty when not adversarial
  for (int epoch = 0; epoch < cfg.gen_epochs; ++epoch) {
    TrainLog::EpochLog ep;
    if (adversarial) batch = generate_synthetic(gen, sample_noise(), minority_features);
    MeanAggregator agg;
    Dense x_aug;
    std::vector<int> target_aug;
    make_augmented(batch, agg, x_aug, target_aug);

    for (int d = 0; d < cfg.disc_epochs_per_gen; ++d) {
      Dense emb = enc.forward(agg, x_aug, Mode::Train, drop_rng);
      Dense logits = disc.forward_logits(agg, emb);
      double loss = cross_entropy_masked(logits, target_aug);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("train_imgagn: non-finite discriminator loss at epoch " +
                                 std::to_string(epoch + 1));
      }
      ep.disc_losses.push_back(loss);
      Dense g_logits = cross_entropy_backward(logits, target_aug);
      Dense g_emb = disc.backward(agg, g_logits);
      enc.backward(agg, g_emb);
      adam_step(dparams, dgrads, disc_opt);
    }

    if (adversarial) {
      // one generator update: synthetic rows pushed toward real-positive
      std::vector<int> gen_target(size_t(n + batch.count), -1);
      for (int i = 0; i < batch.count; ++i) gen_target[size_t(n + i)] = 0;
      Dense emb = enc.forward(agg, x_aug, Mode::Train, drop_rng);
      Dense logits = disc.forward_logits(agg, emb);
      ep.gen_loss = cross_entropy_masked(logits, gen_target);
      if (!std::isfinite(ep.gen_loss)) {
        throw std::runtime_error("train_imgagn: non-finite generator loss at epoch " +
                                 std::to_string(epoch + 1));
      }
      Dense g_logits = cross_entropy_backward(logits, gen_target);
      Dense g_emb = disc.backward(agg, g_logits);
      Dense g_x = enc.backward(agg, g_emb);
      // feature path only; the thresholded edges are not differentiable
      Dense g_syn(batch.count, f);
      for (int i = 0; i < batch.count; ++i) {
        auto src = g_x.row(n + i);
        std::copy(src.begin(), src.end(), g_syn.row(i).begin());
      }
      Dense g_weights = matmul_nt(g_syn, minority_features);
      // softmax rows backward
      Dense g_tanh(batch.count, m);
      for (int i = 0; i < batch.count; ++i) {
        double dot = 0.0;
        for (int j = 0; j < m; ++j) dot += g_weights.at(i, j) * batch.weights.at(i, j);
        for (int j = 0; j < m; ++j) {
          g_tanh.at(i, j) = batch.weights.at(i, j) * (g_weights.at(i, j) - dot);
        }
      }
      gen.backward(g_tanh);
      adam_step(gen.params(), gen.grads(), gen_opt);
    }
    log.epochs.push_back(std::move(ep));
  }

  // export: encoder outputs after the final epoch, real nodes only
  if (adversarial) batch = generate_synthetic(gen, sample_noise(), minority_features);
  MeanAggregator agg;
  Dense x_aug;
  std::vector<int> target_aug;
  make_augmented(batch, agg, x_aug, target_aug);
  Dense emb = enc.forward(agg, x_aug, Mode::Infer, drop_rng);
  if (!all_finite(emb)) throw std::runtime_error("train_imgagn: non-finite embedding");

  ImgagnResult res;
  res.synthetic_count = adversarial ? synth_count : 0;
  res.log = std::move(log);
  res.embedding.row_ids = g.node_ids;
  res.embedding.dim = cfg.dim;
  res.embedding.values = Dense(n, cfg.dim);
  for (int v = 0; v < n; ++v) {
    auto src = emb.row(v);
    std::copy(src.begin(), src.end(), res.embedding.values.row(v).begin());
  }
  return res;
}

}  // namespace netrank
