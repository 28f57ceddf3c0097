#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "netrank/graph.hpp"
#include "netrank/rng.hpp"

namespace netrank {

// Stochastic-block-model benchmark with planted labels. Both walk-based and
// aggregation-based embedders can separate the blocks, so the full pipeline
// has a recoverable signal to verify against.
struct SbmSpec {
  int n = 600;
  std::vector<int> block_sizes{120, 480};
  double p_in = 0.05;
  double p_out = 0.005;
  int positive_block = 0;
  double positive_frac = 0.6;  // fraction of the positive block planted positive
  double noise_rate = 0.1;     // per-node label flip probability
  int signal_dims = 4;
  int noise_dims = 16;
  std::uint64_t seed = 1;

  void validate() const {
    if (n <= 0) throw std::runtime_error("SbmSpec: n must be positive");
    if (block_sizes.empty()) throw std::runtime_error("SbmSpec: no blocks");
    int total = 0;
    for (int b : block_sizes) {
      if (b <= 0) throw std::runtime_error("SbmSpec: block with zero size");
      total += b;
    }
    if (total != n) throw std::runtime_error("SbmSpec: block sizes must sum to n");
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0) {
      throw std::runtime_error("SbmSpec: probabilities must be in [0,1]");
    }
    if (positive_block < 0 || positive_block >= int(block_sizes.size())) {
      throw std::runtime_error("SbmSpec: positive_block out of range");
    }
    if (positive_frac <= 0.0 || positive_frac > 1.0) {
      throw std::runtime_error("SbmSpec: positive_frac must be in (0,1]");
    }
    if (noise_rate < 0.0 || noise_rate >= 0.5) {
      throw std::runtime_error("SbmSpec: noise_rate must be in [0,0.5)");
    }
    if (signal_dims < 0 || noise_dims < 0 || signal_dims + noise_dims < 1) {
      throw std::runtime_error("SbmSpec: need at least one feature dimension");
    }
  }
};

struct SynthData {
  Graph graph;
  FeatureMatrix features;
  LabelSet labels;
};

inline SynthData generate_synth(const SbmSpec& spec) {
  spec.validate();
  int width = spec.n > 0 ? int(std::to_string(spec.n - 1).size()) : 1;
  std::vector<std::string> ids(static_cast<size_t>(spec.n));
  std::vector<int> block_of(static_cast<size_t>(spec.n));
  {
    int node = 0;
    for (int b = 0; b < int(spec.block_sizes.size()); ++b) {
      for (int k = 0; k < spec.block_sizes[size_t(b)]; ++k, ++node) {
        std::string num = std::to_string(node);
        ids[size_t(node)] = "n" + std::string(size_t(width - int(num.size())), '0') + num;
        block_of[size_t(node)] = b;
      }
    }
  }

  // directed edges: each ordered pair sampled once
  Rng edge_rng(derive_seed(spec.seed, "synth.edges"));
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      if (i == j) continue;
      double p = block_of[size_t(i)] == block_of[size_t(j)] ? spec.p_in : spec.p_out;
      if (edge_rng.uniform() < p) edges.emplace_back(i, j);
    }
  }

  SynthData data;
  data.graph = build_graph(ids, edges);

  // features: one-hot block signal columns plus standard-normal noise
  Rng feat_rng(derive_seed(spec.seed, "synth.features"));
  int f = spec.signal_dims + spec.noise_dims;
  data.features.row_ids = ids;
  data.features.values = Dense(spec.n, f);
  for (int j = 0; j < spec.signal_dims; ++j) {
    data.features.col_names.push_back("sig" + std::to_string(j));
  }
  for (int j = 0; j < spec.noise_dims; ++j) {
    data.features.col_names.push_back("noise" + std::to_string(j));
  }
  int n_blocks = int(spec.block_sizes.size());
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.signal_dims; ++j) {
      data.features.values.at(i, j) = (block_of[size_t(i)] == j % n_blocks) ? 1.0 : 0.0;
    }
    for (int j = 0; j < spec.noise_dims; ++j) {
      data.features.values.at(i, spec.signal_dims + j) = feat_rng.normal();
    }
  }
  data.features.rebuild_index();

  // labels: planted subset of the designated block, then per-node flips
  Rng label_rng(derive_seed(spec.seed, "synth.labels"));
  std::vector<int> block_nodes;
  for (int i = 0; i < spec.n; ++i) {
    if (block_of[size_t(i)] == spec.positive_block) block_nodes.push_back(i);
  }
  int n_plant = int(spec.positive_frac * double(block_nodes.size()));
  std::vector<int> picks = label_rng.sample_without_replacement(int(block_nodes.size()), n_plant);
  std::vector<char> is_pos(size_t(spec.n), 0);
  for (int k : picks) is_pos[size_t(block_nodes[size_t(k)])] = 1;
  if (spec.noise_rate > 0.0) {
    for (int i = 0; i < spec.n; ++i) {
      if (label_rng.uniform() < spec.noise_rate) is_pos[size_t(i)] = !is_pos[size_t(i)];
    }
  }
  std::vector<std::string> positives;
  for (int i = 0; i < spec.n; ++i) {
    if (is_pos[size_t(i)]) positives.push_back(ids[size_t(i)]);
  }
  data.labels = make_label_set(std::move(positives), ids);
  return data;
}

// Emits the same edges.tsv / features.csv / labels.csv shapes the loaders read.
inline void write_synth(const SynthData& data, const std::string& dir) {
  save_edge_list(data.graph, dir + "/edges.tsv");
  save_feature_table(data.features, dir + "/features.csv");
  save_labels(data.labels, dir + "/labels.csv");
}

}  // namespace netrank
