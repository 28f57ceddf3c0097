#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "netrank/dense.hpp"
#include "netrank/rng.hpp"

namespace netrank {

// Split node or leaf; leaves have feature = -1. Rows with x[feature] <
// threshold go left. Thresholds are midpoints of adjacent observed values.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1, right = -1;
  double value = 0.0;
  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict_row(std::span<const double> x) const {
    int i = 0;
    while (!nodes[size_t(i)].is_leaf()) {
      const TreeNode& n = nodes[size_t(i)];
      i = x[size_t(n.feature)] < n.threshold ? n.left : n.right;
    }
    return nodes[size_t(i)].value;
  }
};

struct TreeParams {
  int max_depth = 8;
  int min_samples_leaf = 1;
};

namespace detail_tree {

// Per-feature row orderings, partitioned stably on each split so every node
// sees its rows pre-sorted. Exact greedy enumeration, no histograms.
using SortedIdx = std::vector<std::vector<int>>;

inline SortedIdx argsort_features(const Dense& x, const std::vector<int>& rows) {
  SortedIdx sorted(static_cast<size_t>(x.cols()));
  for (int f = 0; f < x.cols(); ++f) {
    sorted[size_t(f)] = rows;
    std::stable_sort(sorted[size_t(f)].begin(), sorted[size_t(f)].end(),
                     [&](int a, int b) { return x.at(a, f) < x.at(b, f); });
  }
  return sorted;
}

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// midpoint that actually separates v_lo from v_hi under "x < t goes left";
// adjacent representable doubles can collapse the midpoint onto v_lo, in
// which case the candidate is skipped
inline bool separating_threshold(double v_lo, double v_hi, double& t) {
  t = v_lo + (v_hi - v_lo) / 2.0;
  return v_lo < t && t <= v_hi;
}

inline void partition_sorted(const Dense& x, const SortedIdx& sorted, int feature,
                             double threshold, SortedIdx& left, SortedIdx& right) {
  left.resize(sorted.size());
  right.resize(sorted.size());
  for (size_t f = 0; f < sorted.size(); ++f) {
    left[f].clear();
    right[f].clear();
    for (int r : sorted[f]) {
      (x.at(r, feature) < threshold ? left[f] : right[f]).push_back(r);
    }
  }
}

struct GiniBuilder {
  const Dense& x;
  const std::vector<int>& y;
  TreeParams params;
  // random-forest hooks; frac = 1 with rng unused reduces to plain CART
  Rng* rng = nullptr;
  double feature_frac = 1.0;
  std::vector<TreeNode> nodes;

  std::vector<int> feature_subset() {
    int f = x.cols();
    if (feature_frac >= 1.0 || rng == nullptr) {
      std::vector<int> all(static_cast<size_t>(f));
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    int k = std::max(1, int(std::lround(feature_frac * double(f))));
    std::vector<int> sub = rng->sample_without_replacement(f, k);
    std::sort(sub.begin(), sub.end());
    return sub;
  }

  static double gini(double pos, double total) {
    double p = pos / total;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
  }

  int build(const SortedIdx& sorted, int depth) {
    int m = int(sorted[0].size());
    double pos = 0.0;
    for (int r : sorted[0]) pos += y[size_t(r)] != 0 ? 1.0 : 0.0;
    int self = int(nodes.size());
    nodes.push_back({});
    nodes[size_t(self)].value = pos / double(m);
    bool pure = pos == 0.0 || pos == double(m);
    if (pure || depth >= params.max_depth || m < 2 * params.min_samples_leaf) return self;

    SplitChoice best;
    best.gain = -1.0;
    double parent_gini = gini(pos, double(m));
    for (int f : feature_subset()) {
      const std::vector<int>& order = sorted[size_t(f)];
      double left_pos = 0.0;
      for (int i = 0; i + 1 < m; ++i) {
        left_pos += y[size_t(order[size_t(i)])] != 0 ? 1.0 : 0.0;
        double v_lo = x.at(order[size_t(i)], f);
        double v_hi = x.at(order[size_t(i) + 1], f);
        if (!(v_lo < v_hi)) continue;
        int nl = i + 1, nr = m - nl;
        if (nl < params.min_samples_leaf || nr < params.min_samples_leaf) continue;
        double t;
        if (!separating_threshold(v_lo, v_hi, t)) continue;
        double gain = parent_gini - (double(nl) / m) * gini(left_pos, double(nl)) -
                      (double(nr) / m) * gini(pos - left_pos, double(nr));
        gain = std::max(gain, 0.0);
        if (gain > best.gain) best = {true, f, t, gain};
      }
    }
    if (!best.found) return self;

    SortedIdx left, right;
    partition_sorted(x, sorted, best.feature, best.threshold, left, right);
    nodes[size_t(self)].feature = best.feature;
    nodes[size_t(self)].threshold = best.threshold;
    int l = build(left, depth + 1);
    int r = build(right, depth + 1);
    nodes[size_t(self)].left = l;
    nodes[size_t(self)].right = r;
    return self;
  }
};

}  // namespace detail_tree

// Greedy Gini CART; leaf value is the positive fraction. Impure nodes split
// on the best candidate even at zero gain (the XOR case needs two levels).
inline DecisionTree fit_decision_tree(const Dense& x, const std::vector<int>& y,
                                      const TreeParams& params = {}) {
  if (x.rows() == 0) throw std::runtime_error("fit_decision_tree: empty data");
  if (int(y.size()) != x.rows()) throw std::runtime_error("fit_decision_tree: size mismatch");
  std::vector<int> rows(static_cast<size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), 0);
  detail_tree::GiniBuilder b{x, y, params, nullptr, 1.0, {}};
  b.build(detail_tree::argsort_features(x, rows), 0);
  DecisionTree t;
  t.nodes = std::move(b.nodes);
  return t;
}

struct ForestParams {
  int n_trees = 100;
  int max_depth = 8;
  int min_samples_leaf = 1;
  double feature_frac = 0.5;
  bool bootstrap = true;
};

struct RandomForest {
  std::vector<DecisionTree> trees;

  double predict_row(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& t : trees) sum += t.predict_row(x);
    return sum / double(trees.size());
  }
};

inline RandomForest fit_random_forest(const Dense& x, const std::vector<int>& y,
                                      const ForestParams& params, std::uint64_t seed) {
  if (x.rows() == 0) throw std::runtime_error("fit_random_forest: empty data");
  if (int(y.size()) != x.rows()) throw std::runtime_error("fit_random_forest: size mismatch");
  if (params.n_trees < 1 || params.feature_frac <= 0.0) {
    throw std::runtime_error("fit_random_forest: invalid parameters");
  }
  RandomForest rf;
  rf.trees.reserve(size_t(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(seed, "rf.tree", std::uint64_t(t)));
    std::vector<int> rows;
    if (params.bootstrap) {
      rows.resize(size_t(x.rows()));
      for (int& r : rows) r = rng.uniform_int(x.rows());
    } else {
      rows.resize(size_t(x.rows()));
      std::iota(rows.begin(), rows.end(), 0);
    }
    detail_tree::GiniBuilder b{x, y, {params.max_depth, params.min_samples_leaf}, nullptr, 1.0, {}};
    b.rng = &rng;
    b.feature_frac = params.feature_frac;
    b.build(detail_tree::argsort_features(x, rows), 0);
    DecisionTree tree;
    tree.nodes = std::move(b.nodes);
    rf.trees.push_back(std::move(tree));
  }
  return rf;
}

// Second-order split gain and leaf weight for boosted regression trees.
inline double gbt_split_gain(double g_left, double h_left, double g_right, double h_right,
                             double lambda, double gamma) {
  double g_all = g_left + g_right;
  double h_all = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                g_all * g_all / (h_all + lambda)) -
         gamma;
}

inline double gbt_leaf_weight(double g, double h, double lambda) { return -g / (h + lambda); }

struct GbtParams {
  int rounds = 200;
  double learning_rate = 0.1;
  int max_depth = 4;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_hessian = 1e-3;
};

struct GbtModel {
  std::vector<DecisionTree> trees;
  double base_score = 0.0;  // log-odds of the training prior
  GbtParams params;
  std::vector<double> train_logloss;  // entry 0 = prior, then one per round

  double margin_row(std::span<const double> x) const {
    double m = base_score;
    for (const auto& t : trees) m += params.learning_rate * t.predict_row(x);
    return m;
  }
  double predict_row(std::span<const double> x) const {
    return 1.0 / (1.0 + std::exp(-margin_row(x)));
  }
};

namespace detail_tree {

struct GbtBuilder {
  const Dense& x;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  GbtParams params;
  std::vector<TreeNode> nodes;

  int build(const SortedIdx& sorted, int depth) {
    int m = int(sorted[0].size());
    double g_sum = 0.0, h_sum = 0.0;
    for (int r : sorted[0]) {
      g_sum += grad[size_t(r)];
      h_sum += hess[size_t(r)];
    }
    int self = int(nodes.size());
    nodes.push_back({});
    nodes[size_t(self)].value = gbt_leaf_weight(g_sum, h_sum, params.lambda);
    if (depth >= params.max_depth || m < 2) return self;

    SplitChoice best;
    for (int f = 0; f < x.cols(); ++f) {
      const std::vector<int>& order = sorted[size_t(f)];
      double gl = 0.0, hl = 0.0;
      for (int i = 0; i + 1 < m; ++i) {
        gl += grad[size_t(order[size_t(i)])];
        hl += hess[size_t(order[size_t(i)])];
        double v_lo = x.at(order[size_t(i)], f);
        double v_hi = x.at(order[size_t(i) + 1], f);
        if (!(v_lo < v_hi)) continue;
        double gr = g_sum - gl, hr = h_sum - hl;
        if (hl < params.min_child_hessian || hr < params.min_child_hessian) continue;
        double t;
        if (!separating_threshold(v_lo, v_hi, t)) continue;
        double gain = gbt_split_gain(gl, hl, gr, hr, params.lambda, params.gamma);
        // strictly positive gain required; strict > keeps the first feature
        // and smallest threshold on ties
        if (gain > 0.0 && gain > best.gain) best = {true, f, t, gain};
      }
    }
    if (!best.found) return self;

    SortedIdx left, right;
    partition_sorted(x, sorted, best.feature, best.threshold, left, right);
    nodes[size_t(self)].feature = best.feature;
    nodes[size_t(self)].threshold = best.threshold;
    int l = build(left, depth + 1);
    int r = build(right, depth + 1);
    nodes[size_t(self)].left = l;
    nodes[size_t(self)].right = r;
    return self;
  }
};

}  // namespace detail_tree

// Boosted trees under logistic loss: g = p - y, h = p(1-p), exact greedy
// splits by the second-order gain. Deterministic, no row subsampling.
inline GbtModel fit_gbt(const Dense& x, const std::vector<int>& y, const GbtParams& params = {}) {
  if (x.rows() == 0) throw std::runtime_error("fit_gbt: empty data");
  if (int(y.size()) != x.rows()) throw std::runtime_error("fit_gbt: size mismatch");
  if (params.rounds < 0 || params.learning_rate <= 0.0 || params.lambda < 0.0) {
    throw std::runtime_error("fit_gbt: invalid parameters");
  }
  int n = x.rows();
  GbtModel model;
  model.params = params;
  double prior = 0.0;
  for (int yi : y) prior += yi != 0 ? 1.0 : 0.0;
  prior = std::clamp(prior / double(n), 1e-6, 1.0 - 1e-6);
  model.base_score = std::log(prior / (1.0 - prior));

  std::vector<double> margin(size_t(n), model.base_score);
  auto logloss = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double m = margin[size_t(i)];
      // log(1 + exp(-z)) computed stably
      double z = y[size_t(i)] != 0 ? m : -m;
      s += z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    }
    return s / double(n);
  };
  model.train_logloss.push_back(logloss());

  std::vector<int> rows(static_cast<size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  detail_tree::SortedIdx root_sorted = detail_tree::argsort_features(x, rows);
  std::vector<double> grad(static_cast<size_t>(n)), hess(static_cast<size_t>(n));
  for (int round = 0; round < params.rounds; ++round) {
    for (int i = 0; i < n; ++i) {
      double p = 1.0 / (1.0 + std::exp(-margin[size_t(i)]));
      grad[size_t(i)] = p - (y[size_t(i)] != 0 ? 1.0 : 0.0);
      hess[size_t(i)] = p * (1.0 - p);
    }
    detail_tree::GbtBuilder b{x, grad, hess, params, {}};
    b.build(root_sorted, 0);
    DecisionTree tree;
    tree.nodes = std::move(b.nodes);
    for (int i = 0; i < n; ++i) {
      margin[size_t(i)] += params.learning_rate * tree.predict_row(x.row(i));
    }
    model.trees.push_back(std::move(tree));
    model.train_logloss.push_back(logloss());
  }
  return model;
}

// ---- model serialization: plain text, %.17g doubles, bit-exact reload ----

namespace detail_tree {

inline void write_tree(std::ostream& out, const DecisionTree& t) {
  char buf[40];
  out << "tree " << t.nodes.size() << "\n";
  for (const auto& n : t.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g", n.threshold);
    out << "n " << n.feature << ' ' << buf << ' ' << n.left << ' ' << n.right;
    std::snprintf(buf, sizeof buf, "%.17g", n.value);
    out << ' ' << buf << "\n";
  }
}

inline DecisionTree read_tree(std::istream& in) {
  std::string tok;
  size_t count = 0;
  if (!(in >> tok >> count) || tok != "tree") {
    throw std::runtime_error("model parse error: expected tree header");
  }
  DecisionTree t;
  t.nodes.resize(count);
  for (auto& n : t.nodes) {
    if (!(in >> tok >> n.feature >> n.threshold >> n.left >> n.right >> n.value) || tok != "n") {
      throw std::runtime_error("model parse error: bad node line");
    }
  }
  return t;
}

}  // namespace detail_tree

inline void save_decision_tree(const DecisionTree& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_decision_tree: cannot open " + path);
  out << "netrank_model dt\n";
  detail_tree::write_tree(out, t);
}

inline void save_random_forest(const RandomForest& rf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_random_forest: cannot open " + path);
  out << "netrank_model rf\nn_trees " << rf.trees.size() << "\n";
  for (const auto& t : rf.trees) detail_tree::write_tree(out, t);
}

inline void save_gbt(const GbtModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_gbt: cannot open " + path);
  char buf[40];
  out << "netrank_model gbt\n";
  std::snprintf(buf, sizeof buf, "%.17g", m.base_score);
  out << "base_score " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", m.params.learning_rate);
  out << "learning_rate " << buf << "\n";
  out << "rounds " << m.trees.size() << "\n";
  for (const auto& t : m.trees) detail_tree::write_tree(out, t);
}

inline std::string read_model_kind(std::istream& in) {
  std::string magic, kind;
  if (!(in >> magic >> kind) || magic != "netrank_model") {
    throw std::runtime_error("model parse error: bad magic");
  }
  return kind;
}

inline DecisionTree load_decision_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_decision_tree: cannot open " + path);
  if (read_model_kind(in) != "dt") throw std::runtime_error("load_decision_tree: not a dt model");
  return detail_tree::read_tree(in);
}

inline RandomForest load_random_forest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_random_forest: cannot open " + path);
  if (read_model_kind(in) != "rf") throw std::runtime_error("load_random_forest: not an rf model");
  std::string tok;
  size_t count = 0;
  if (!(in >> tok >> count) || tok != "n_trees") {
    throw std::runtime_error("load_random_forest: bad tree count");
  }
  RandomForest rf;
  for (size_t i = 0; i < count; ++i) rf.trees.push_back(detail_tree::read_tree(in));
  return rf;
}

inline GbtModel load_gbt(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_gbt: cannot open " + path);
  if (read_model_kind(in) != "gbt") throw std::runtime_error("load_gbt: not a gbt model");
  GbtModel m;
  std::string tok;
  size_t rounds = 0;
  if (!(in >> tok >> m.base_score) || tok != "base_score" ||
      !(in >> tok >> m.params.learning_rate) || tok != "learning_rate" ||
      !(in >> tok >> rounds) || tok != "rounds") {
    throw std::runtime_error("load_gbt: bad header");
  }
  for (size_t i = 0; i < rounds; ++i) m.trees.push_back(detail_tree::read_tree(in));
  return m;
}

}  // namespace netrank
