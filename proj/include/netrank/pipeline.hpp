#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "netrank/embedding.hpp"
#include "netrank/graph.hpp"
#include "netrank/rng.hpp"
#include "netrank/stats.hpp"
#include "netrank/trees.hpp"

namespace netrank {

struct CorrelationFilterResult {
  FeatureMatrix filtered;
  std::vector<std::string> kept;
  std::vector<std::string> dropped_zero_variance;
  std::vector<std::string> dropped_correlated;
};

// Greedy left-to-right pruning: zero-variance columns go first, then a
// column is dropped when |Pearson r| against any retained earlier column
// reaches the threshold. Idempotent by construction.
inline CorrelationFilterResult correlation_filter(const FeatureMatrix& x, double threshold) {
  if (threshold <= 0.0 || threshold > 1.0) {
    throw std::runtime_error("correlation_filter: threshold must be in (0,1]");
  }
  if (x.cols() < 1) throw std::runtime_error("correlation_filter: no columns");
  int n = x.rows(), f = x.cols();
  std::vector<double> mean(size_t(f), 0.0), sd(size_t(f), 0.0);
  std::vector<char> constant(size_t(f), 1);
  for (int j = 0; j < f; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += x.values.at(i, j);
      if (x.values.at(i, j) != x.values.at(0, j)) constant[size_t(j)] = 0;
    }
    mean[size_t(j)] = s / double(n);
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = x.values.at(i, j) - mean[size_t(j)];
      v += d * d;
    }
    sd[size_t(j)] = std::sqrt(v);
  }
  CorrelationFilterResult res;
  std::vector<int> kept_idx;
  for (int j = 0; j < f; ++j) {
    if (constant[size_t(j)]) {  // exact constancy; r is undefined there
      res.dropped_zero_variance.push_back(x.col_names[size_t(j)]);
      continue;
    }
    bool drop = false;
    for (int k : kept_idx) {
      double cov = 0.0;
      for (int i = 0; i < n; ++i) {
        cov += (x.values.at(i, j) - mean[size_t(j)]) * (x.values.at(i, k) - mean[size_t(k)]);
      }
      double r = cov / (sd[size_t(j)] * sd[size_t(k)]);
      if (std::abs(r) >= threshold) {
        drop = true;
        break;
      }
    }
    if (drop) {
      res.dropped_correlated.push_back(x.col_names[size_t(j)]);
    } else {
      kept_idx.push_back(j);
    }
  }
  if (kept_idx.empty()) throw std::runtime_error("correlation_filter: all columns dropped");
  res.filtered.row_ids = x.row_ids;
  res.filtered.values = Dense(n, int(kept_idx.size()));
  for (int k = 0; k < int(kept_idx.size()); ++k) {
    res.filtered.col_names.push_back(x.col_names[size_t(kept_idx[size_t(k)])]);
    for (int i = 0; i < n; ++i) res.filtered.values.at(i, k) = x.values.at(i, kept_idx[size_t(k)]);
  }
  res.filtered.rebuild_index();
  res.kept = res.filtered.col_names;
  return res;
}

struct AssembleResult {
  FeatureMatrix assembled;
  int skipped_rows = 0;  // ids present on only one side
};

// Inner join on id; embedding columns come first, then the extended set.
// Row order follows the embedding matrix.
inline AssembleResult assemble_features(const EmbeddingMatrix& emb, const FeatureMatrix& ext) {
  AssembleResult res;
  std::vector<std::pair<int, int>> joined;  // (emb row, ext row)
  for (int i = 0; i < int(emb.row_ids.size()); ++i) {
    auto it = ext.row_of.find(emb.row_ids[size_t(i)]);
    if (it == ext.row_of.end()) {
      ++res.skipped_rows;
      continue;
    }
    joined.emplace_back(i, it->second);
  }
  res.skipped_rows += int(ext.row_ids.size()) - int(joined.size());
  if (joined.empty()) throw std::runtime_error("assemble_features: id sets are disjoint");
  int f = emb.dim + ext.cols();
  res.assembled.values = Dense(int(joined.size()), f);
  for (int j = 0; j < emb.dim; ++j) res.assembled.col_names.push_back("emb" + std::to_string(j));
  for (const auto& c : ext.col_names) res.assembled.col_names.push_back(c);
  for (int r = 0; r < int(joined.size()); ++r) {
    auto [ei, xi] = joined[size_t(r)];
    res.assembled.row_ids.push_back(emb.row_ids[size_t(ei)]);
    auto erow = emb.values.row(ei);
    auto xrow = ext.values.row(xi);
    auto orow = res.assembled.values.row(r);
    std::copy(erow.begin(), erow.end(), orow.begin());
    std::copy(xrow.begin(), xrow.end(), orow.begin() + emb.dim);
  }
  res.assembled.rebuild_index();
  return res;
}

struct FoldSpec {
  int fold_index = 0;
  std::vector<std::string> positives;  // floor(positive_frac * |pos|) draws
  std::vector<std::string> negatives;  // neg_ratio times as many
};

// Independent random subsamples per fold: positive_frac of the minority and
// neg_ratio times that count from the majority, both without replacement.
inline std::vector<FoldSpec> subsample_folds(const LabelSet& labels, int m_folds,
                                             double positive_frac, int neg_ratio,
                                             std::uint64_t seed) {
  if (m_folds < 1) throw std::runtime_error("subsample_folds: M must be >= 1");
  if (positive_frac <= 0.0 || positive_frac > 1.0) {
    throw std::runtime_error("subsample_folds: positive_frac must be in (0,1]");
  }
  if (neg_ratio < 1) throw std::runtime_error("subsample_folds: neg_ratio must be >= 1");
  labels.validate();
  std::vector<std::string> negatives = labels.negatives();
  int n_pos_fold = int(positive_frac * double(labels.positives.size()));
  if (n_pos_fold < 1) throw std::runtime_error("subsample_folds: no positives after sampling");
  int n_neg_fold = neg_ratio * n_pos_fold;
  if (int(negatives.size()) < n_neg_fold) {
    throw std::runtime_error("subsample_folds: need " + std::to_string(n_neg_fold) +
                             " negatives, have " + std::to_string(negatives.size()));
  }
  std::vector<FoldSpec> folds;
  folds.reserve(size_t(m_folds));
  for (int fold = 0; fold < m_folds; ++fold) {
    Rng rng(derive_seed(seed, "fold", std::uint64_t(fold)));
    FoldSpec fs;
    fs.fold_index = fold;
    for (int k : rng.sample_without_replacement(int(labels.positives.size()), n_pos_fold)) {
      fs.positives.push_back(labels.positives[size_t(k)]);
    }
    for (int k : rng.sample_without_replacement(int(negatives.size()), n_neg_fold)) {
      fs.negatives.push_back(negatives[size_t(k)]);
    }
    folds.push_back(std::move(fs));
  }
  return folds;
}

enum class ClassifierKind { DecisionTree, RandomForest, Gbt };

inline std::string classifier_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::DecisionTree: return "dt";
    case ClassifierKind::RandomForest: return "rf";
    case ClassifierKind::Gbt: return "gbt";
  }
  return "?";
}

struct ClassifierParams {
  ClassifierKind kind = ClassifierKind::Gbt;
  TreeParams dt;
  ForestParams rf;
  GbtParams gbt;
};

using ClassifierModel = std::variant<DecisionTree, RandomForest, GbtModel>;

inline ClassifierModel fit_classifier(const Dense& x, const std::vector<int>& y,
                                      const ClassifierParams& params, std::uint64_t seed) {
  switch (params.kind) {
    case ClassifierKind::DecisionTree: return fit_decision_tree(x, y, params.dt);
    case ClassifierKind::RandomForest: return fit_random_forest(x, y, params.rf, seed);
    case ClassifierKind::Gbt: return fit_gbt(x, y, params.gbt);
  }
  throw std::runtime_error("fit_classifier: unknown kind");
}

inline double predict_classifier(const ClassifierModel& model, std::span<const double> row) {
  return std::visit([&](const auto& m) { return m.predict_row(row); }, model);
}

struct Ensemble {
  ClassifierParams params;
  std::vector<ClassifierModel> models;
  std::vector<FoldSpec> folds;
};

// One classifier per fold, trained only on that fold's sampled rows.
inline Ensemble train_ensemble(const FeatureMatrix& x, const LabelSet& labels, int m_folds,
                               const ClassifierParams& params, std::uint64_t seed,
                               double positive_frac = 0.8, int neg_ratio = 2) {
  for (const auto& id : labels.universe) {
    if (!x.row_of.count(id)) {
      throw std::runtime_error("train_ensemble: labeled id '" + id + "' has no feature row");
    }
  }
  Ensemble ens;
  ens.params = params;
  ens.folds = subsample_folds(labels, m_folds, positive_frac, neg_ratio, seed);
  for (const auto& fold : ens.folds) {
    int rows = int(fold.positives.size() + fold.negatives.size());
    Dense xf(rows, x.cols());
    std::vector<int> yf(static_cast<size_t>(rows));
    int r = 0;
    for (const auto& id : fold.positives) {
      auto src = x.values.row(x.row_of.at(id));
      std::copy(src.begin(), src.end(), xf.row(r).begin());
      yf[size_t(r)] = 1;
      ++r;
    }
    for (const auto& id : fold.negatives) {
      auto src = x.values.row(x.row_of.at(id));
      std::copy(src.begin(), src.end(), xf.row(r).begin());
      yf[size_t(r)] = 0;
      ++r;
    }
    ens.models.push_back(
        fit_classifier(xf, yf, params, derive_seed(seed, "fit", std::uint64_t(fold.fold_index))));
  }
  return ens;
}

// Mean of the per-fold probabilities in fold-index order, sorted descending
// by score with ties broken by id.
inline std::vector<ScoredNode> predict_ensemble(const Ensemble& ens, const FeatureMatrix& x) {
  if (ens.models.empty()) throw std::runtime_error("predict_ensemble: empty ensemble");
  std::vector<ScoredNode> out;
  out.reserve(x.row_ids.size());
  for (int i = 0; i < int(x.row_ids.size()); ++i) {
    double sum = 0.0;
    for (const auto& model : ens.models) sum += predict_classifier(model, x.values.row(i));
    out.push_back({x.row_ids[size_t(i)], sum / double(ens.models.size())});
  }
  std::sort(out.begin(), out.end(), [](const ScoredNode& a, const ScoredNode& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  return out;
}

inline void write_predictions_csv(const std::vector<ScoredNode>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_predictions_csv: cannot open " + path);
  out << "id,score\n";
  char buf[40];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9g", r.score);
    out << r.id << ',' << buf << '\n';
  }
}

inline std::vector<ScoredNode> read_predictions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_predictions_csv: cannot open " + path);
  std::string line;
  std::vector<ScoredNode> rows;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == "id,score" || line[0] == '#') continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("read_predictions_csv: malformed line " + std::to_string(line_no));
    }
    rows.push_back({line.substr(0, comma), std::stod(line.substr(comma + 1))});
  }
  if (rows.empty()) throw std::runtime_error("read_predictions_csv: no rows in " + path);
  return rows;
}

}  // namespace netrank
