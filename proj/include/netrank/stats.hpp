#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "netrank/dense.hpp"
#include "netrank/error.hpp"
#include "netrank/graph.hpp"
#include "netrank/rng.hpp"

namespace netrank {

struct ScoredNode {
  std::string id;
  double score = 0.0;
};

// Rank-statistic AUC: (concordant pairs + half the ties) / (pos * neg),
// computed via average ranks in O(n log n). Tie groups carry the average
// rank of their span, which reproduces pair counting exactly.
inline double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::runtime_error("auc_roc: size mismatch");
  size_t n = scores.size();
  long long n_pos = 0;
  for (int y : labels) n_pos += (y != 0);
  long long n_neg = (long long)(n)-n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::runtime_error("auc_roc: needs both classes");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[size_t(a)] < scores[size_t(b)]; });
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[size_t(order[j + 1])] == scores[size_t(order[i])]) ++j;
    double avg_rank = (double(i + 1) + double(j + 1)) / 2.0;  // ranks are 1-based
    for (size_t k = i; k <= j; ++k) {
      if (labels[size_t(order[k])] != 0) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  double u = rank_sum_pos - double(n_pos) * double(n_pos + 1) / 2.0;
  return u / (double(n_pos) * double(n_neg));
}

struct ContingencyTable {
  long long a = 0, b = 0, c = 0, d = 0;
  long long n() const { return a + b + c + d; }
  void validate() const {
    if (a < 0 || b < 0 || c < 0 || d < 0) throw std::runtime_error("ContingencyTable: negative count");
    if (n() < 1) throw std::runtime_error("ContingencyTable: empty table");
  }
};

// One-tailed (enrichment direction) Fisher exact test: hypergeometric tail
// P(X >= a) with margins fixed. Accumulated in log space so p-values far
// below 1e-200 stay representable.
inline double fisher_exact_greater(const ContingencyTable& t) {
  t.validate();
  long long r1 = t.a + t.b;  // row margins
  long long r2 = t.c + t.d;
  long long c1 = t.a + t.c;  // column margin of the "hit" column
  long long n = t.n();
  long long k_min = std::max(t.a, std::max(0ll, c1 - r2));
  long long k_max = std::min(r1, c1);
  if (k_min > k_max) return 1.0;
  auto lchoose = [](long long nn, long long kk) {
    return std::lgamma(double(nn + 1)) - std::lgamma(double(kk + 1)) -
           std::lgamma(double(nn - kk + 1));
  };
  double log_denom = lchoose(n, c1);
  std::vector<double> log_terms;
  log_terms.reserve(size_t(k_max - k_min + 1));
  double log_max = -std::numeric_limits<double>::infinity();
  for (long long k = k_min; k <= k_max; ++k) {
    double lt = lchoose(r1, k) + lchoose(r2, c1 - k) - log_denom;
    log_terms.push_back(lt);
    log_max = std::max(log_max, lt);
  }
  double sum = 0.0;
  for (double lt : log_terms) sum += std::exp(lt - log_max);
  double p = std::exp(log_max + std::log(sum));
  return std::min(p, 1.0);
}

// Centered moving average; at the boundaries the window shrinks
// symmetrically so the mean stays centered on the current point.
inline std::vector<double> moving_average(std::span<const double> series, int window = 15) {
  if (window < 1 || window % 2 == 0) {
    throw std::runtime_error("moving_average: window must be odd and >= 1");
  }
  int n = int(series.size());
  int half = window / 2;
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int k = std::min({half, i, n - 1 - i});
    double sum = 0.0;
    for (int j = i - k; j <= i + k; ++j) sum += series[size_t(j)];
    out[size_t(i)] = sum / double(2 * k + 1);
  }
  return out;
}

struct PercentileBin {
  double lo_pct = 0.0, hi_pct = 0.0;
  int size = 0;
  int overlap = 0;      // known positives inside the bin
  double p_value = 1.0;  // Fisher enrichment of the bin against the known set
};

// Splits the descending ranking into equal-width percentile bins (the last
// bin absorbs the remainder) and counts known positives per bin.
inline std::vector<PercentileBin> percentile_overlap(const std::vector<ScoredNode>& ranking,
                                                     const LabelSet& known,
                                                     double bin_width_pct = 5.0) {
  if (ranking.empty()) throw std::runtime_error("percentile_overlap: empty ranking");
  if (bin_width_pct <= 0.0 || bin_width_pct > 100.0) {
    throw std::runtime_error("percentile_overlap: bin width must be in (0,100]");
  }
  std::unordered_set<std::string> ranked;
  ranked.reserve(ranking.size());
  for (const auto& r : ranking) ranked.insert(r.id);
  for (const auto& id : known.universe) {
    if (!ranked.count(id)) {
      throw std::runtime_error("percentile_overlap: ranking does not cover labeled id " + id);
    }
  }
  int n = int(ranking.size());
  int n_bins = std::max(1, int(100.0 / bin_width_pct));
  int bin_size = n / n_bins;
  if (bin_size == 0) {
    n_bins = n;
    bin_size = 1;
  }
  long long total_known = 0;
  for (const auto& r : ranking) total_known += known.is_positive(r.id) ? 1 : 0;
  std::vector<PercentileBin> bins(static_cast<size_t>(n_bins));
  for (int b = 0; b < n_bins; ++b) {
    int lo = b * bin_size;
    int hi = (b == n_bins - 1) ? n : (b + 1) * bin_size;
    PercentileBin& bin = bins[size_t(b)];
    bin.lo_pct = 100.0 * double(lo) / double(n);
    bin.hi_pct = (b == n_bins - 1) ? 100.0 : 100.0 * double(hi) / double(n);
    bin.size = hi - lo;
    for (int i = lo; i < hi; ++i) bin.overlap += known.is_positive(ranking[size_t(i)].id) ? 1 : 0;
    ContingencyTable t;
    t.a = bin.overlap;
    t.b = bin.size - bin.overlap;
    t.c = total_known - bin.overlap;
    t.d = (n - bin.size) - t.c;
    bin.p_value = fisher_exact_greater(t);
  }
  return bins;
}

// Named gene sets (pathways), GMT style.
struct GeneSetCollection {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> members;
};

// name TAB description TAB member ids...
inline GeneSetCollection load_gmt(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_gmt: cannot open " + path);
  GeneSetCollection gsc;
  std::unordered_set<std::string> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string name, desc, cell;
    if (!std::getline(ss, name, '\t') || !std::getline(ss, desc, '\t')) {
      throw std::runtime_error("load_gmt: malformed line " + std::to_string(line_no));
    }
    if (!seen.insert(name).second) {
      throw std::runtime_error("load_gmt: duplicate set name '" + name + "'");
    }
    std::vector<std::string> members;
    while (std::getline(ss, cell, '\t')) {
      if (!cell.empty()) members.push_back(cell);
    }
    if (members.empty()) {
      throw std::runtime_error("load_gmt: empty gene set '" + name + "' at line " +
                               std::to_string(line_no));
    }
    gsc.names.push_back(name);
    gsc.members.push_back(std::move(members));
  }
  if (gsc.names.empty()) throw std::runtime_error("load_gmt: no gene sets in " + path);
  return gsc;
}

struct EnrichmentScores {
  std::vector<std::string> pathway;  // same order as the input collection
  std::vector<double> score;         // -log10 Fisher p of the overlap
  int empty_pathways = 0;            // pathways disjoint from the universe
};

// Per pathway, the -log10 one-tailed Fisher p of |query ∩ pathway| against
// the universe margins. Pathways disjoint from the universe score 0.
inline EnrichmentScores enrichment_scores(const std::vector<std::string>& query,
                                          const GeneSetCollection& pathways,
                                          const std::vector<std::string>& universe) {
  std::unordered_set<std::string> uni(universe.begin(), universe.end());
  std::unordered_set<std::string> q;
  for (const auto& id : query) {
    if (!uni.count(id)) throw std::runtime_error("enrichment_scores: query id outside universe: " + id);
    q.insert(id);
  }
  EnrichmentScores out;
  out.pathway = pathways.names;
  out.score.resize(pathways.names.size(), 0.0);
  for (size_t s = 0; s < pathways.names.size(); ++s) {
    long long in_universe = 0, in_query = 0;
    std::unordered_set<std::string> dedup;
    for (const auto& id : pathways.members[s]) {
      if (!dedup.insert(id).second) continue;
      if (!uni.count(id)) continue;
      ++in_universe;
      if (q.count(id)) ++in_query;
    }
    if (in_universe == 0) {
      ++out.empty_pathways;
      out.score[s] = 0.0;
      continue;
    }
    ContingencyTable t;
    t.a = in_query;
    t.b = (long long)(q.size()) - in_query;
    t.c = in_universe - in_query;
    t.d = (long long)(uni.size()) - (long long)(q.size()) - t.c;
    out.score[s] = -std::log10(fisher_exact_greater(t));
    if (out.score[s] < 0.0) out.score[s] = 0.0;  // guard against -0
  }
  return out;
}

// Stratified fold assignment: classes are shuffled independently and dealt
// round-robin, so per-fold class counts differ from n_class/k by < 1.
inline std::vector<int> stratified_folds(const std::vector<int>& y, int k, Rng& rng) {
  if (k < 2) throw std::runtime_error("stratified_folds: k must be >= 2");
  std::vector<int> pos, neg;
  for (int i = 0; i < int(y.size()); ++i) (y[size_t(i)] != 0 ? pos : neg).push_back(i);
  if (int(pos.size()) < k || int(neg.size()) < k) {
    throw std::runtime_error("stratified_folds: class too small for " + std::to_string(k) +
                             " folds");
  }
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<int> fold_of(y.size());
  for (int i = 0; i < int(pos.size()); ++i) fold_of[size_t(pos[size_t(i)])] = i % k;
  for (int i = 0; i < int(neg.size()); ++i) fold_of[size_t(neg[size_t(i)])] = i % k;
  return fold_of;
}

struct CvResult {
  int best_index = 0;
  std::vector<double> mean_auc;               // one per grid point
  std::vector<std::vector<double>> fold_aucs; // per grid point, per fold
};

// k-fold cross-validated grid search on held-out AUC. The caller supplies
// the fit+predict routine for one grid point; ties go to the earlier point.
using FitPredictFn =
    std::function<std::vector<double>(const Dense& x_train, const std::vector<int>& y_train,
                                      int param_index, int fold, const Dense& x_test)>;

inline CvResult cross_val_grid_search(const Dense& x, const std::vector<int>& y, int n_params,
                                      int k, std::uint64_t seed, const FitPredictFn& fit_predict) {
  if (n_params < 1) throw std::runtime_error("cross_val_grid_search: empty grid");
  if (int(y.size()) != x.rows()) throw std::runtime_error("cross_val_grid_search: size mismatch");
  Rng fold_rng(derive_seed(seed, "cv.folds"));
  std::vector<int> fold_of = stratified_folds(y, k, fold_rng);
  CvResult res;
  res.mean_auc.resize(size_t(n_params));
  res.fold_aucs.assign(size_t(n_params), std::vector<double>(size_t(k)));
  for (int p = 0; p < n_params; ++p) {
    double total = 0.0;
    for (int f = 0; f < k; ++f) {
      std::vector<int> train_rows, test_rows;
      for (int i = 0; i < x.rows(); ++i) (fold_of[size_t(i)] == f ? test_rows : train_rows).push_back(i);
      Dense x_train(int(train_rows.size()), x.cols());
      Dense x_test(int(test_rows.size()), x.cols());
      std::vector<int> y_train(train_rows.size()), y_test(test_rows.size());
      for (int i = 0; i < int(train_rows.size()); ++i) {
        auto src = x.row(train_rows[size_t(i)]);
        std::copy(src.begin(), src.end(), x_train.row(i).begin());
        y_train[size_t(i)] = y[size_t(train_rows[size_t(i)])];
      }
      for (int i = 0; i < int(test_rows.size()); ++i) {
        auto src = x.row(test_rows[size_t(i)]);
        std::copy(src.begin(), src.end(), x_test.row(i).begin());
        y_test[size_t(i)] = y[size_t(test_rows[size_t(i)])];
      }
      std::vector<double> scores = fit_predict(x_train, y_train, p, f, x_test);
      if (scores.size() != test_rows.size()) {
        throw std::runtime_error("cross_val_grid_search: fit_predict returned wrong count");
      }
      double auc = auc_roc(scores, y_test);
      res.fold_aucs[size_t(p)][size_t(f)] = auc;
      total += auc;
    }
    res.mean_auc[size_t(p)] = total / double(k);
    if (res.mean_auc[size_t(p)] > res.mean_auc[size_t(res.best_index)]) res.best_index = p;
  }
  return res;
}

}  // namespace netrank
