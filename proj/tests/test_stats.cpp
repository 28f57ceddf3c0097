#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "netrank/rng.hpp"
#include "netrank/stats.hpp"
#include "test_util.hpp"

using namespace netrank;

namespace {

// independent oracle: count concordant pairs and half-ties directly
double auc_pair_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0.0;
  long long n_pos = 0, n_neg = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (y[i] == 0) continue;
    ++n_pos;
    for (size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      if (s[i] > s[j]) num += 1.0;
      else if (s[i] == s[j]) num += 0.5;
    }
  }
  for (int v : y) n_neg += (v == 0);
  return num / (double(n_pos) * double(n_neg));
}

// independent oracle: binomial coefficients as double products
double choose_d(long long n, long long k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (long long i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

double fisher_enum_oracle(long long a, long long b, long long c, long long d) {
  long long r1 = a + b, r2 = c + d, c1 = a + c, n = a + b + c + d;
  double denom = choose_d(n, c1);
  double p = 0.0;
  for (long long k = a; k <= std::min(r1, c1); ++k) {
    p += choose_d(r1, k) * choose_d(r2, c1 - k) / denom;
  }
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("auc: perfect ranking, all ties, hand-counted half case") {
  std::vector<double> s1{0.9, 0.8, 0.3, 0.2};
  std::vector<int> y{1, 1, 0, 0};
  CHECK(auc_roc(s1, y) == 1.0);
  std::vector<double> s2{0.5, 0.5, 0.5, 0.5};
  CHECK(auc_roc(s2, y) == 0.5);
  std::vector<double> s3{0.8, 0.3, 0.6, 0.5};
  CHECK(auc_roc(s3, y) == 0.5);  // 2 of 4 pairs concordant
  std::vector<int> single{1, 1, 1, 1};
  CHECK_THROWS_AS(auc_roc(s1, single), std::runtime_error);
}

TEST_CASE("auc equals the pair-counting oracle bit-for-bit (property)") {
  Rng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + rng.uniform_int(199);
    std::vector<double> s(static_cast<size_t>(n));
    std::vector<int> y(static_cast<size_t>(n));
    bool has_pos = false, has_neg = false;
    for (int i = 0; i < n; ++i) {
      // coarse grid forces plenty of ties
      s[size_t(i)] = double(rng.uniform_int(10)) / 10.0;
      y[size_t(i)] = rng.uniform() < 0.3 ? 1 : 0;
      (y[size_t(i)] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    double fast = auc_roc(s, y);
    double slow = auc_pair_oracle(s, y);
    CHECK(fast == slow);
  }
}

TEST_CASE("auc complement and monotone invariance (property)") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 10 + rng.uniform_int(50);
    std::vector<double> s(static_cast<size_t>(n));
    std::vector<int> y(static_cast<size_t>(n)), flipped(static_cast<size_t>(n));
    bool has_pos = false, has_neg = false;
    for (int i = 0; i < n; ++i) {
      s[size_t(i)] = double(rng.uniform_int(8));
      y[size_t(i)] = rng.uniform() < 0.5 ? 1 : 0;
      flipped[size_t(i)] = 1 - y[size_t(i)];
      (y[size_t(i)] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    CHECK(auc_roc(s, y) + auc_roc(s, flipped) == 1.0);
    std::vector<double> mono(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) mono[size_t(i)] = std::exp(0.5 * s[size_t(i)]) + 3.0;
    CHECK(auc_roc(mono, y) == auc_roc(s, y));
  }
}

TEST_CASE("fisher: hand-enumerated tables") {
  CHECK(fisher_exact_greater({3, 1, 1, 3}) == doctest::Approx(17.0 / 70.0).epsilon(1e-12));
  CHECK(fisher_exact_greater({0, 2, 2, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fisher_exact_greater({2, 0, 0, 2}) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("fisher matches enumeration within 1e-12 for sampled small tables") {
  Rng rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    long long a = rng.uniform_int(15), b = rng.uniform_int(15);
    long long c = rng.uniform_int(15), d = rng.uniform_int(15);
    if (a + b + c + d < 1) continue;
    double p = fisher_exact_greater({a, b, c, d});
    double oracle = fisher_enum_oracle(a, b, c, d);
    CHECK(std::abs(p - oracle) <= 1e-12);
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("fisher survives far-sub-1e-200 tails via the log-space path") {
  // p = 1 / C(700, 350), about 1e-209
  double p = fisher_exact_greater({350, 0, 0, 350});
  CHECK(p > 0.0);
  CHECK(p < 1e-200);
  CHECK(std::log10(p) == doctest::Approx(-209.2595).epsilon(1e-3));
}

TEST_CASE("moving average: constant, ramp, length") {
  std::vector<double> constant(9, 2.0);
  auto mc = moving_average(constant, 15);
  CHECK(mc.size() == constant.size());
  for (double v : mc) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
  std::vector<double> ramp(15);
  for (int i = 0; i < 15; ++i) ramp[size_t(i)] = double(i + 1);
  auto mr = moving_average(ramp, 15);
  CHECK(mr[7] == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(mr.size() == 15);
  CHECK_THROWS_AS(moving_average(ramp, 4), std::runtime_error);
}

TEST_CASE("percentile overlap: top block lands in the first bin") {
  std::vector<ScoredNode> ranking;
  std::vector<std::string> universe;
  for (int i = 0; i < 100; ++i) {
    std::string id = "g" + std::to_string(1000 + i);
    ranking.push_back({id, 1.0 - double(i) / 100.0});
    universe.push_back(id);
  }
  std::vector<std::string> pos(universe.begin(), universe.begin() + 5);
  LabelSet known = make_label_set(pos, universe);
  auto bins = percentile_overlap(ranking, known, 5.0);
  CHECK(bins.size() == 20);
  CHECK(bins[0].overlap == 5);
  int total = 0;
  for (const auto& b : bins) total += b.overlap;
  CHECK(total == 5);
  for (size_t i = 1; i < bins.size(); ++i) CHECK(bins[i].overlap == 0);
  CHECK(bins[0].p_value < 1e-6);  // strong enrichment in the top bin
}

TEST_CASE("percentile bins partition the ranking (property)") {
  Rng rng(7);
  std::vector<ScoredNode> ranking;
  std::vector<std::string> universe;
  for (int i = 0; i < 237; ++i) {
    std::string id = "n" + std::to_string(i);
    ranking.push_back({id, rng.uniform()});
    universe.push_back(id);
  }
  std::sort(ranking.begin(), ranking.end(),
            [](const ScoredNode& a, const ScoredNode& b) { return a.score > b.score; });
  std::vector<std::string> pos;
  for (int i = 0; i < 237; ++i) {
    if (rng.uniform() < 0.2) pos.push_back("n" + std::to_string(i));
  }
  LabelSet known = make_label_set(pos, universe);
  auto bins = percentile_overlap(ranking, known, 5.0);
  int total_size = 0, total_overlap = 0;
  for (const auto& b : bins) {
    total_size += b.size;
    total_overlap += b.overlap;
  }
  CHECK(total_size == 237);
  CHECK(total_overlap == int(known.positives.size()));
}

TEST_CASE("uniform scores put bin_frac of the known set in the top bin on average") {
  Rng rng(2024);
  const int n = 100, n_known = 20, trials = 10000;
  std::vector<std::string> universe;
  for (int i = 0; i < n; ++i) universe.push_back("u" + std::to_string(i));
  std::vector<std::string> pos(universe.begin(), universe.begin() + n_known);
  LabelSet known = make_label_set(pos, universe);
  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<ScoredNode> ranking;
    for (int i = 0; i < n; ++i) ranking.push_back({universe[size_t(i)], rng.uniform()});
    std::sort(ranking.begin(), ranking.end(),
              [](const ScoredNode& a, const ScoredNode& b) { return a.score > b.score; });
    int count = 0;  // known genes inside the top 5% bin
    for (int i = 0; i < 5; ++i) count += known.is_positive(ranking[size_t(i)].id) ? 1 : 0;
    sum += count;
    sumsq += double(count) * double(count);
  }
  double mean = sum / trials;
  double var = sumsq / trials - mean * mean;
  double se = std::sqrt(var / trials);
  CHECK(std::abs(mean - 0.05 * n_known) <= 3.0 * se);
}

TEST_CASE("enrichment scores: identity, disjoint, non-negative") {
  std::vector<std::string> universe;
  for (int i = 0; i < 100; ++i) universe.push_back("e" + std::to_string(i));
  std::vector<std::string> query(universe.begin(), universe.begin() + 10);
  GeneSetCollection gsc;
  gsc.names = {"same_as_query", "disjoint", "half"};
  gsc.members.push_back(query);
  gsc.members.push_back({universe.begin() + 50, universe.begin() + 60});
  gsc.members.push_back({universe.begin() + 5, universe.begin() + 15});
  EnrichmentScores es = enrichment_scores(query, gsc, universe);
  // pathway identical to the query: p = 1 / C(100,10)
  double expect = -std::log10(fisher_enum_oracle(10, 0, 0, 90));
  CHECK(es.score[0] == doctest::Approx(expect).epsilon(1e-9));
  CHECK(es.score[1] == doctest::Approx(0.0).epsilon(1e-12));  // disjoint: p = 1
  for (double v : es.score) CHECK(v >= 0.0);
}

TEST_CASE("enrichment: pathway outside the universe scores 0 with a warning count") {
  std::vector<std::string> universe{"a", "b", "c", "d"};
  GeneSetCollection gsc;
  gsc.names = {"alien"};
  gsc.members.push_back({"x", "y"});
  EnrichmentScores es = enrichment_scores({"a"}, gsc, universe);
  CHECK(es.score[0] == 0.0);
  CHECK(es.empty_pathways == 1);
}

TEST_CASE("gmt loader") {
  TempDir tmp("gmt");
  write_file(tmp.file("p.gmt"), "set1\tdesc one\ta\tb\tc\nset2\t-\tq\n");
  GeneSetCollection gsc = load_gmt(tmp.file("p.gmt"));
  CHECK(gsc.names == std::vector<std::string>{"set1", "set2"});
  CHECK(gsc.members[0] == std::vector<std::string>{"a", "b", "c"});
  write_file(tmp.file("dup.gmt"), "s\t-\ta\ns\t-\tb\n");
  CHECK_THROWS_AS(load_gmt(tmp.file("dup.gmt")), std::runtime_error);
  write_file(tmp.file("empty.gmt"), "s\t-\n");
  CHECK_THROWS_AS(load_gmt(tmp.file("empty.gmt")), std::runtime_error);
}

TEST_CASE("stratified folds: balanced counts, reproducible, errors on tiny classes") {
  std::vector<int> y(100, 0);
  for (int i = 0; i < 23; ++i) y[size_t(i)] = 1;
  Rng r1(5), r2(5);
  auto f1 = stratified_folds(y, 5, r1);
  auto f2 = stratified_folds(y, 5, r2);
  CHECK(f1 == f2);
  std::vector<int> pos_count(5, 0), neg_count(5, 0);
  for (int i = 0; i < 100; ++i) (y[size_t(i)] ? pos_count : neg_count)[size_t(f1[size_t(i)])]++;
  for (int f = 0; f < 5; ++f) {
    CHECK(std::abs(pos_count[size_t(f)] - 23.0 / 5.0) < 1.0);
    CHECK(std::abs(neg_count[size_t(f)] - 77.0 / 5.0) < 1.0);
  }
  std::vector<int> tiny{1, 0, 0, 0, 0, 0, 0, 0};
  Rng r3(1);
  CHECK_THROWS_AS(stratified_folds(tiny, 5, r3), std::runtime_error);
}

TEST_CASE("grid search: degenerate grid returns its point; ties prefer earlier") {
  Rng rng(31);
  int n = 60;
  Dense x(n, 3);
  std::vector<int> y(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    y[size_t(i)] = i % 3 == 0 ? 1 : 0;
    x.at(i, 0) = y[size_t(i)] + rng.uniform(-0.3, 0.3);
    x.at(i, 1) = rng.uniform();
    x.at(i, 2) = rng.uniform();
  }
  // score = the first feature, ignoring params entirely
  FitPredictFn fp = [](const Dense&, const std::vector<int>&, int, int, const Dense& x_test) {
    std::vector<double> s(static_cast<size_t>(x_test.rows()));
    for (int i = 0; i < x_test.rows(); ++i) s[size_t(i)] = x_test.at(i, 0);
    return s;
  };
  CvResult one = cross_val_grid_search(x, y, 1, 5, 17, fp);
  CHECK(one.best_index == 0);
  CHECK(one.mean_auc.size() == 1);
  CvResult three = cross_val_grid_search(x, y, 3, 5, 17, fp);
  CHECK(three.best_index == 0);  // identical points tie; the first wins
  CHECK(three.mean_auc[0] == three.mean_auc[1]);
  CvResult again = cross_val_grid_search(x, y, 3, 5, 17, fp);
  CHECK(again.fold_aucs == three.fold_aucs);  // fold assignment reproducible
}

TEST_SUITE_END();
