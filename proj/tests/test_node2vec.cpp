#include <doctest.h>

#include <cmath>
#include <vector>

#include "netrank/graph.hpp"
#include "netrank/node2vec.hpp"

using namespace netrank;

namespace {

// two disjoint 5-cliques (every ordered pair inside a clique is an edge)
Graph two_cliques() {
  std::vector<std::string> ids;
  for (int i = 0; i < 5; ++i) ids.push_back("c" + std::to_string(i));
  for (int i = 0; i < 5; ++i) ids.push_back("d" + std::to_string(i));
  std::vector<std::pair<int, int>> edges;
  for (int block = 0; block < 2; ++block) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (i != j) edges.emplace_back(block * 5 + i, block * 5 + j);
      }
    }
  }
  return build_graph(ids, edges);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb) + 1e-300);
}

// mean intra-clique minus mean inter-clique cosine over the 10-node fixture
double clique_separation(const Dense& emb) {
  double intra = 0.0, inter = 0.0;
  int n_intra = 0, n_inter = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = i + 1; j < 10; ++j) {
      double c = cosine(emb.row(i), emb.row(j));
      if ((i < 5) == (j < 5)) {
        intra += c;
        ++n_intra;
      } else {
        inter += c;
        ++n_inter;
      }
    }
  }
  return intra / n_intra - inter / n_inter;
}

}  // namespace

TEST_SUITE_BEGIN("node2vec");

TEST_CASE("transition distribution: p=q=1 is uniform over neighbors") {
  Graph g = two_cliques();
  UndirectedView view = build_undirected(g);
  auto dist = transition_distribution(view, 0, 1, 1.0, 1.0);
  CHECK(dist.size() == 4);
  double sum = 0.0;
  for (const auto& [node, prob] : dist) {
    CHECK(prob == doctest::Approx(0.25).epsilon(1e-12));
    sum += prob;
  }
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("transition distribution: return and explore biases") {
  // path a - b plus pendant c on b, c not adjacent to a
  Graph g = build_graph({"a", "b", "c"}, {{0, 1}, {1, 2}});
  UndirectedView view = build_undirected(g);
  // prev=a, cur=b: weight(a) = 1/p = 2, weight(c) = 1/q = 0.5
  auto dist = transition_distribution(view, 0, 1, 0.5, 2.0);
  REQUIRE(dist.size() == 2);
  CHECK(dist[0].first == 0);
  CHECK(dist[0].second == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(dist[1].first == 2);
  CHECK(dist[1].second == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("transition distribution: triangle keeps distance-1 weight") {
  Graph g = build_graph({"a", "b", "c"}, {{0, 1}, {1, 2}, {2, 0}});
  UndirectedView view = build_undirected(g);
  auto dist = transition_distribution(view, 0, 1, 1.0, 1.0);
  REQUIRE(dist.size() == 2);
  CHECK(dist[0].second == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dist[1].second == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("transition distribution: errors") {
  Graph g = build_graph({"a", "b", "c"}, {{0, 1}});
  UndirectedView view = build_undirected(g);
  CHECK_THROWS_AS(transition_distribution(view, 0, 2, 1.0, 1.0), std::runtime_error);
  CHECK_THROWS_AS(transition_distribution(view, 0, 1, 0.0, 1.0), std::runtime_error);
  // prev-cur not an edge
  Graph g2 = build_graph({"a", "b", "c"}, {{0, 1}, {1, 2}});
  UndirectedView v2 = build_undirected(g2);
  CHECK_THROWS_AS(transition_distribution(v2, 2, 0, 1.0, 1.0), std::runtime_error);
}

TEST_CASE("walk counts, determinism, isolated degenerate case") {
  Graph g = build_graph({"a", "b", "c", "iso"}, {{0, 1}, {1, 2}, {2, 0}});
  Node2VecConfig cfg;
  cfg.walks_per_node = 2;
  cfg.walk_length = 8;
  cfg.seed = 5;
  WalkSet ws = generate_walks(g, cfg);
  CHECK(ws.walks.size() == size_t(4 * 2));
  WalkSet ws2 = generate_walks(g, cfg);
  CHECK(ws.walks == ws2.walks);
  cfg.seed = 6;
  WalkSet ws3 = generate_walks(g, cfg);
  CHECK(ws.walks != ws3.walks);
  int iso = g.index_of.at("iso");
  int iso_walks = 0;
  for (const auto& walk : ws.walks) {
    if (walk.front() == iso) {
      ++iso_walks;
      CHECK(walk == std::vector<int>{iso});
    } else {
      CHECK(int(walk.size()) == cfg.walk_length);
    }
  }
  CHECK(iso_walks == 2);
}

TEST_CASE("every consecutive walk pair is an undirected edge (property)") {
  Graph g = two_cliques();
  UndirectedView view = build_undirected(g);
  Node2VecConfig cfg;
  cfg.walks_per_node = 3;
  cfg.walk_length = 12;
  cfg.seed = 17;
  WalkSet ws = generate_walks(g, cfg);
  for (const auto& walk : ws.walks) {
    CHECK(walk.front() >= 0);
    for (size_t i = 1; i < walk.size(); ++i) {
      CHECK(view.adjacent(walk[i - 1], walk[i]));
    }
  }
  for (const auto& walk : ws.walks) {
    auto dist = transition_distribution(view, walk[0], walk[1], cfg.p, cfg.q);
    double sum = 0.0;
    for (const auto& [node, prob] : dist) {
      CHECK(prob >= 0.0);
      sum += prob;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("default embedding width is 80") {
  Node2VecConfig cfg;
  CHECK(cfg.dim == 80);
  Graph g = two_cliques();
  cfg.walks_per_node = 2;
  cfg.walk_length = 6;
  cfg.epochs = 1;
  Node2VecResult res = node2vec_embed(g, cfg);
  CHECK(res.embedding.dim == 80);
  CHECK(res.embedding.values.cols() == 80);
  CHECK(res.embedding.values.rows() == 10);
}

TEST_CASE("skipgram separates the two cliques and loss falls") {
  Graph g = two_cliques();
  Node2VecConfig cfg;
  cfg.dim = 16;
  cfg.walk_length = 20;
  cfg.walks_per_node = 8;
  cfg.epochs = 5;
  cfg.seed = 42;
  Node2VecResult res = node2vec_embed(g, cfg);
  CHECK(clique_separation(res.embedding.values) > 0.2);
  REQUIRE(res.epoch_loss.size() == 5);
  for (double l : res.epoch_loss) CHECK(std::isfinite(l));
  CHECK(res.epoch_loss.back() < res.epoch_loss.front());
}

TEST_CASE("skipgram is bit-reproducible per seed") {
  Graph g = two_cliques();
  Node2VecConfig cfg;
  cfg.dim = 8;
  cfg.walk_length = 10;
  cfg.walks_per_node = 3;
  cfg.epochs = 2;
  cfg.seed = 9;
  Node2VecResult a = node2vec_embed(g, cfg);
  Node2VecResult b = node2vec_embed(g, cfg);
  CHECK(a.embedding.values.raw() == b.embedding.values.raw());
  cfg.seed = 10;
  Node2VecResult c = node2vec_embed(g, cfg);
  CHECK(a.embedding.values.raw() != c.embedding.values.raw());
}

TEST_CASE("empty walk set rejected") {
  WalkSet ws;
  ws.n_nodes = 3;
  CHECK_THROWS_AS(train_skipgram(ws, 8, 2, 2, 1, 0.025, 1), std::runtime_error);
}

TEST_SUITE_END();
