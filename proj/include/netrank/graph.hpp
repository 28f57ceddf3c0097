#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "netrank/dense.hpp"
#include "netrank/error.hpp"

namespace netrank {

enum class Direction { Out, In };

// Immutable directed, unweighted graph in compressed adjacency form.
// Node identity is the string id; indices follow first appearance in the
// ingested edge stream, which keeps downstream seeding reproducible.
struct Graph {
  std::vector<std::string> node_ids;
  std::unordered_map<std::string, int> index_of;

  // CSR, neighbor lists sorted ascending per row
  std::vector<int> out_offsets, out_targets;
  std::vector<int> in_offsets, in_targets;

  // deduplicated edges in ingestion order; drives serialization and
  // uniform edge sampling
  std::vector<std::pair<int, int>> edges;

  int n_nodes = 0;
  int n_edges = 0;
  int duplicate_edges = 0;  // collapsed on ingest
  int self_loops = 0;       // permitted, flagged

  std::span<const int> out_neighbors(int v) const {
    return {out_targets.data() + out_offsets[size_t(v)],
            size_t(out_offsets[size_t(v) + 1] - out_offsets[size_t(v)])};
  }
  std::span<const int> in_neighbors(int v) const {
    return {in_targets.data() + in_offsets[size_t(v)],
            size_t(in_offsets[size_t(v) + 1] - in_offsets[size_t(v)])};
  }

  int out_degree(int v) const { return out_offsets[size_t(v) + 1] - out_offsets[size_t(v)]; }
  int in_degree(int v) const { return in_offsets[size_t(v) + 1] - in_offsets[size_t(v)]; }
};

namespace detail {

inline void build_csr(int n, const std::vector<std::pair<int, int>>& edges, bool transpose,
                      std::vector<int>& offsets, std::vector<int>& targets) {
  offsets.assign(size_t(n) + 1, 0);
  for (const auto& [u, v] : edges) ++offsets[size_t(transpose ? v : u) + 1];
  for (int i = 0; i < n; ++i) offsets[size_t(i) + 1] += offsets[size_t(i)];
  targets.resize(edges.size());
  std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    int src = transpose ? v : u;
    int dst = transpose ? u : v;
    targets[size_t(cursor[size_t(src)]++)] = dst;
  }
  for (int i = 0; i < n; ++i) {
    std::sort(targets.begin() + offsets[size_t(i)], targets.begin() + offsets[size_t(i) + 1]);
  }
}

}  // namespace detail

// Builds a graph from pre-indexed nodes and edges. Duplicate edges collapse
// (first occurrence wins the ingestion slot) and are counted.
inline Graph build_graph(std::vector<std::string> node_ids,
                         const std::vector<std::pair<int, int>>& raw_edges) {
  Graph g;
  g.node_ids = std::move(node_ids);
  g.n_nodes = int(g.node_ids.size());
  g.index_of.reserve(g.node_ids.size());
  for (int i = 0; i < g.n_nodes; ++i) {
    auto [it, inserted] = g.index_of.emplace(g.node_ids[size_t(i)], i);
    if (!inserted) throw std::runtime_error("build_graph: duplicate node id " + g.node_ids[size_t(i)]);
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(raw_edges.size());
  for (const auto& [u, v] : raw_edges) {
    if (u < 0 || u >= g.n_nodes || v < 0 || v >= g.n_nodes) {
      throw std::runtime_error("build_graph: edge endpoint out of range");
    }
    std::uint64_t key = (std::uint64_t(std::uint32_t(u)) << 32) | std::uint32_t(v);
    if (!seen.insert(key).second) {
      ++g.duplicate_edges;
      continue;
    }
    if (u == v) ++g.self_loops;
    g.edges.emplace_back(u, v);
  }
  g.n_edges = int(g.edges.size());
  detail::build_csr(g.n_nodes, g.edges, false, g.out_offsets, g.out_targets);
  detail::build_csr(g.n_nodes, g.edges, true, g.in_offsets, g.in_targets);
  return g;
}

// Reads a tab-separated source/target edge list. Lines starting with '#'
// and blank lines are ignored; nodes are indexed in first-appearance order.
inline Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);
  std::vector<std::string> ids;
  std::unordered_map<std::string, int> index;
  std::vector<std::pair<int, int>> edges;
  auto intern = [&](const std::string& id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    int idx = int(ids.size());
    ids.push_back(id);
    index.emplace(id, idx);
    return idx;
  };
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw std::runtime_error("load_edge_list: malformed line " + std::to_string(line_no) +
                               " in " + path + " (expected two tab-separated columns)");
    }
    // first-appearance indexing: the source must be interned before the target
    int src = intern(line.substr(0, tab));
    int dst = intern(line.substr(tab + 1));
    edges.emplace_back(src, dst);
  }
  if (edges.empty()) throw std::runtime_error("load_edge_list: no edges in " + path);
  return build_graph(std::move(ids), edges);
}

// Writes edges in ingestion order, which makes load -> save -> load an
// identity on both node ordering and edge set.
inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_edge_list: cannot open " + path);
  out << "# nodes=" << g.n_nodes << " edges=" << g.n_edges << "\n";
  for (const auto& [u, v] : g.edges) {
    out << g.node_ids[size_t(u)] << '\t' << g.node_ids[size_t(v)] << '\n';
  }
}

// Appends nodes that only appear in feature/label tables as isolated
// vertices. Returns the number of nodes added via *added.
inline Graph add_isolated_nodes(const Graph& g, const std::vector<std::string>& extra_ids,
                                int* added = nullptr) {
  std::vector<std::string> ids = g.node_ids;
  std::unordered_set<std::string> have(ids.begin(), ids.end());
  int count = 0;
  for (const auto& id : extra_ids) {
    if (have.insert(id).second) {
      ids.push_back(id);
      ++count;
    }
  }
  if (added) *added = count;
  if (count == 0) {
    Graph copy = g;
    return copy;
  }
  return build_graph(std::move(ids), g.edges);
}

// Sorted neighbor indices of v in the requested direction.
inline std::vector<int> neighbors(const Graph& g, int v, Direction dir) {
  if (v < 0 || v >= g.n_nodes) {
    throw std::runtime_error("neighbors: node index " + std::to_string(v) + " out of range");
  }
  auto span = dir == Direction::Out ? g.out_neighbors(v) : g.in_neighbors(v);
  return {span.begin(), span.end()};
}

// Undirected adjacency (union of in+out, deduplicated), shared by the
// random-walk embedders and the mean aggregators.
struct UndirectedView {
  std::vector<int> offsets, nbrs;
  int n = 0;
  std::span<const int> neighbors(int v) const {
    return {nbrs.data() + offsets[size_t(v)], size_t(offsets[size_t(v) + 1] - offsets[size_t(v)])};
  }
  int degree(int v) const { return offsets[size_t(v) + 1] - offsets[size_t(v)]; }
  bool adjacent(int u, int v) const {
    auto s = neighbors(u);
    return std::binary_search(s.begin(), s.end(), v);
  }
};

inline UndirectedView build_undirected(const Graph& g) {
  UndirectedView u;
  u.n = g.n_nodes;
  std::vector<std::vector<int>> adj(static_cast<size_t>(g.n_nodes));
  for (const auto& [a, b] : g.edges) {
    adj[size_t(a)].push_back(b);
    if (a != b) adj[size_t(b)].push_back(a);
  }
  u.offsets.assign(size_t(g.n_nodes) + 1, 0);
  for (int v = 0; v < g.n_nodes; ++v) {
    auto& row = adj[size_t(v)];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    u.offsets[size_t(v) + 1] = u.offsets[size_t(v)] + int(row.size());
  }
  u.nbrs.reserve(size_t(u.offsets.back()));
  for (auto& row : adj) u.nbrs.insert(u.nbrs.end(), row.begin(), row.end());
  return u;
}

// Dense node x feature table with column names.
struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_names;
  Dense values;
  std::unordered_map<std::string, int> row_of;

  void rebuild_index() {
    row_of.clear();
    row_of.reserve(row_ids.size());
    for (int i = 0; i < int(row_ids.size()); ++i) row_of.emplace(row_ids[size_t(i)], i);
  }
  int rows() const { return values.rows(); }
  int cols() const { return values.cols(); }
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace detail

// Comma-separated numeric table, header row starting with "id". Non-finite
// cells and duplicate ids are rejected outright.
inline FeatureMatrix load_feature_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_feature_table: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_feature_table: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = detail::split_csv(line);
  if (header.empty() || header[0] != "id") {
    throw std::runtime_error("load_feature_table: header must start with 'id' in " + path);
  }
  if (header.size() < 2) throw std::runtime_error("load_feature_table: no feature columns in " + path);
  FeatureMatrix fm;
  fm.col_names.assign(header.begin() + 1, header.end());
  int f = int(fm.col_names.size());
  std::vector<double> values;
  long line_no = 1;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split_csv(line);
    if (int(cells.size()) != f + 1) {
      throw std::runtime_error("load_feature_table: row " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(f + 1));
    }
    if (!seen.insert(cells[0]).second) {
      throw std::runtime_error("load_feature_table: duplicate id '" + cells[0] + "' at row " +
                               std::to_string(line_no));
    }
    fm.row_ids.push_back(cells[0]);
    for (int j = 0; j < f; ++j) {
      double v;
      if (!detail::parse_double(cells[size_t(j) + 1], v) || !std::isfinite(v)) {
        throw std::runtime_error("load_feature_table: non-numeric or non-finite cell at row " +
                                 std::to_string(line_no) + " column " + fm.col_names[size_t(j)]);
      }
      values.push_back(v);
    }
  }
  if (fm.row_ids.empty()) throw std::runtime_error("load_feature_table: no data rows in " + path);
  fm.values = Dense(int(fm.row_ids.size()), f);
  fm.values.raw() = std::move(values);
  fm.rebuild_index();
  return fm;
}

inline void save_feature_table(const FeatureMatrix& fm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_feature_table: cannot open " + path);
  out << "id";
  for (const auto& c : fm.col_names) out << ',' << c;
  out << '\n';
  char buf[40];
  for (int i = 0; i < fm.rows(); ++i) {
    out << fm.row_ids[size_t(i)];
    for (int j = 0; j < fm.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", fm.values.at(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

// Binary label set over a universe of node ids. Sets are kept sorted so all
// downstream sampling is order-stable.
struct LabelSet {
  std::vector<std::string> positives;  // sorted
  std::vector<std::string> universe;   // sorted

  bool is_positive(const std::string& id) const {
    return std::binary_search(positives.begin(), positives.end(), id);
  }
  bool in_universe(const std::string& id) const {
    return std::binary_search(universe.begin(), universe.end(), id);
  }
  std::vector<std::string> negatives() const {
    std::vector<std::string> out;
    out.reserve(universe.size() - positives.size());
    std::set_difference(universe.begin(), universe.end(), positives.begin(), positives.end(),
                        std::back_inserter(out));
    return out;
  }
  void validate() const {
    if (positives.empty()) throw std::runtime_error("LabelSet: empty positive set");
    if (positives.size() >= universe.size()) {
      throw std::runtime_error("LabelSet: no negatives (all labels positive)");
    }
  }
};

inline LabelSet make_label_set(std::vector<std::string> positives, std::vector<std::string> universe) {
  LabelSet ls;
  ls.positives = std::move(positives);
  ls.universe = std::move(universe);
  std::sort(ls.positives.begin(), ls.positives.end());
  std::sort(ls.universe.begin(), ls.universe.end());
  ls.positives.erase(std::unique(ls.positives.begin(), ls.positives.end()), ls.positives.end());
  ls.universe.erase(std::unique(ls.universe.begin(), ls.universe.end()), ls.universe.end());
  ls.validate();
  return ls;
}

// Comma-separated "id,label" rows, label in {0,1}. An optional literal
// "id,label" header is tolerated. Conflicting duplicates are an error.
inline LabelSet load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_labels: cannot open " + path);
  std::string line;
  std::unordered_map<std::string, int> label_of;
  std::vector<std::string> order;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line == "id,label") continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != 2 || cells[0].empty()) {
      throw std::runtime_error("load_labels: malformed line " + std::to_string(line_no) + " in " +
                               path);
    }
    int lab;
    if (cells[1] == "0") {
      lab = 0;
    } else if (cells[1] == "1") {
      lab = 1;
    } else {
      throw std::runtime_error("load_labels: label '" + cells[1] + "' at line " +
                               std::to_string(line_no) + " is not 0 or 1");
    }
    auto it = label_of.find(cells[0]);
    if (it != label_of.end()) {
      if (it->second != lab) {
        throw std::runtime_error("load_labels: conflicting labels for id '" + cells[0] + "'");
      }
      continue;
    }
    label_of.emplace(cells[0], lab);
    order.push_back(cells[0]);
  }
  if (order.empty()) throw std::runtime_error("load_labels: no labels in " + path);
  std::vector<std::string> pos;
  for (const auto& id : order) {
    if (label_of[id] == 1) pos.push_back(id);
  }
  if (pos.empty()) throw std::runtime_error("load_labels: empty positive set in " + path);
  if (pos.size() == order.size()) {
    throw std::runtime_error("load_labels: all labels positive in " + path);
  }
  return make_label_set(std::move(pos), std::move(order));
}

inline void save_labels(const LabelSet& ls, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_labels: cannot open " + path);
  out << "id,label\n";
  for (const auto& id : ls.universe) out << id << ',' << (ls.is_positive(id) ? 1 : 0) << '\n';
}

}  // namespace netrank
