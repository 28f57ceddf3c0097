#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "netrank/dense.hpp"

namespace netrank {

// node x dim embedding with the node ids attached.
struct EmbeddingMatrix {
  std::vector<std::string> row_ids;
  int dim = 0;
  Dense values;
};

// id TAB <dim floats, 9 significant digits>, one row per node, with a
// comment header carrying dim/method/seed.
inline void write_embeddings_tsv(const EmbeddingMatrix& emb, const std::string& path,
                                 const std::string& method, std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_embeddings_tsv: cannot open " + path);
  out << "# dim=" << emb.dim << " method=" << method << " seed=" << seed << "\n";
  char buf[40];
  for (int i = 0; i < int(emb.row_ids.size()); ++i) {
    out << emb.row_ids[size_t(i)];
    for (int j = 0; j < emb.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", emb.values.at(i, j));
      out << '\t' << buf;
    }
    out << '\n';
  }
}

inline EmbeddingMatrix read_embeddings_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_embeddings_tsv: cannot open " + path);
  EmbeddingMatrix emb;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string id;
    if (!std::getline(ss, id, '\t')) continue;
    std::vector<double> vals;
    std::string cell;
    while (std::getline(ss, cell, '\t')) vals.push_back(std::stod(cell));
    if (!rows.empty() && vals.size() != rows.back().size()) {
      throw std::runtime_error("read_embeddings_tsv: ragged rows in " + path);
    }
    emb.row_ids.push_back(id);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error("read_embeddings_tsv: no rows in " + path);
  emb.dim = int(rows[0].size());
  emb.values = Dense(int(rows.size()), emb.dim);
  for (int i = 0; i < int(rows.size()); ++i) {
    for (int j = 0; j < emb.dim; ++j) emb.values.at(i, j) = rows[size_t(i)][size_t(j)];
  }
  return emb;
}

}  // namespace netrank
