#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netrank/error.hpp"
#include "netrank/rng.hpp"

namespace netrank {

// Flat key-value run configuration. Precedence: flags > environment > file
// > built-in defaults. Every key a run consumes is recorded so the manifest
// can echo the exact resolved configuration.
class RunConfig {
 public:
  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "edges", "features", "labels", "gene_sets", "predictions", "out",
        "method", "classifier", "seed", "dim", "folds", "neg_ratio", "positive_frac",
        "corr_threshold", "cv_folds", "bin_width_pct", "ma_window", "top_frac",
        "compare.methods", "compare.classifiers",
        "n2v.p", "n2v.q", "n2v.walk_length", "n2v.walks_per_node", "n2v.window",
        "n2v.negatives", "n2v.epochs", "n2v.lr", "n2v.undirected",
        "line.order", "line.negatives", "line.samples_per_edge", "line.lr",
        "imgagn.epochs", "imgagn.disc_epochs", "imgagn.noise_dim", "imgagn.gen_hidden1",
        "imgagn.gen_hidden2", "imgagn.enc_hidden", "imgagn.dropout", "imgagn.lr",
        "dt.max_depth", "dt.min_samples_leaf",
        "rf.n_trees", "rf.max_depth", "rf.min_samples_leaf", "rf.feature_frac", "rf.bootstrap",
        "gbt.rounds", "gbt.lr", "gbt.max_depth", "gbt.lambda", "gbt.gamma",
        "gbt.min_child_hessian",
        "synth.n", "synth.blocks", "synth.p_in", "synth.p_out", "synth.positive_block",
        "synth.positive_frac", "synth.noise_rate", "synth.signal_dims", "synth.noise_dims",
    };
    return keys;
  }

  static bool is_known(const std::string& key) {
    return known_keys().count(key) > 0 || key.rfind("grid.", 0) == 0;
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open file " + path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#') continue;
      size_t eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw config_error("config: line " + std::to_string(line_no) + " of " + path +
                           " is not key = value");
      }
      std::string key = trim(trimmed.substr(0, eq));
      std::string value = trim(trimmed.substr(eq + 1));
      if (!is_known(key)) {
        throw config_error("config: unknown key '" + key + "' at line " + std::to_string(line_no) +
                           " of " + path);
      }
      file_[key] = value;
    }
  }

  void set_flag(const std::string& key, const std::string& value) {
    if (!is_known(key)) throw config_error("config: unknown key '" + key + "'");
    flags_[key] = value;
  }

  bool has(const std::string& key) const { return !resolve(key).empty(); }

  std::string get_str(const std::string& key, const std::string& def = "") const {
    std::string v = resolve(key);
    if (v.empty()) v = def;
    consumed_[key] = v;
    return v;
  }

  double get_double(const std::string& key, double def) const {
    std::string v = resolve(key);
    if (v.empty()) {
      consumed_[key] = format_double(def);
      return def;
    }
    char* end = nullptr;
    double out = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) {
      throw config_error("config: key '" + key + "' has non-numeric value '" + v + "'");
    }
    consumed_[key] = v;
    return out;
  }

  long long get_int(const std::string& key, long long def) const {
    std::string v = resolve(key);
    if (v.empty()) {
      consumed_[key] = std::to_string(def);
      return def;
    }
    try {
      size_t pos = 0;
      long long out = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      consumed_[key] = v;
      return out;
    } catch (const std::exception&) {
      throw config_error("config: key '" + key + "' has non-integer value '" + v + "'");
    }
  }

  bool get_bool(const std::string& key, bool def) const {
    std::string v = resolve(key);
    if (v.empty()) {
      consumed_[key] = def ? "1" : "0";
      return def;
    }
    consumed_[key] = v;
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw config_error("config: key '" + key + "' must be 0/1, got '" + v + "'");
  }

  std::uint64_t get_seed() const { return std::uint64_t(get_int("seed", 1)); }

  // existing-file requirement, named after the offending key
  std::string require_path(const std::string& key) const {
    std::string v = get_str(key);
    if (v.empty()) throw config_error("config: required key '" + key + "' is missing");
    if (!std::filesystem::exists(v)) {
      throw config_error("config: " + key + " path does not exist: " + v);
    }
    return v;
  }

  std::vector<std::string> get_list(const std::string& key, const std::string& def) const {
    std::string v = get_str(key, def);
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  // grid values for one classifier parameter, e.g. grid.gbt.max_depth = 3,4
  std::vector<double> get_grid(const std::string& key) const {
    std::string v = resolve(key);
    if (v.empty()) return {};
    consumed_[key] = v;
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      char* end = nullptr;
      double d = std::strtod(item.c_str(), &end);
      if (end != item.c_str() + item.size()) {
        throw config_error("config: grid key '" + key + "' has non-numeric entry '" + item + "'");
      }
      out.push_back(d);
    }
    return out;
  }

  // all keys consumed by this run with their resolved values, sorted
  std::map<std::string, std::string> consumed() const { return consumed_; }

 private:
  static std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static std::string format_double(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
  }

  static std::string env_name(const std::string& key) {
    std::string out = "NETRANK_";
    for (char c : key) {
      if (c == '.' || c == '-') {
        out.push_back('_');
      } else {
        out.push_back(char(std::toupper(static_cast<unsigned char>(c))));
      }
    }
    return out;
  }

  std::string resolve(const std::string& key) const {
    auto it = flags_.find(key);
    if (it != flags_.end()) return it->second;
    if (const char* env = std::getenv(env_name(key).c_str())) {
      if (*env) return env;
    }
    it = file_.find(key);
    if (it != file_.end()) return it->second;
    return "";
  }

  std::map<std::string, std::string> file_, flags_;
  mutable std::map<std::string, std::string> consumed_;
};

inline std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("digest_file: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// Reproducibility record: input digests and outputs as comments, consumed
// configuration as plain keys, so the manifest itself is a valid --config.
inline void write_manifest(const RunConfig& cfg, const std::string& subcommand,
                           const std::vector<std::pair<std::string, std::string>>& inputs,
                           const std::vector<std::string>& outputs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  out << "# netrank manifest\n";
  out << "# subcommand = " << subcommand << "\n";
  for (const auto& [key, file] : inputs) {
    out << "# input " << key << " " << file << " fnv1a64=" << digest_file(file) << "\n";
  }
  for (const auto& file : outputs) out << "# output " << file << "\n";
  for (const auto& [key, value] : cfg.consumed()) {
    if (!value.empty()) out << key << " = " << value << "\n";
  }
}

}  // namespace netrank
