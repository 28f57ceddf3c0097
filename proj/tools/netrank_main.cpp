// netrank command-line entry point: config-driven subcommands chaining
// ingestion -> embedding -> ensemble -> ranking -> evaluation.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netrank/cli.hpp"

namespace {

struct CommonFlags {
  std::string config, out, method, classifier;
  std::string edges, features, labels, gene_sets, predictions;
  long long seed = -1;
  long long dim = -1;
  long long folds = -1;
  std::vector<std::string> sets;  // generic key=value overrides
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "flat key = value config file");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "top-level seed (all module seeds derive from it)");
  cmd->add_option("--method", f.method, "embedding method: node2vec, line, imgagn");
  cmd->add_option("--classifier", f.classifier, "classifier: dt, rf, gbt");
  cmd->add_option("--dim", f.dim, "embedding width");
  cmd->add_option("--folds", f.folds, "ensemble fold count M");
  cmd->add_option("--edges", f.edges, "edge list (TSV, source TAB target)");
  cmd->add_option("--features", f.features, "feature table (CSV, id column first)");
  cmd->add_option("--labels", f.labels, "label file (CSV, id,label)");
  cmd->add_option("--gene-sets", f.gene_sets, "gene sets (GMT)");
  cmd->add_option("--predictions", f.predictions, "predictions.csv to evaluate");
  cmd->add_option("--set", f.sets, "extra key=value override (repeatable)")->take_all();
}

netrank::RunConfig build_config(const CommonFlags& f) {
  netrank::RunConfig cfg;
  if (!f.config.empty()) cfg.load_file(f.config);
  auto set_if = [&](const std::string& key, const std::string& value) {
    if (!value.empty()) cfg.set_flag(key, value);
  };
  set_if("out", f.out);
  set_if("method", f.method);
  set_if("classifier", f.classifier);
  set_if("edges", f.edges);
  set_if("features", f.features);
  set_if("labels", f.labels);
  set_if("gene_sets", f.gene_sets);
  set_if("predictions", f.predictions);
  if (f.seed >= 0) cfg.set_flag("seed", std::to_string(f.seed));
  if (f.dim >= 0) cfg.set_flag("dim", std::to_string(f.dim));
  if (f.folds >= 0) cfg.set_flag("folds", std::to_string(f.folds));
  for (const std::string& kv : f.sets) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw netrank::config_error("--set expects key=value, got '" + kv + "'");
    }
    cfg.set_flag(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netrank: network-embedding based node ranking"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* embed = app.add_subcommand("embed", "train an embedding and write embeddings.tsv");
  CLI::App* pipeline =
      app.add_subcommand("pipeline", "full run: embed, assemble, rank, evaluate");
  CLI::App* compare = app.add_subcommand("compare", "method x classifier CV-AUC grid");
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark dataset");
  CLI::App* eval = app.add_subcommand("eval", "evaluate an existing predictions.csv");
  for (CLI::App* cmd : {embed, pipeline, compare, synth, eval}) add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    netrank::RunConfig cfg = build_config(flags);
    if (embed->parsed()) return netrank::cmd_embed(cfg);
    if (pipeline->parsed()) return netrank::cmd_pipeline(cfg);
    if (compare->parsed()) return netrank::cmd_compare(cfg);
    if (synth->parsed()) return netrank::cmd_synth(cfg);
    if (eval->parsed()) return netrank::cmd_eval(cfg);
    std::cerr << "usage error: no subcommand\n";
    return 2;
  } catch (const netrank::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
