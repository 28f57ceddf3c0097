#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "netrank/config.hpp"
#include "netrank/embedding.hpp"
#include "netrank/error.hpp"
#include "netrank/graph.hpp"
#include "netrank/imgagn.hpp"
#include "netrank/line.hpp"
#include "netrank/node2vec.hpp"
#include "netrank/pipeline.hpp"
#include "netrank/stats.hpp"
#include "netrank/synth.hpp"

namespace netrank {

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline ClassifierKind parse_classifier(const std::string& name) {
  if (name == "dt") return ClassifierKind::DecisionTree;
  if (name == "rf") return ClassifierKind::RandomForest;
  if (name == "gbt") return ClassifierKind::Gbt;
  throw config_error("classifier: unknown value '" + name + "' (expected dt, rf or gbt)");
}

inline void check_method(const std::string& method) {
  if (method != "node2vec" && method != "line" && method != "imgagn") {
    throw config_error("method: unknown value '" + method +
                       "' (expected node2vec, line or imgagn)");
  }
}

inline ClassifierParams classifier_params_from_cfg(ClassifierKind kind, const RunConfig& cfg) {
  ClassifierParams p;
  p.kind = kind;
  p.dt.max_depth = int(cfg.get_int("dt.max_depth", 8));
  p.dt.min_samples_leaf = int(cfg.get_int("dt.min_samples_leaf", 1));
  p.rf.n_trees = int(cfg.get_int("rf.n_trees", 100));
  p.rf.max_depth = int(cfg.get_int("rf.max_depth", 8));
  p.rf.min_samples_leaf = int(cfg.get_int("rf.min_samples_leaf", 1));
  p.rf.feature_frac = cfg.get_double("rf.feature_frac", 0.5);
  p.rf.bootstrap = cfg.get_bool("rf.bootstrap", true);
  p.gbt.rounds = int(cfg.get_int("gbt.rounds", 200));
  p.gbt.learning_rate = cfg.get_double("gbt.lr", 0.1);
  p.gbt.max_depth = int(cfg.get_int("gbt.max_depth", 4));
  p.gbt.lambda = cfg.get_double("gbt.lambda", 1.0);
  p.gbt.gamma = cfg.get_double("gbt.gamma", 0.0);
  p.gbt.min_child_hessian = cfg.get_double("gbt.min_child_hessian", 1e-3);
  return p;
}

inline std::string describe_params(const ClassifierParams& p) {
  std::string s = classifier_name(p.kind);
  switch (p.kind) {
    case ClassifierKind::DecisionTree:
      s += " max_depth=" + std::to_string(p.dt.max_depth) +
           " min_samples_leaf=" + std::to_string(p.dt.min_samples_leaf);
      break;
    case ClassifierKind::RandomForest:
      s += " n_trees=" + std::to_string(p.rf.n_trees) +
           " max_depth=" + std::to_string(p.rf.max_depth) +
           " feature_frac=" + fmt9(p.rf.feature_frac);
      break;
    case ClassifierKind::Gbt:
      s += " rounds=" + std::to_string(p.gbt.rounds) + " lr=" + fmt9(p.gbt.learning_rate) +
           " max_depth=" + std::to_string(p.gbt.max_depth) + " lambda=" + fmt9(p.gbt.lambda) +
           " gamma=" + fmt9(p.gbt.gamma);
      break;
  }
  return s;
}

// cartesian product of the configured grid.<kind>.<param> value lists;
// a single default point when no grid keys are set
inline std::vector<ClassifierParams> build_grid(ClassifierKind kind, const RunConfig& cfg) {
  ClassifierParams base = classifier_params_from_cfg(kind, cfg);
  struct Axis {
    std::string key;
    std::function<void(ClassifierParams&, double)> set;
  };
  std::vector<Axis> axes;
  std::string k = classifier_name(kind);
  if (kind == ClassifierKind::DecisionTree) {
    axes = {{"grid.dt.max_depth", [](ClassifierParams& p, double v) { p.dt.max_depth = int(v); }},
            {"grid.dt.min_samples_leaf",
             [](ClassifierParams& p, double v) { p.dt.min_samples_leaf = int(v); }}};
  } else if (kind == ClassifierKind::RandomForest) {
    axes = {{"grid.rf.n_trees", [](ClassifierParams& p, double v) { p.rf.n_trees = int(v); }},
            {"grid.rf.max_depth", [](ClassifierParams& p, double v) { p.rf.max_depth = int(v); }},
            {"grid.rf.feature_frac",
             [](ClassifierParams& p, double v) { p.rf.feature_frac = v; }}};
  } else {
    axes = {{"grid.gbt.rounds", [](ClassifierParams& p, double v) { p.gbt.rounds = int(v); }},
            {"grid.gbt.lr", [](ClassifierParams& p, double v) { p.gbt.learning_rate = v; }},
            {"grid.gbt.max_depth", [](ClassifierParams& p, double v) { p.gbt.max_depth = int(v); }},
            {"grid.gbt.lambda", [](ClassifierParams& p, double v) { p.gbt.lambda = v; }}};
  }
  std::vector<ClassifierParams> grid{base};
  for (const auto& axis : axes) {
    std::vector<double> vals = cfg.get_grid(axis.key);
    if (vals.empty()) continue;
    std::vector<ClassifierParams> next;
    for (const auto& g : grid) {
      for (double v : vals) {
        ClassifierParams copy = g;
        axis.set(copy, v);
        next.push_back(copy);
      }
    }
    grid = std::move(next);
  }
  return grid;
}

struct EmbedOutput {
  EmbeddingMatrix emb;
  bool has_log = false;
  TrainLog log;
};

inline Node2VecConfig node2vec_config(const RunConfig& cfg, std::uint64_t seed) {
  Node2VecConfig c;
  c.p = cfg.get_double("n2v.p", 1.0);
  c.q = cfg.get_double("n2v.q", 1.0);
  c.walk_length = int(cfg.get_int("n2v.walk_length", 40));
  c.walks_per_node = int(cfg.get_int("n2v.walks_per_node", 10));
  c.window = int(cfg.get_int("n2v.window", 5));
  c.negatives = int(cfg.get_int("n2v.negatives", 5));
  c.epochs = int(cfg.get_int("n2v.epochs", 5));
  c.lr = cfg.get_double("n2v.lr", 0.025);
  c.undirected = cfg.get_bool("n2v.undirected", true);
  c.dim = int(cfg.get_int("dim", 80));
  c.seed = seed;
  return c;
}

inline LineConfig line_config(const RunConfig& cfg, std::uint64_t seed) {
  LineConfig c;
  c.dim_total = int(cfg.get_int("dim", 80));
  std::string order = cfg.get_str("line.order", "both");
  if (order == "first") {
    c.order = LineOrder::First;
  } else if (order == "second") {
    c.order = LineOrder::Second;
  } else if (order == "both") {
    c.order = LineOrder::Both;
  } else {
    throw config_error("line.order: unknown value '" + order + "'");
  }
  c.negatives = int(cfg.get_int("line.negatives", 5));
  long long per_edge = cfg.get_int("line.samples_per_edge", 100);
  c.sample_count = 0;
  if (per_edge <= 0) throw config_error("line.samples_per_edge: must be positive");
  c.lr = cfg.get_double("line.lr", 0.025);
  c.seed = seed;
  // sample_count resolved against the graph at call time
  return c;
}

inline ImgagnConfig imgagn_config(const RunConfig& cfg) {
  ImgagnConfig c;
  c.dim = int(cfg.get_int("dim", 80));
  c.enc_hidden = int(cfg.get_int("imgagn.enc_hidden", 128));
  c.noise_dim = int(cfg.get_int("imgagn.noise_dim", 100));
  c.gen_hidden1 = int(cfg.get_int("imgagn.gen_hidden1", 256));
  c.gen_hidden2 = int(cfg.get_int("imgagn.gen_hidden2", 128));
  c.dropout = cfg.get_double("imgagn.dropout", 0.5);
  c.gen_epochs = int(cfg.get_int("imgagn.epochs", 30));
  c.disc_epochs_per_gen = int(cfg.get_int("imgagn.disc_epochs", 20));
  c.lr = cfg.get_double("imgagn.lr", 0.01);
  return c;
}

inline EmbedOutput run_embedding(const std::string& method, const Graph& g,
                                 const FeatureMatrix* features, const LabelSet* labels,
                                 const RunConfig& cfg, std::uint64_t top_seed) {
  check_method(method);
  std::uint64_t seed = derive_seed(top_seed, "embed." + method);
  EmbedOutput out;
  if (method == "node2vec") {
    out.emb = node2vec_embed(g, node2vec_config(cfg, seed)).embedding;
  } else if (method == "line") {
    LineConfig c = line_config(cfg, seed);
    c.sample_count = cfg.get_int("line.samples_per_edge", 100) * (long long)(g.n_edges);
    out.emb = line_train(g, c).embedding;
  } else {
    if (!features) throw config_error("features: required for method imgagn");
    if (!labels) throw config_error("labels: required for method imgagn");
    ImgagnResult res = train_imgagn(g, *features, *labels, imgagn_config(cfg), seed);
    out.emb = std::move(res.embedding);
    out.log = std::move(res.log);
    out.has_log = true;
  }
  return out;
}

struct Inputs {
  Graph graph;
  FeatureMatrix features;
  LabelSet labels;
  bool has_gene_sets = false;
  GeneSetCollection gene_sets;
  int isolated_added = 0;
  std::vector<std::pair<std::string, std::string>> manifest_inputs;
};

// edges + features + labels (+ optional gene sets); ids that only occur in
// the tables are retained as isolated graph nodes.
inline Inputs load_inputs(const RunConfig& cfg, bool need_gene_sets_key = true) {
  Inputs in;
  std::string edges = cfg.require_path("edges");
  std::string features = cfg.require_path("features");
  std::string labels = cfg.require_path("labels");
  in.manifest_inputs = {{"edges", edges}, {"features", features}, {"labels", labels}};
  in.graph = load_edge_list(edges);
  in.features = load_feature_table(features);
  in.labels = load_labels(labels);
  std::vector<std::string> extra = in.features.row_ids;
  extra.insert(extra.end(), in.labels.universe.begin(), in.labels.universe.end());
  in.graph = add_isolated_nodes(in.graph, extra, &in.isolated_added);
  if (in.isolated_added > 0) {
    std::cerr << "warning: " << in.isolated_added
              << " node(s) from feature/label tables are absent from the edge list; kept as "
                 "isolated nodes\n";
  }
  if (need_gene_sets_key && cfg.has("gene_sets")) {
    std::string gs = cfg.require_path("gene_sets");
    in.gene_sets = load_gmt(gs);
    in.has_gene_sets = true;
    in.manifest_inputs.emplace_back("gene_sets", gs);
  }
  return in;
}

inline std::string ensure_out_dir(const RunConfig& cfg) {
  std::string out = cfg.get_str("out", "out");
  std::filesystem::create_directories(out);
  return out;
}

// Cross-validated evaluation of the downstream module: per held-out fold,
// the subsampled M-fold ensemble is retrained on the remaining labels and
// scored on the fold. Grid points share the fold assignment.
inline CvResult evaluate_downstream_cv(const FeatureMatrix& assembled, const LabelSet& labels,
                                       const std::vector<ClassifierParams>& grid, int cv_folds,
                                       int m_folds, double positive_frac, int neg_ratio,
                                       std::uint64_t seed) {
  int n = int(labels.universe.size());
  Dense x(n, assembled.cols());
  std::vector<int> y(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto it = assembled.row_of.find(labels.universe[size_t(i)]);
    if (it == assembled.row_of.end()) {
      throw std::runtime_error("evaluate: labeled id '" + labels.universe[size_t(i)] +
                               "' has no assembled feature row");
    }
    auto src = assembled.values.row(it->second);
    std::copy(src.begin(), src.end(), x.row(i).begin());
    y[size_t(i)] = labels.is_positive(labels.universe[size_t(i)]) ? 1 : 0;
  }
  FitPredictFn fit_predict = [&](const Dense& x_train, const std::vector<int>& y_train,
                                 int param_index, int fold, const Dense& x_test) {
    FeatureMatrix fm;
    fm.values = x_train;
    fm.col_names = assembled.col_names;
    char buf[24];
    std::vector<std::string> pos;
    for (int i = 0; i < x_train.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "r%06d", i);
      fm.row_ids.push_back(buf);
      if (y_train[size_t(i)] != 0) pos.push_back(buf);
    }
    fm.rebuild_index();
    LabelSet ls = make_label_set(pos, fm.row_ids);
    Ensemble ens = train_ensemble(
        fm, ls, m_folds, grid[size_t(param_index)],
        derive_seed(seed, "cv.fit", std::uint64_t(param_index) * 1000003ull + std::uint64_t(fold)),
        positive_frac, neg_ratio);
    std::vector<double> scores(static_cast<size_t>(x_test.rows()));
    for (int i = 0; i < x_test.rows(); ++i) {
      double sum = 0.0;
      for (const auto& model : ens.models) sum += predict_classifier(model, x_test.row(i));
      scores[size_t(i)] = sum / double(ens.models.size());
    }
    return scores;
  };
  return cross_val_grid_search(x, y, int(grid.size()), cv_folds, derive_seed(seed, "cv"),
                               fit_predict);
}

struct EnrichmentSeries {
  std::vector<std::string> pathway;  // ordered by reference score, descending
  std::vector<double> ref_score, query_score;
  std::vector<double> ref_smooth, query_smooth;
};

inline EnrichmentSeries enrichment_comparison(const std::vector<ScoredNode>& ranking,
                                              const LabelSet& labels,
                                              const GeneSetCollection& gene_sets, double top_frac,
                                              int ma_window) {
  std::vector<std::string> universe;
  universe.reserve(ranking.size());
  for (const auto& r : ranking) universe.push_back(r.id);
  int top_n = std::max(1, int(top_frac * double(ranking.size())));
  std::vector<std::string> query(universe.begin(), universe.begin() + top_n);
  std::vector<std::string> reference;
  for (const auto& id : labels.positives) {
    if (std::find(universe.begin(), universe.end(), id) != universe.end()) reference.push_back(id);
  }
  EnrichmentScores ref = enrichment_scores(reference, gene_sets, universe);
  EnrichmentScores qry = enrichment_scores(query, gene_sets, universe);

  std::vector<int> order(gene_sets.names.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ref.score[size_t(a)] > ref.score[size_t(b)]; });
  EnrichmentSeries out;
  for (int i : order) {
    out.pathway.push_back(gene_sets.names[size_t(i)]);
    out.ref_score.push_back(ref.score[size_t(i)]);
    out.query_score.push_back(qry.score[size_t(i)]);
  }
  out.ref_smooth = moving_average(out.ref_score, ma_window);
  out.query_smooth = moving_average(out.query_score, ma_window);
  return out;
}

struct MetricsData {
  bool has_cv = false;
  std::string classifier;
  std::vector<std::string> grid_desc;
  std::vector<double> grid_mean_auc;
  int best_index = 0;
  std::vector<double> best_fold_aucs;
  bool has_overall_auc = false;
  double overall_auc = 0.0;
  std::vector<PercentileBin> bins;
  bool has_enrichment = false;
  EnrichmentSeries enrichment;
};

inline void write_metrics(const MetricsData& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_metrics: cannot open " + path);
  out << "# netrank metrics\n";
  if (m.has_cv) {
    out << "[cv_auc]\n";
    out << "classifier = " << m.classifier << "\n";
    out << "best_grid_point = " << m.best_index << "\n";
    for (size_t i = 0; i < m.best_fold_aucs.size(); ++i) {
      out << "fold_" << (i + 1) << " = " << fmt9(m.best_fold_aucs[i]) << "\n";
    }
    double mean = 0.0;
    for (double a : m.best_fold_aucs) mean += a;
    mean /= double(m.best_fold_aucs.size());
    out << "mean = " << fmt9(mean) << "\n";
    out << "[grid]\n";
    for (size_t i = 0; i < m.grid_desc.size(); ++i) {
      out << "point_" << i << " mean_auc=" << fmt9(m.grid_mean_auc[i]) << " " << m.grid_desc[i]
          << "\n";
    }
  }
  if (m.has_overall_auc) {
    out << "[auc]\n";
    out << "overall = " << fmt9(m.overall_auc) << "\n";
  }
  out << "[percentile_overlap]\n";
  out << "bin_lo_pct,bin_hi_pct,size,overlap,p_value\n";
  for (const auto& b : m.bins) {
    out << fmt9(b.lo_pct) << ',' << fmt9(b.hi_pct) << ',' << b.size << ',' << b.overlap << ','
        << fmt9(b.p_value) << "\n";
  }
  if (m.has_enrichment) {
    out << "[enrichment]\n";
    out << "pathway,ref_score,query_score,ref_smoothed,query_smoothed\n";
    for (size_t i = 0; i < m.enrichment.pathway.size(); ++i) {
      out << m.enrichment.pathway[i] << ',' << fmt9(m.enrichment.ref_score[i]) << ','
          << fmt9(m.enrichment.query_score[i]) << ',' << fmt9(m.enrichment.ref_smooth[i]) << ','
          << fmt9(m.enrichment.query_smooth[i]) << "\n";
    }
  }
}

// ---- subcommands ----

inline int cmd_synth(const RunConfig& cfg) {
  std::string out = ensure_out_dir(cfg);
  SbmSpec spec;
  spec.seed = cfg.get_seed();
  spec.n = int(cfg.get_int("synth.n", 600));
  std::vector<std::string> blocks = cfg.get_list("synth.blocks", "120,480");
  spec.block_sizes.clear();
  for (const auto& b : blocks) {
    try {
      spec.block_sizes.push_back(std::stoi(b));
    } catch (const std::exception&) {
      throw config_error("synth.blocks: non-integer entry '" + b + "'");
    }
  }
  spec.p_in = cfg.get_double("synth.p_in", 0.05);
  spec.p_out = cfg.get_double("synth.p_out", 0.005);
  spec.positive_block = int(cfg.get_int("synth.positive_block", 0));
  spec.positive_frac = cfg.get_double("synth.positive_frac", 0.6);
  spec.noise_rate = cfg.get_double("synth.noise_rate", 0.1);
  spec.signal_dims = int(cfg.get_int("synth.signal_dims", 4));
  spec.noise_dims = int(cfg.get_int("synth.noise_dims", 16));
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw config_error(std::string("synth: ") + e.what());
  }
  SynthData data = generate_synth(spec);
  write_synth(data, out);
  write_manifest(cfg, "synth", {},
                 {out + "/edges.tsv", out + "/features.csv", out + "/labels.csv"},
                 out + "/manifest.txt");
  std::cout << "synth: " << data.graph.n_nodes << " nodes, " << data.graph.n_edges << " edges, "
            << data.labels.positives.size() << " positives -> " << out << "\n";
  return 0;
}

inline int cmd_embed(const RunConfig& cfg) {
  std::string out = ensure_out_dir(cfg);
  std::string method = cfg.get_str("method", "imgagn");
  check_method(method);
  std::string edges = cfg.require_path("edges");
  std::vector<std::pair<std::string, std::string>> manifest_inputs{{"edges", edges}};
  Graph g = load_edge_list(edges);

  FeatureMatrix features;
  LabelSet labels;
  bool have_features = false, have_labels = false;
  if (method == "imgagn" || cfg.has("features")) {
    std::string f = cfg.require_path("features");
    features = load_feature_table(f);
    have_features = true;
    manifest_inputs.emplace_back("features", f);
    int added = 0;
    g = add_isolated_nodes(g, features.row_ids, &added);
    if (added > 0) {
      std::cerr << "warning: " << added << " isolated node(s) added from the feature table\n";
    }
  }
  if (method == "imgagn") {
    std::string l = cfg.require_path("labels");
    labels = load_labels(l);
    have_labels = true;
    manifest_inputs.emplace_back("labels", l);
  }

  EmbedOutput res = run_embedding(method, g, have_features ? &features : nullptr,
                                  have_labels ? &labels : nullptr, cfg, cfg.get_seed());
  std::string emb_path = out + "/embeddings.tsv";
  write_embeddings_tsv(res.emb, emb_path, method, cfg.get_seed());
  std::vector<std::string> outputs{emb_path};
  if (res.has_log) {
    write_train_log(res.log, out + "/train_log.txt");
    outputs.push_back(out + "/train_log.txt");
  }
  write_manifest(cfg, "embed", manifest_inputs, outputs, out + "/manifest.txt");
  std::cout << "embed: method=" << method << " dim=" << res.emb.dim << " nodes="
            << res.emb.row_ids.size() << " -> " << emb_path << "\n";
  return 0;
}

inline int cmd_pipeline(const RunConfig& cfg) {
  std::string out = ensure_out_dir(cfg);
  std::string method = cfg.get_str("method", "imgagn");
  check_method(method);
  ClassifierKind kind = parse_classifier(cfg.get_str("classifier", "gbt"));
  std::uint64_t seed = cfg.get_seed();
  Inputs in = load_inputs(cfg);

  auto stage = [](const std::string& name, auto&& fn) {
    try {
      return fn();
    } catch (const config_error&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error("[" + name + "] " + e.what());
    }
  };

  EmbedOutput emb = stage("embed", [&] {
    return run_embedding(method, in.graph, &in.features, &in.labels, cfg, seed);
  });
  CorrelationFilterResult filt = stage("correlation_filter", [&] {
    return correlation_filter(in.features, cfg.get_double("corr_threshold", 0.85));
  });
  AssembleResult asm_res =
      stage("assemble", [&] { return assemble_features(emb.emb, filt.filtered); });

  std::vector<ClassifierParams> grid = build_grid(kind, cfg);
  int m_folds = int(cfg.get_int("folds", 10));
  int cv_folds = int(cfg.get_int("cv_folds", 5));
  double positive_frac = cfg.get_double("positive_frac", 0.8);
  int neg_ratio = int(cfg.get_int("neg_ratio", 2));

  CvResult cv = stage("evaluate", [&] {
    return evaluate_downstream_cv(asm_res.assembled, in.labels, grid, cv_folds, m_folds,
                                  positive_frac, neg_ratio, seed);
  });
  Ensemble ens = stage("train", [&] {
    return train_ensemble(asm_res.assembled, in.labels, m_folds, grid[size_t(cv.best_index)],
                          derive_seed(seed, "ensemble"), positive_frac, neg_ratio);
  });
  std::vector<ScoredNode> ranking =
      stage("predict", [&] { return predict_ensemble(ens, asm_res.assembled); });

  std::string pred_path = out + "/predictions.csv";
  write_predictions_csv(ranking, pred_path);
  std::string emb_path = out + "/embeddings.tsv";
  write_embeddings_tsv(emb.emb, emb_path, method, seed);

  MetricsData metrics;
  metrics.has_cv = true;
  metrics.classifier = classifier_name(kind);
  for (const auto& g : grid) metrics.grid_desc.push_back(describe_params(g));
  metrics.grid_mean_auc = cv.mean_auc;
  metrics.best_index = cv.best_index;
  metrics.best_fold_aucs = cv.fold_aucs[size_t(cv.best_index)];
  metrics.bins = stage("percentile_overlap", [&] {
    return percentile_overlap(ranking, in.labels, cfg.get_double("bin_width_pct", 5.0));
  });
  if (in.has_gene_sets) {
    metrics.has_enrichment = true;
    metrics.enrichment = stage("enrichment", [&] {
      return enrichment_comparison(ranking, in.labels, in.gene_sets,
                                   cfg.get_double("top_frac", 0.05),
                                   int(cfg.get_int("ma_window", 15)));
    });
  }
  std::string metrics_path = out + "/metrics.txt";
  write_metrics(metrics, metrics_path);

  std::vector<std::string> outputs{pred_path, emb_path, metrics_path};
  if (emb.has_log) {
    write_train_log(emb.log, out + "/train_log.txt");
    outputs.push_back(out + "/train_log.txt");
  }
  write_manifest(cfg, "pipeline", in.manifest_inputs, outputs, out + "/manifest.txt");
  std::cout << "pipeline: method=" << method << " classifier=" << classifier_name(kind)
            << " mean_cv_auc=" << fmt9(cv.mean_auc[size_t(cv.best_index)]) << " -> " << out
            << "\n";
  return 0;
}

inline int cmd_compare(const RunConfig& cfg) {
  std::string out = ensure_out_dir(cfg);
  std::uint64_t seed = cfg.get_seed();
  std::vector<std::string> methods = cfg.get_list("compare.methods", "node2vec,line,imgagn");
  std::vector<std::string> classifiers = cfg.get_list("compare.classifiers", "dt,rf,gbt");
  if (methods.empty() || classifiers.empty()) {
    throw config_error("compare: needs at least one method and one classifier");
  }
  for (const auto& m : methods) check_method(m);
  for (const auto& c : classifiers) parse_classifier(c);
  Inputs in = load_inputs(cfg);
  CorrelationFilterResult filt =
      correlation_filter(in.features, cfg.get_double("corr_threshold", 0.85));
  int m_folds = int(cfg.get_int("folds", 10));
  int cv_folds = int(cfg.get_int("cv_folds", 5));
  double positive_frac = cfg.get_double("positive_frac", 0.8);
  int neg_ratio = int(cfg.get_int("neg_ratio", 2));

  struct Cell {
    std::string method, classifier;
    bool ok = false;
    double mean_auc = 0.0;
    std::string error;
  };
  std::vector<Cell> cells;
  int failures = 0;
  for (const auto& method : methods) {
    EmbedOutput emb;
    AssembleResult asm_res;
    bool emb_ok = true;
    std::string emb_error;
    try {
      emb = run_embedding(method, in.graph, &in.features, &in.labels, cfg, seed);
      asm_res = assemble_features(emb.emb, filt.filtered);
    } catch (const std::exception& e) {
      emb_ok = false;
      emb_error = e.what();
    }
    for (const auto& cname : classifiers) {
      Cell cell;
      cell.method = method;
      cell.classifier = cname;
      if (!emb_ok) {
        cell.error = emb_error;
        ++failures;
      } else {
        try {
          std::vector<ClassifierParams> grid = build_grid(parse_classifier(cname), cfg);
          CvResult cv = evaluate_downstream_cv(asm_res.assembled, in.labels, grid, cv_folds,
                                               m_folds, positive_frac, neg_ratio, seed);
          cell.ok = true;
          cell.mean_auc = cv.mean_auc[size_t(cv.best_index)];
        } catch (const std::exception& e) {
          cell.error = e.what();
          ++failures;
        }
      }
      std::cout << "compare: " << cell.method << " + " << cell.classifier << " -> "
                << (cell.ok ? fmt9(cell.mean_auc) : "FAIL") << "\n";
      cells.push_back(std::move(cell));
    }
  }
  std::string table_path = out + "/comparison.csv";
  {
    std::ofstream t(table_path);
    if (!t) throw std::runtime_error("cmd_compare: cannot open " + table_path);
    t << "method,classifier,mean_auc,status\n";
    for (const auto& c : cells) {
      t << c.method << ',' << c.classifier << ',' << (c.ok ? fmt9(c.mean_auc) : "") << ','
        << (c.ok ? "ok" : "failed: " + c.error) << "\n";
    }
  }
  write_manifest(cfg, "compare", in.manifest_inputs, {table_path}, out + "/manifest.txt");
  return failures == 0 ? 0 : 1;
}

inline int cmd_eval(const RunConfig& cfg) {
  std::string out = ensure_out_dir(cfg);
  std::string pred_path = cfg.require_path("predictions");
  std::string labels_path = cfg.require_path("labels");
  std::vector<std::pair<std::string, std::string>> manifest_inputs{{"predictions", pred_path},
                                                                   {"labels", labels_path}};
  std::vector<ScoredNode> ranking = read_predictions_csv(pred_path);
  std::sort(ranking.begin(), ranking.end(), [](const ScoredNode& a, const ScoredNode& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  LabelSet labels = load_labels(labels_path);

  MetricsData metrics;
  metrics.has_overall_auc = true;
  {
    std::vector<double> scores;
    std::vector<int> y;
    std::unordered_map<std::string, double> score_of;
    for (const auto& r : ranking) score_of.emplace(r.id, r.score);
    for (const auto& id : labels.universe) {
      auto it = score_of.find(id);
      if (it == score_of.end()) {
        throw std::runtime_error("eval: labeled id '" + id + "' missing from predictions");
      }
      scores.push_back(it->second);
      y.push_back(labels.is_positive(id) ? 1 : 0);
    }
    metrics.overall_auc = auc_roc(scores, y);
  }
  metrics.bins = percentile_overlap(ranking, labels, cfg.get_double("bin_width_pct", 5.0));
  if (cfg.has("gene_sets")) {
    std::string gs = cfg.require_path("gene_sets");
    manifest_inputs.emplace_back("gene_sets", gs);
    metrics.has_enrichment = true;
    metrics.enrichment =
        enrichment_comparison(ranking, labels, load_gmt(gs), cfg.get_double("top_frac", 0.05),
                              int(cfg.get_int("ma_window", 15)));
  }
  std::string metrics_path = out + "/metrics.txt";
  write_metrics(metrics, metrics_path);
  write_manifest(cfg, "eval", manifest_inputs, {metrics_path}, out + "/manifest.txt");
  std::cout << "eval: auc=" << fmt9(metrics.overall_auc) << " -> " << metrics_path << "\n";
  return 0;
}

}  // namespace netrank
