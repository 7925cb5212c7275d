// Command-line front end for the noise-based spectral embedding library.
// Every subcommand is runnable standalone; `run` composes them from a flat
// key=value config file.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nbse/ablation.hpp"
#include "nbse/baselines.hpp"
#include "nbse/bethe_hessian.hpp"
#include "nbse/eval.hpp"
#include "nbse/fingerprint.hpp"
#include "nbse/graph.hpp"
#include "nbse/matrix_io.hpp"
#include "nbse/nishimori.hpp"
#include "nbse/noise.hpp"
#include "nbse/pipeline.hpp"
#include "nbse/qc_ldpc.hpp"
#include "nbse/synthetic.hpp"

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_list(const std::string& v, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string token;
  while (std::getline(ss, token, sep))
    if (!token.empty()) parts.push_back(token);
  return parts;
}

double parse_double(const std::string& v) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double r = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw nbse::ConfigError("'" + v + "' is not a number");
  return r;
}

std::vector<double> parse_double_list(const std::string& v) {
  std::vector<double> out;
  for (const std::string& s : split_list(v, ',')) out.push_back(parse_double(s));
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& v) {
  std::vector<std::uint64_t> out;
  for (const std::string& s : split_list(v, ',')) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const unsigned long long r = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0')
      throw nbse::ConfigError("'" + s + "' is not an integer");
    out.push_back(r);
  }
  return out;
}

std::vector<std::vector<int>> parse_base_matrix(const std::string& v) {
  std::vector<std::vector<int>> base;
  for (const std::string& row : split_list(v, ';')) {
    std::vector<int> r;
    for (const std::string& cell : split_list(row, ',')) {
      const char* begin = cell.c_str();
      char* end = nullptr;
      const long x = std::strtol(begin, &end, 10);
      if (end == begin || *end != '\0')
        throw nbse::ConfigError("'" + cell + "' is not an integer");
      r.push_back(static_cast<int>(x));
    }
    base.push_back(std::move(r));
  }
  return base;
}

Eigen::VectorXd read_phi_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nbse::IoError("cannot open '" + path + "' for reading");
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row))
    throw nbse::IoError(path + ": expected a header line and one value row");
  const std::vector<std::string> cells = split_list(row, ',');
  if (cells.empty()) throw nbse::IoError(path + ": empty value row");
  Eigen::VectorXd phi(static_cast<Eigen::Index>(cells.size()));
  for (size_t i = 0; i < cells.size(); ++i) phi[static_cast<Eigen::Index>(i)] = parse_double(cells[i]);
  return phi;
}

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw nbse::IoError("cannot open '" + path + "' for writing");
  fn(out);
  if (!out) throw nbse::IoError("write failed for '" + path + "'");
}

nbse::LabeledDataset load_labeled(const std::string& input,
                                  nbse::MatrixFormat format,
                                  const std::string& labels) {
  nbse::LabeledDataset data;
  data.X = nbse::read_matrix_file(input, format);
  nbse::validate_data_matrix(data.X.values);
  data.y = nbse::read_labels_file(labels);
  int max_label = 0;
  for (int v : data.y) {
    if (v < 0) throw nbse::ConfigError("labels must be nonnegative");
    max_label = std::max(max_label, v);
  }
  data.n_classes = max_label + 1;
  nbse::validate_labeled_dataset(data);
  return data;
}

struct CommonMatrixOpts {
  std::string input;
  std::string format = "csv";
};

void add_matrix_opts(CLI::App* cmd, CommonMatrixOpts& opts) {
  cmd->add_option("--input", opts.input, "matrix file")->required();
  cmd->add_option("--format", opts.format, "matrix format: csv|bin")
      ->check(CLI::IsMember({"csv", "bin"}));
}

struct RootOpts {
  double beta_max = 0.0;
  int n_scan = 40;
  double tol_beta = 1e-6;
  double tol_lambda = 1e-8;
};

void add_root_opts(CLI::App* cmd, RootOpts& opts) {
  cmd->add_option("--beta-max", opts.beta_max,
                  "scan limit (0 = 20/median weight)");
  cmd->add_option("--n-scan", opts.n_scan, "geometric scan points");
  cmd->add_option("--tol-beta", opts.tol_beta, "bracket width tolerance");
  cmd->add_option("--tol-lambda", opts.tol_lambda, "eigenvalue tolerance");
}

nbse::RootOptions to_root(const RootOpts& o) {
  nbse::RootOptions r;
  r.beta_max = o.beta_max;
  r.n_scan = o.n_scan;
  r.tol_beta = o.tol_beta;
  r.tol_lambda = o.tol_lambda;
  return r;
}

struct GraphOpts {
  int k_scale = 10;
  int k_graph = 9;
  bool mutual = false;
};

void add_graph_opts(CLI::App* cmd, GraphOpts& opts) {
  cmd->add_option("--k-scale", opts.k_scale, "neighbors for local scales");
  cmd->add_option("--k-graph", opts.k_graph, "neighbors for the edge set");
  cmd->add_flag("--mutual", opts.mutual, "mutual (not union) k-NN");
}

nbse::GraphParams to_graph(const GraphOpts& o) {
  nbse::GraphParams g;
  g.k_scale = o.k_scale;
  g.k_graph = o.k_graph;
  g.mutual = o.mutual;
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noise-based spectral embedding toolkit"};
  app.require_subcommand(1);

  // ---- ingest-check --------------------------------------------------
  auto* ingest = app.add_subcommand("ingest-check",
                                    "parse and validate a matrix file");
  CommonMatrixOpts ingest_m;
  std::string ingest_labels;
  add_matrix_opts(ingest, ingest_m);
  ingest->add_option("--labels", ingest_labels, "label file to cross-check");
  ingest->callback([&] {
    const nbse::DataMatrix X = nbse::read_matrix_file(
        ingest_m.input, nbse::matrix_format_from_name(ingest_m.format));
    nbse::validate_data_matrix(X.values);
    std::cout << "ok m=" << X.n_objects() << " d=" << X.n_features();
    if (!ingest_labels.empty()) {
      const std::vector<int> y = nbse::read_labels_file(ingest_labels);
      if (static_cast<Eigen::Index>(y.size()) != X.n_objects())
        throw nbse::ConfigError("label count does not match the matrix");
      int max_label = 0;
      for (int v : y) max_label = std::max(max_label, v);
      std::cout << " classes=" << max_label + 1;
    }
    std::cout << '\n';
  });

  // ---- graph ---------------------------------------------------------
  auto* graph_cmd = app.add_subcommand("graph", "build the similarity graph");
  CommonMatrixOpts graph_m;
  GraphOpts graph_g;
  std::string graph_out, graph_backbone = "knn", graph_qc_base;
  int graph_qc_lift = 0, graph_qc_girth = 6, graph_qc_retries = 50;
  std::uint64_t graph_seed = 0;
  add_matrix_opts(graph_cmd, graph_m);
  add_graph_opts(graph_cmd, graph_g);
  graph_cmd->add_option("--output", graph_out, "edge-list output")->required();
  graph_cmd->add_option("--backbone", graph_backbone, "knn|qc_ldpc")
      ->check(CLI::IsMember({"knn", "qc_ldpc"}));
  graph_cmd->add_option("--qc-base", graph_qc_base,
                        "base matrix rows, e.g. \"0,2;2,0\"");
  graph_cmd->add_option("--qc-lift", graph_qc_lift, "circulant lift size");
  graph_cmd->add_option("--qc-girth-min", graph_qc_girth, "required girth");
  graph_cmd->add_option("--qc-retries", graph_qc_retries, "shift resamples");
  graph_cmd->add_option("--seed", graph_seed, "shift-sampling seed");
  graph_cmd->callback([&] {
    const nbse::DataMatrix X = nbse::read_matrix_file(
        graph_m.input, nbse::matrix_format_from_name(graph_m.format));
    nbse::validate_data_matrix(X.values);
    const nbse::LocalScales scales = nbse::local_scales(X, graph_g.k_scale);
    nbse::SimilarityGraph g;
    if (graph_backbone == "qc_ldpc") {
      nbse::Protograph proto;
      proto.base = parse_base_matrix(graph_qc_base);
      proto.lift = graph_qc_lift;
      proto.seed = graph_seed;
      if (proto.n_nodes() != X.n_objects())
        throw nbse::ConfigError("qc backbone node count != object count");
      const nbse::SimilarityGraph backbone =
          nbse::build_qc_backbone(proto, graph_qc_girth, graph_qc_retries);
      g = nbse::weight_graph_on_backbone(X, backbone, scales);
    } else {
      g = nbse::build_knn_graph(X, graph_g.k_graph, scales, graph_g.mutual);
    }
    write_file(graph_out, [&](std::ostream& o) { nbse::write_graph(o, g); });
    const int gi = nbse::girth(g);
    std::cout << "nodes=" << g.n_nodes() << " edges=" << g.n_edges()
              << " avg_degree=" << fmt17(g.average_degree()) << " girth="
              << (gi == nbse::kGirthInfinite ? std::string("inf")
                                             : std::to_string(gi))
              << " components=" << g.connected_components() << '\n';
  });

  // ---- beta ----------------------------------------------------------
  auto* beta_cmd =
      app.add_subcommand("beta", "find the Nishimori temperature of a graph");
  std::string beta_graph, beta_curve_out;
  RootOpts beta_root;
  beta_cmd->add_option("--graph", beta_graph, "edge-list file")->required();
  beta_cmd->add_option("--curve", beta_curve_out,
                       "also write the full lambda_min scan CSV");
  add_root_opts(beta_cmd, beta_root);
  beta_cmd->callback([&] {
    const nbse::SimilarityGraph g = nbse::read_graph_file(beta_graph);
    const nbse::NishimoriResult r = nbse::find_beta_n(g, to_root(beta_root));
    if (!beta_curve_out.empty()) {
      const nbse::BetaCurve curve =
          nbse::scan_lambda(g, beta_root.beta_max, beta_root.n_scan);
      write_file(beta_curve_out,
                 [&](std::ostream& o) { nbse::write_beta_curve(o, curve); });
      if (curve.sign_changes() > 1)
        std::cerr << "note: " << curve.sign_changes()
                  << " sign changes on the scan; only the first root is "
                     "reported\n";
    }
    std::cout << "beta_n=" << fmt17(r.beta_n) << '\n'
              << "residual=" << fmt17(r.residual) << '\n'
              << "bracket=" << fmt17(r.bracket_lo) << ' '
              << fmt17(r.bracket_hi) << '\n'
              << "g=" << fmt17(r.g) << '\n'
              << "iterations=" << r.iterations << '\n';
  });

  // ---- fingerprint ---------------------------------------------------
  auto* fp_cmd =
      app.add_subcommand("fingerprint", "per-feature spectral fingerprint");
  CommonMatrixOpts fp_m;
  GraphOpts fp_g;
  RootOpts fp_root;
  std::string fp_mode = "global", fp_out, fp_out_bin;
  add_matrix_opts(fp_cmd, fp_m);
  add_graph_opts(fp_cmd, fp_g);
  add_root_opts(fp_cmd, fp_root);
  fp_cmd->add_option("--mode", fp_mode, "global|per_feature")
      ->check(CLI::IsMember({"global", "per_feature"}));
  fp_cmd->add_option("--output", fp_out, "fingerprint CSV")->required();
  fp_cmd->add_option("--output-bin", fp_out_bin,
                     "also write the binary matrix format");
  fp_cmd->callback([&] {
    const nbse::DataMatrix X = nbse::read_matrix_file(
        fp_m.input, nbse::matrix_format_from_name(fp_m.format));
    nbse::FingerprintParams params;
    params.graph = to_graph(fp_g);
    params.root = to_root(fp_root);
    const nbse::FingerprintMode mode = fp_mode == "global"
                                           ? nbse::FingerprintMode::global
                                           : nbse::FingerprintMode::per_feature;
    const nbse::SpectralFingerprint psi = nbse::fingerprint(X, mode, params);
    write_file(fp_out,
               [&](std::ostream& o) { nbse::write_fingerprint_csv(o, psi); });
    if (!fp_out_bin.empty())
      nbse::write_matrix_file(fp_out_bin, nbse::DataMatrix::from(psi.psi),
                              nbse::MatrixFormat::bin);
    int flagged = 0;
    for (bool f : psi.flagged) flagged += f;
    std::cout << "mode=" << fp_mode << " flagged=" << flagged << '\n';
  });

  // ---- embed-features ------------------------------------------------
  auto* emb_cmd =
      app.add_subcommand("embed-features", "feature-axis eigenvector phi");
  CommonMatrixOpts emb_m;
  RootOpts emb_root;
  std::string emb_out;
  int emb_k_feat = 0;
  bool emb_raw = false;
  add_matrix_opts(emb_cmd, emb_m);
  add_root_opts(emb_cmd, emb_root);
  emb_cmd->add_option("--output", emb_out, "phi CSV")->required();
  emb_cmd->add_option("--k-feat", emb_k_feat,
                      "feature-graph neighbors (0 = min(10, D-1))");
  emb_cmd->add_flag("--no-standardize", emb_raw,
                    "skip per-feature standardization");
  emb_cmd->callback([&] {
    const nbse::DataMatrix X = nbse::read_matrix_file(
        emb_m.input, nbse::matrix_format_from_name(emb_m.format));
    nbse::FeatureAxisParams params;
    params.k_feat = emb_k_feat;
    params.standardize = !emb_raw;
    params.root = to_root(emb_root);
    const nbse::FeatureEmbedding emb = nbse::feature_axis_embedding(X, params);
    write_file(emb_out, [&](std::ostream& o) { nbse::write_phi_csv(o, emb); });
    std::cout << "beta_n=" << fmt17(emb.beta_n)
              << " d=" << emb.affinity_stats.d
              << " edges=" << emb.affinity_stats.n_edges << '\n';
  });

  // ---- select --------------------------------------------------------
  auto* sel_cmd = app.add_subcommand(
      "select", "balanced histogram selection over a phi vector");
  std::string sel_phi, sel_out;
  int sel_n = 0;
  sel_cmd->add_option("--phi", sel_phi, "phi CSV from embed-features")
      ->required();
  sel_cmd->add_option("--n", sel_n, "number of features to keep")->required();
  sel_cmd->add_option("--output", sel_out, "selection CSV")->required();
  sel_cmd->callback([&] {
    const Eigen::VectorXd phi = read_phi_file(sel_phi);
    const nbse::SelectionResult sel = nbse::select_features(phi, sel_n);
    write_file(sel_out,
               [&](std::ostream& o) { nbse::write_selection_csv(o, sel); });
    std::cout << "selected=" << sel.indices.size()
              << " fallback=" << sel.fallback_events.size() << '\n';
  });

  // ---- eval ----------------------------------------------------------
  auto* eval_cmd =
      app.add_subcommand("eval", "retention sweep with baseline selectors");
  CommonMatrixOpts eval_m;
  RootOpts eval_root;
  GraphOpts eval_g;
  std::string eval_labels, eval_methods = "nbse,anova,random";
  std::string eval_props = "1.0,0.9,0.8,0.7,0.6,0.5,0.4,0.3";
  std::string eval_seeds = "1,2,3,4,5";
  std::string eval_repr = "original", eval_mode = "global";
  std::string eval_cells_out, eval_agg_out;
  double eval_test_fraction = 0.2, eval_l2 = 1e-4, eval_tol_train = 1e-6;
  int eval_max_epochs = 500, eval_k_feat = 0;
  add_matrix_opts(eval_cmd, eval_m);
  add_root_opts(eval_cmd, eval_root);
  add_graph_opts(eval_cmd, eval_g);
  eval_cmd->add_option("--labels", eval_labels, "label file")->required();
  eval_cmd->add_option("--methods", eval_methods, "comma list of selectors");
  eval_cmd->add_option("--proportions", eval_props, "comma list in (0,1]");
  eval_cmd->add_option("--seeds", eval_seeds, "comma list of split seeds");
  eval_cmd->add_option("--test-fraction", eval_test_fraction);
  eval_cmd->add_option("--representation", eval_repr, "original|spectral")
      ->check(CLI::IsMember({"original", "spectral"}));
  eval_cmd->add_option("--mode", eval_mode,
                       "fingerprint mode for spectral representation")
      ->check(CLI::IsMember({"global", "per_feature"}));
  eval_cmd->add_option("--k-feat", eval_k_feat);
  eval_cmd->add_option("--l2", eval_l2);
  eval_cmd->add_option("--max-epochs", eval_max_epochs);
  eval_cmd->add_option("--tol-train", eval_tol_train);
  eval_cmd->add_option("--cells", eval_cells_out, "per-cell CSV");
  eval_cmd->add_option("--aggregate", eval_agg_out, "aggregated CSV");
  eval_cmd->callback([&] {
    const nbse::LabeledDataset data = load_labeled(
        eval_m.input, nbse::matrix_format_from_name(eval_m.format),
        eval_labels);
    std::vector<nbse::SelectorKind> methods;
    for (const std::string& name : split_list(eval_methods, ','))
      methods.push_back(nbse::selector_from_name(name));
    nbse::SweepOptions opt;
    opt.proportions = parse_double_list(eval_props);
    opt.seeds = parse_u64_list(eval_seeds);
    opt.test_fraction = eval_test_fraction;
    opt.representation = eval_repr == "original"
                             ? nbse::Representation::original
                             : nbse::Representation::spectral;
    opt.train.l2 = eval_l2;
    opt.train.max_epochs = eval_max_epochs;
    opt.train.tol = eval_tol_train;
    opt.axis.k_feat = eval_k_feat;
    opt.axis.root = to_root(eval_root);
    opt.fp.graph = to_graph(eval_g);
    opt.fp.root = to_root(eval_root);
    opt.fp_mode = eval_mode == "global" ? nbse::FingerprintMode::global
                                        : nbse::FingerprintMode::per_feature;
    const nbse::RetentionCurve curve =
        nbse::retention_sweep(data, methods, opt);
    if (!eval_cells_out.empty())
      write_file(eval_cells_out, [&](std::ostream& o) {
        nbse::write_sweep_cells_csv(o, curve);
      });
    if (!eval_agg_out.empty())
      write_file(eval_agg_out, [&](std::ostream& o) {
        nbse::write_sweep_aggregate_csv(o, curve);
      });
    for (const auto& a : curve.aggregates)
      std::printf("%-7s p=%.2f mean=%.4f std=%.4f\n",
                  nbse::selector_name(a.method).c_str(), a.p, a.mean,
                  a.std_dev);
  });

  // ---- noise-sweep ---------------------------------------------------
  auto* noise_cmd = app.add_subcommand(
      "noise-sweep", "Nishimori-shift stability experiment");
  CommonMatrixOpts noise_m;
  GraphOpts noise_g;
  RootOpts noise_root;
  std::string noise_factors, noise_table_out, noise_fit_out;
  int noise_trials = 20;
  std::uint64_t noise_seed = 0;
  add_matrix_opts(noise_cmd, noise_m);
  add_graph_opts(noise_cmd, noise_g);
  add_root_opts(noise_cmd, noise_root);
  noise_cmd->add_option("--factors", noise_factors,
                        "comma list (default: 8 log points in [1e-3,1e-1])");
  noise_cmd->add_option("--trials", noise_trials);
  noise_cmd->add_option("--seed", noise_seed);
  noise_cmd->add_option("--table", noise_table_out, "per-trial CSV");
  noise_cmd->add_option("--fit", noise_fit_out, "fit summary key=value file");
  noise_cmd->callback([&] {
    const nbse::DataMatrix X = nbse::read_matrix_file(
        noise_m.input, nbse::matrix_format_from_name(noise_m.format));
    nbse::ShiftSweepOptions opt;
    if (!noise_factors.empty()) opt.factors = parse_double_list(noise_factors);
    opt.trials = noise_trials;
    opt.seed = noise_seed;
    opt.graph = to_graph(noise_g);
    opt.root = to_root(noise_root);
    const nbse::ShiftTable table = nbse::beta_shift_sweep(X, opt);
    if (!noise_table_out.empty())
      write_file(noise_table_out,
                 [&](std::ostream& o) { nbse::write_shift_csv(o, table); });
    if (!noise_fit_out.empty())
      write_file(noise_fit_out,
                 [&](std::ostream& o) { nbse::write_shift_fit(o, table); });
    std::cout << "slope=" << fmt17(table.slope) << '\n'
              << "slope_stderr=" << fmt17(table.slope_stderr) << '\n'
              << "excluded=" << table.excluded << '\n'
              << "beta_n=" << fmt17(table.beta_n_baseline) << '\n';
  });

  // ---- report --------------------------------------------------------
  auto* report_cmd =
      app.add_subcommand("report", "human summary of a run report");
  std::string report_dir;
  report_cmd->add_option("--dir", report_dir, "pipeline output directory")
      ->required();
  report_cmd->callback([&] {
    std::ifstream in(report_dir + "/report.txt");
    if (!in)
      throw nbse::IoError("cannot open '" + report_dir + "/report.txt'");
    std::string line;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string key;
      ss >> key;
      double v;
      std::string rest;
      if (key != "stage" && key != "schema" && (ss >> v) && ss.eof()) {
        std::printf("%-18s %.6g\n", key.c_str(), v);
      } else {
        std::cout << line << '\n';
      }
    }
  });

  // ---- run -----------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "full pipeline from a config");
  std::string run_config;
  run_cmd->add_option("--config", run_config, "key=value config file")
      ->required();
  run_cmd->callback([&] {
    const nbse::RunConfig cfg = nbse::read_run_config_file(run_config);
    const nbse::RunReport rep = nbse::run_pipeline(cfg);
    std::cout << "output_dir=" << cfg.output_dir << '\n'
              << "beta_n=" << fmt17(rep.object_root.beta_n) << '\n'
              << "residual=" << fmt17(rep.object_root.residual) << '\n';
    for (const nbse::StageRecord& s : rep.stages)
      std::cout << "stage " << s.name << ' '
                << (s.executed ? "executed" : "skipped") << '\n';
  });

  // ---- synth ---------------------------------------------------------
  auto* synth_cmd =
      app.add_subcommand("synth", "deterministic synthetic datasets");
  std::string synth_kind = "sbm_blobs", synth_out, synth_format = "csv";
  std::string synth_labels_out, synth_planted_out;
  nbse::SyntheticSpec synth_spec;
  synth_cmd->add_option("--kind", synth_kind, "sbm_blobs|redundant_groups")
      ->check(CLI::IsMember({"sbm_blobs", "redundant_groups"}));
  synth_cmd->add_option("--m", synth_spec.m, "objects");
  synth_cmd->add_option("--d", synth_spec.d, "features");
  synth_cmd->add_option("--classes", synth_spec.classes);
  synth_cmd->add_option("--groups", synth_spec.groups);
  synth_cmd->add_option("--copies", synth_spec.copies);
  synth_cmd->add_option("--separation", synth_spec.separation);
  synth_cmd->add_option("--noise", synth_spec.noise);
  synth_cmd->add_option("--seed", synth_spec.seed);
  synth_cmd->add_option("--output", synth_out, "matrix file")->required();
  synth_cmd->add_option("--format", synth_format, "csv|bin")
      ->check(CLI::IsMember({"csv", "bin"}));
  synth_cmd->add_option("--labels-out", synth_labels_out, "label file")
      ->required();
  synth_cmd->add_option("--planted-out", synth_planted_out,
                        "planted-structure sidecar");
  synth_cmd->callback([&] {
    synth_spec.kind = synth_kind == "sbm_blobs"
                          ? nbse::SyntheticKind::sbm_blobs
                          : nbse::SyntheticKind::redundant_groups;
    const nbse::SyntheticData synth = nbse::make_synthetic(synth_spec);
    nbse::write_matrix_file(synth_out, synth.data.X,
                            nbse::matrix_format_from_name(synth_format));
    nbse::write_labels_file(synth_labels_out, synth.data.y);
    if (!synth_planted_out.empty())
      write_file(synth_planted_out,
                 [&](std::ostream& o) { nbse::write_planted(o, synth); });
    std::cout << "m=" << synth_spec.m << " d=" << synth_spec.d
              << " classes=" << synth_spec.classes << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // bad flags are configuration errors
  } catch (const nbse::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const nbse::NoTransitionError& e) {
    std::cerr << "no transition: " << e.what() << '\n';
    return 3;
  } catch (const nbse::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 4;
  } catch (const nbse::RangeError& e) {
    std::cerr << "range error: " << e.what() << '\n';
    return 4;
  } catch (const nbse::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
