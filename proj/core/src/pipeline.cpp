#include "nbse/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nbse/ablation.hpp"
#include "nbse/bethe_hessian.hpp"
#include "nbse/qc_ldpc.hpp"
#include "nbse/synthetic.hpp"

namespace nbse {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const long r = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  return static_cast<int>(r);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const unsigned long long r = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  return r;
}

double to_double(const std::string& key, const std::string& v) {
  const char* begin = v.c_str();
  char* end = nullptr;
  const double r = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  return r;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "0") return false;
  if (v == "1") return true;
  throw ConfigError("key '" + key + "': expected 0 or 1, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string token;
  while (std::getline(ss, token, sep)) parts.push_back(trim(token));
  return parts;
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::map<std::string, std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key=value, got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!seen.emplace(key, value).second)
      throw ConfigError("duplicate key '" + key + "'");

    if (key == "input") cfg.input = value;
    else if (key == "input_format")
      cfg.input_format = matrix_format_from_name(value);
    else if (key == "labels") cfg.labels = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "backbone") {
      if (value != "knn" && value != "qc_ldpc")
        throw ConfigError("backbone must be knn or qc_ldpc");
      cfg.backbone = value;
    } else if (key == "k_scale") cfg.graph.k_scale = to_int(key, value);
    else if (key == "k_graph") cfg.graph.k_graph = to_int(key, value);
    else if (key == "mutual") cfg.graph.mutual = to_bool(key, value);
    else if (key == "qc_base") {
      for (const std::string& row : split(value, ';')) {
        std::vector<int> r;
        for (const std::string& cell : split(row, ','))
          r.push_back(to_int(key, cell));
        cfg.qc_base.push_back(std::move(r));
      }
    } else if (key == "qc_lift") cfg.qc_lift = to_int(key, value);
    else if (key == "qc_girth_min") cfg.qc_girth_min = to_int(key, value);
    else if (key == "qc_retries") cfg.qc_retries = to_int(key, value);
    else if (key == "beta_max") cfg.root.beta_max = to_double(key, value);
    else if (key == "n_scan") cfg.root.n_scan = to_int(key, value);
    else if (key == "tol_beta") cfg.root.tol_beta = to_double(key, value);
    else if (key == "tol_lambda") cfg.root.tol_lambda = to_double(key, value);
    else if (key == "fingerprint_mode") {
      if (value == "global") cfg.fp_mode = FingerprintMode::global;
      else if (value == "per_feature") cfg.fp_mode = FingerprintMode::per_feature;
      else throw ConfigError("fingerprint_mode must be global or per_feature");
    } else if (key == "k_feat") cfg.k_feat = to_int(key, value);
    else if (key == "standardize") cfg.standardize = to_bool(key, value);
    else if (key == "select_n") cfg.select_n = to_int(key, value);
    else if (key == "proportions") {
      cfg.proportions.clear();
      for (const std::string& p : split(value, ','))
        cfg.proportions.push_back(to_double(key, p));
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const std::string& m : split(value, ','))
        cfg.methods.push_back(selector_from_name(m));
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const std::string& s : split(value, ','))
        cfg.seeds.push_back(to_u64(key, s));
    } else if (key == "test_fraction")
      cfg.test_fraction = to_double(key, value);
    else if (key == "representation") {
      if (value == "original") cfg.representation = Representation::original;
      else if (value == "spectral") cfg.representation = Representation::spectral;
      else throw ConfigError("representation must be original or spectral");
    } else if (key == "l2") cfg.train.l2 = to_double(key, value);
    else if (key == "max_epochs") cfg.train.max_epochs = to_int(key, value);
    else if (key == "tol_train") cfg.train.tol = to_double(key, value);
    else if (key == "noise_factors") {
      cfg.noise_factors.clear();
      for (const std::string& f : split(value, ','))
        cfg.noise_factors.push_back(to_double(key, f));
    } else if (key == "noise_trials") cfg.noise_trials = to_int(key, value);
    else if (key == "seed") cfg.seed = to_u64(key, value);
    else if (key == "threads") cfg.threads = to_int(key, value);
    else
      throw ConfigError("unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig read_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_run_config(in);
}

void validate_run_config(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("config requires input=");
  if (cfg.output_dir.empty()) throw ConfigError("config requires output_dir=");
  if (!std::filesystem::exists(cfg.input))
    throw ConfigError("input file '" + cfg.input + "' does not exist");
  if (!cfg.labels.empty() && !std::filesystem::exists(cfg.labels))
    throw ConfigError("label file '" + cfg.labels + "' does not exist");
  if (cfg.graph.k_scale < 1 || cfg.graph.k_graph < 1)
    throw ConfigError("k_scale and k_graph must be at least 1");
  if (cfg.backbone == "qc_ldpc") {
    if (cfg.qc_base.empty() || cfg.qc_lift < 1)
      throw ConfigError("qc_ldpc backbone requires qc_base and qc_lift");
  }
  if (cfg.select_n >= 0 && cfg.select_n == 0) {
    // allowed: empty selection, handled by guards
  }
  for (double p : cfg.proportions)
    if (!(p > 0.0 && p <= 1.0))
      throw ConfigError("proportions must lie in (0, 1]");
  if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction < 1.0))
    throw ConfigError("test_fraction must lie in [0, 1)");
  if (cfg.noise_trials < 1) throw ConfigError("noise_trials must be >= 1");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
}

namespace {

void with_stage(RunReport& rep, const std::string& name,
                const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + name + ": " + e.what());
  } catch (const NoTransitionError& e) {
    throw NoTransitionError("stage " + name + ": " + e.what());
  } catch (const SolverError& e) {
    throw SolverError("stage " + name + ": " + e.what());
  } catch (const RangeError& e) {
    throw RangeError("stage " + name + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError("stage " + name + ": " + e.what());
  }
  const auto t1 = std::chrono::steady_clock::now();
  rep.timings_ms.emplace_back(
      name, std::chrono::duration<double, std::milli>(t1 - t0).count());
}

void mark(RunReport& rep, const std::string& name, bool executed,
          const std::string& detail) {
  rep.stages.push_back({name, executed, detail});
}

template <class WriteFn>
void write_artifact(const std::filesystem::path& path, WriteFn&& fn) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  fn(out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

RunReport run_pipeline(const RunConfig& cfg) {
  validate_run_config(cfg);
  RunReport rep;
  const std::filesystem::path outdir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.output_dir +
                        "': " + ec.message());

  // --- ingest ---------------------------------------------------------
  DataMatrix X;
  LabeledDataset labeled;
  bool have_labels = false;
  with_stage(rep, "ingest", [&] {
    X = read_matrix_file(cfg.input, cfg.input_format);
    validate_data_matrix(X.values);
    rep.m = X.n_objects();
    rep.d = X.n_features();
    if (!cfg.labels.empty()) {
      labeled.y = read_labels_file(cfg.labels);
      int max_label = 0;
      for (int v : labeled.y) {
        if (v < 0) throw ConfigError("labels must be nonnegative");
        max_label = std::max(max_label, v);
      }
      labeled.n_classes = max_label + 1;
      labeled.X = X;
      validate_labeled_dataset(labeled);
      have_labels = true;
    }
  });
  mark(rep, "ingest", true,
       "M=" + std::to_string(rep.m) + " D=" + std::to_string(rep.d) +
           (have_labels ? " classes=" + std::to_string(labeled.n_classes)
                        : " unlabeled"));

  // --- graph ----------------------------------------------------------
  SimilarityGraph graph;
  LocalScales scales;
  with_stage(rep, "graph", [&] {
    scales = local_scales(X, cfg.graph.k_scale);
    if (cfg.backbone == "qc_ldpc") {
      Protograph proto;
      proto.base = cfg.qc_base;
      proto.lift = cfg.qc_lift;
      proto.seed = cfg.seed;
      if (proto.n_nodes() != X.n_objects())
        throw ConfigError("qc backbone has " + std::to_string(proto.n_nodes()) +
                          " nodes but the matrix has " +
                          std::to_string(X.n_objects()) + " objects");
      const SimilarityGraph backbone =
          build_qc_backbone(proto, cfg.qc_girth_min, cfg.qc_retries);
      graph = weight_graph_on_backbone(X, backbone, scales);
    } else {
      graph = build_knn_graph(X, cfg.graph.k_graph, scales, cfg.graph.mutual);
    }
    rep.backbone = cfg.backbone;
    rep.n_edges = graph.n_edges();
    rep.avg_degree = graph.average_degree();
    rep.girth = girth(graph);
    rep.components = graph.connected_components();
    write_artifact(outdir / "graph.txt",
                   [&](std::ostream& o) { write_graph(o, graph); });
  });
  mark(rep, "graph", true,
       "edges=" + std::to_string(rep.n_edges) +
           " components=" + std::to_string(rep.components));

  // --- beta -----------------------------------------------------------
  with_stage(rep, "beta", [&] {
    rep.object_root = find_beta_n(graph, cfg.root);
    const BetaCurve curve =
        scan_lambda(graph, cfg.root.beta_max, cfg.root.n_scan);
    write_artifact(outdir / "beta_curve.csv",
                   [&](std::ostream& o) { write_beta_curve(o, curve); });
  });
  mark(rep, "beta", true, "beta_n=" + fmt17(rep.object_root.beta_n));

  // --- fingerprint ----------------------------------------------------
  with_stage(rep, "fingerprint", [&] {
    FingerprintParams fp;
    fp.graph = cfg.graph;
    fp.root = cfg.root;
    const SpectralFingerprint psi = fingerprint(X, cfg.fp_mode, fp);
    rep.flagged_slices =
        static_cast<int>(std::count(psi.flagged.begin(), psi.flagged.end(),
                                    true));
    write_artifact(outdir / "psi.csv",
                   [&](std::ostream& o) { write_fingerprint_csv(o, psi); });
  });
  mark(rep, "fingerprint", true,
       std::string(cfg.fp_mode == FingerprintMode::global ? "global"
                                                          : "per_feature") +
           " flagged=" + std::to_string(rep.flagged_slices));

  // --- embed-features -------------------------------------------------
  FeatureEmbedding emb;
  FeatureAxisParams axis;
  axis.k_feat = cfg.k_feat;
  axis.standardize = cfg.standardize;
  axis.root = cfg.root;
  with_stage(rep, "embed-features", [&] {
    emb = feature_axis_embedding(X, axis);
    rep.phi_beta_n = emb.beta_n;
    write_artifact(outdir / "phi.csv",
                   [&](std::ostream& o) { write_phi_csv(o, emb); });
  });
  mark(rep, "embed-features", true, "beta_n=" + fmt17(rep.phi_beta_n));

  // --- select ---------------------------------------------------------
  if (cfg.select_n >= 0) {
    size_t fallbacks = 0;
    with_stage(rep, "select", [&] {
      const SelectionResult sel = select_features(emb, cfg.select_n);
      rep.select_n = cfg.select_n;
      rep.selection = sel.indices;
      fallbacks = sel.fallback_events.size();
      write_artifact(outdir / "selection.csv",
                     [&](std::ostream& o) { write_selection_csv(o, sel); });
    });
    mark(rep, "select", true,
         "n=" + std::to_string(cfg.select_n) +
             " fallback=" + std::to_string(fallbacks));
  } else {
    mark(rep, "select", false, "select_n not configured");
  }

  // --- eval -----------------------------------------------------------
  if (have_labels && !cfg.proportions.empty()) {
    with_stage(rep, "eval", [&] {
      SweepOptions opt;
      opt.proportions = cfg.proportions;
      opt.seeds = cfg.seeds;
      opt.test_fraction = cfg.test_fraction;
      opt.representation = cfg.representation;
      opt.train = cfg.train;
      opt.axis = axis;
      opt.fp.graph = cfg.graph;
      opt.fp.root = cfg.root;
      opt.fp_mode = cfg.fp_mode;
      rep.curve = retention_sweep(labeled, cfg.methods, opt);
      rep.has_curve = true;
      write_artifact(outdir / "sweep_cells.csv", [&](std::ostream& o) {
        write_sweep_cells_csv(o, rep.curve);
      });
      write_artifact(outdir / "sweep_aggregate.csv", [&](std::ostream& o) {
        write_sweep_aggregate_csv(o, rep.curve);
      });
    });
    mark(rep, "eval", true,
         std::to_string(rep.curve.cells.size()) + " cells");
  } else {
    mark(rep, "eval", false,
         have_labels ? "no proportions configured" : "no labels provided");
  }

  // --- noise-sweep ----------------------------------------------------
  if (!cfg.noise_factors.empty()) {
    with_stage(rep, "noise-sweep", [&] {
      ShiftSweepOptions opt;
      opt.factors = cfg.noise_factors;
      opt.trials = cfg.noise_trials;
      opt.seed = cfg.seed;
      opt.graph = cfg.graph;
      opt.root = cfg.root;
      rep.shift = beta_shift_sweep(X, opt);
      rep.has_shift = true;
      write_artifact(outdir / "noise_table.csv", [&](std::ostream& o) {
        write_shift_csv(o, rep.shift);
      });
      write_artifact(outdir / "noise_fit.txt", [&](std::ostream& o) {
        write_shift_fit(o, rep.shift);
      });
    });
    mark(rep, "noise-sweep", true, "slope=" + fmt17(rep.shift.slope));
  } else {
    mark(rep, "noise-sweep", false, "noise_factors not configured");
  }

  // --- report ---------------------------------------------------------
  with_stage(rep, "report", [&] {
    write_artifact(outdir / "report.txt",
                   [&](std::ostream& o) { write_report(o, rep); });
  });
  mark(rep, "report", true, "report.txt");
  write_artifact(outdir / "timings.txt",
                 [&](std::ostream& o) { write_timings(o, rep); });
  return rep;
}

void write_report(std::ostream& out, const RunReport& rep) {
  out << "schema nbse-report-v1\n";
  for (const StageRecord& s : rep.stages)
    out << "stage " << s.name << ' ' << (s.executed ? "executed" : "skipped")
        << ' ' << s.detail << '\n';
  out << "m " << rep.m << '\n';
  out << "d " << rep.d << '\n';
  out << "backbone " << rep.backbone << '\n';
  out << "edges " << rep.n_edges << '\n';
  out << "avg_degree " << fmt17(rep.avg_degree) << '\n';
  out << "girth ";
  if (rep.girth == kGirthInfinite) out << "inf";
  else out << rep.girth;
  out << '\n';
  out << "components " << rep.components << '\n';
  out << "beta_n " << fmt17(rep.object_root.beta_n) << '\n';
  out << "beta_residual " << fmt17(rep.object_root.residual) << '\n';
  out << "beta_bracket " << fmt17(rep.object_root.bracket_lo) << ' '
      << fmt17(rep.object_root.bracket_hi) << '\n';
  out << "beta_g " << fmt17(rep.object_root.g) << '\n';
  out << "phi_beta_n " << fmt17(rep.phi_beta_n) << '\n';
  out << "flagged_slices " << rep.flagged_slices << '\n';
  if (rep.select_n >= 0) {
    out << "select_n " << rep.select_n << '\n';
    out << "selection";
    for (int i : rep.selection) out << ' ' << i;
    out << '\n';
  }
  if (rep.has_curve) {
    for (const auto& a : rep.curve.aggregates)
      out << "accuracy " << selector_name(a.method) << ' ' << fmt17(a.p)
          << ' ' << fmt17(a.mean) << ' ' << fmt17(a.std_dev) << '\n';
  }
  if (rep.has_shift) {
    out << "noise_slope " << fmt17(rep.shift.slope) << '\n';
    out << "noise_slope_stderr " << fmt17(rep.shift.slope_stderr) << '\n';
    out << "noise_excluded " << rep.shift.excluded << '\n';
  }
}

void write_timings(std::ostream& out, const RunReport& rep) {
  for (const auto& [name, ms] : rep.timings_ms)
    out << name << ' ' << fmt17(ms) << '\n';
}

}  // namespace nbse
