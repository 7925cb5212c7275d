#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nbse/eval.hpp"
#include "nbse/matrix_io.hpp"
#include "nbse/noise.hpp"

namespace nbse {

/// Flat key=value run configuration. Unknown and duplicate keys are
/// rejected so a typo cannot silently fall back to a default. Environment
/// variables are never consulted.
struct RunConfig {
  std::string input;
  MatrixFormat input_format = MatrixFormat::csv;
  std::string labels;  // empty: unlabeled run, eval is skipped
  std::string output_dir;

  std::string backbone = "knn";  // knn | qc_ldpc
  GraphParams graph;
  std::vector<std::vector<int>> qc_base;  // rows "a,b;c,d"
  int qc_lift = 0;
  int qc_girth_min = 6;
  int qc_retries = 50;

  RootOptions root;

  FingerprintMode fp_mode = FingerprintMode::global;
  int k_feat = 0;  // 0 = min(10, D-1)
  bool standardize = true;

  int select_n = -1;  // < 0: select stage skipped
  std::vector<double> proportions;  // empty: eval skipped
  std::vector<SelectorKind> methods = {SelectorKind::nbse, SelectorKind::anova,
                                       SelectorKind::random};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double test_fraction = 0.2;
  Representation representation = Representation::original;
  TrainOptions train;

  std::vector<double> noise_factors;  // empty: noise sweep skipped
  int noise_trials = 20;

  std::uint64_t seed = 0;  // master seed (qc shifts, noise trials)
  int threads = 1;         // accepted cap; execution is sequential
};

RunConfig parse_run_config(std::istream& in);
RunConfig read_run_config_file(const std::string& path);

/// Referenced files must exist; numeric ranges are checked here so errors
/// surface before any work starts.
void validate_run_config(const RunConfig& cfg);

struct StageRecord {
  std::string name;
  bool executed = false;
  std::string detail;  // one-line summary or the reason it was skipped
};

struct RunReport {
  std::vector<StageRecord> stages;

  int m = 0, d = 0;
  std::string backbone;
  int n_edges = 0;
  double avg_degree = 0.0;
  int girth = 0;  // kGirthInfinite when acyclic
  int components = 0;

  NishimoriResult object_root;
  double phi_beta_n = 0.0;
  int flagged_slices = 0;

  int select_n = -1;
  std::vector<int> selection;

  bool has_curve = false;
  RetentionCurve curve;
  bool has_shift = false;
  ShiftTable shift;

  // Wall-clock per stage; written to timings.txt, never to report.txt, so
  // reruns of a fixed config stay byte-identical.
  std::vector<std::pair<std::string, double>> timings_ms;
};

/// Runs ingest, graph, beta, fingerprint, embed-features, then the optional
/// select / eval / noise-sweep stages, writing every artifact under
/// cfg.output_dir. Module errors are rethrown with the stage name prefixed,
/// preserving their type (and so the exit code).
RunReport run_pipeline(const RunConfig& cfg);

/// Deterministic key=value report ("schema nbse-report-v1"), floats at 17
/// significant digits.
void write_report(std::ostream& out, const RunReport& rep);
void write_timings(std::ostream& out, const RunReport& rep);

}  // namespace nbse
