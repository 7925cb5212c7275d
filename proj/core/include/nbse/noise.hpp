#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nbse/data_matrix.hpp"
#include "nbse/errors.hpp"
#include "nbse/graph.hpp"
#include "nbse/nishimori.hpp"

namespace nbse {

/// Coloured Gaussian perturbation: row i receives i.i.d. noise with
/// standard deviation factor * base_scales.sigma[i] on every coordinate.
struct NoiseSpec {
  LocalScales base_scales;
  double factor = 0.0;
  std::uint64_t seed = 0;
};

DataMatrix perturb(const DataMatrix& X, const NoiseSpec& spec);

/// max over shared edges of |w_tilde - w| / |w|. The two graphs must have
/// identical edge sets (the experiment reweights a frozen backbone).
double weight_epsilon(const SimilarityGraph& g,
                      const SimilarityGraph& g_tilde);

struct ShiftSweepOptions {
  std::vector<double> factors;  // empty: 8 log-spaced points in [1e-3, 1e-1]
  int trials = 20;
  std::uint64_t seed = 0;
  GraphParams graph;
  RootOptions root;
};

struct ShiftRow {
  double factor = 0.0;
  int trial = 0;
  double epsilon = 0.0;
  double shift = 0.0;  // |beta_n_tilde - beta_n|, NaN when !ok
  bool ok = false;     // false: the perturbed graph lost its bracket
};

struct ShiftTable {
  std::vector<ShiftRow> rows;
  std::vector<double> factors;        // ascending, as swept
  std::vector<double> median_shifts;  // per factor, over ok trials
  double slope = 0.0;                 // log(median shift) vs log(factor)
  double intercept = 0.0;
  double slope_stderr = 0.0;          // ~95% CI is slope +/- 2*stderr
  int excluded = 0;                   // trials without a transition
  double beta_n_baseline = 0.0;
  double g_baseline = 0.0;
  int n_edges = 0;
};

/// Builds the baseline graph and root once, then per (factor, trial):
/// perturb the data, recompute local scales, reweight the frozen edge set,
/// and re-find the root. Trials whose perturbed graph has no transition are
/// recorded and excluded from the least-squares log-log fit.
ShiftTable beta_shift_sweep(const DataMatrix& X,
                            const ShiftSweepOptions& opt = {});

/// CSV "factor,trial,epsilon,shift"; failed trials carry shift nan.
void write_shift_csv(std::ostream& out, const ShiftTable& table);
/// Flat key=value fit summary (slope, intercept, stderr, exclusions,
/// baseline root data).
void write_shift_fit(std::ostream& out, const ShiftTable& table);

}  // namespace nbse
