#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nbse/data_matrix.hpp"
#include "nbse/errors.hpp"
#include "nbse/graph.hpp"

namespace nbse {

/// lambda_min(H(beta)) sampled on a grid. The grid always carries the exact
/// anchor beta = 0, lambda = 1 (H(0) = I) at index 0.
struct BetaCurve {
  Eigen::VectorXd betas;    // strictly ascending
  Eigen::VectorXd lambdas;

  /// Number of raw sign flips between consecutive grid points. More than one
  /// means reentrant crossings beyond the reported root. Note the curve is
  /// unfiltered: deep in the scan tail ||H|| ~ e^{2 beta w} and the computed
  /// lambda_min of a transition-free graph is eigensolver roundoff, so flips
  /// there are numerical noise (the root finder discounts them, this count
  /// does not).
  int sign_changes() const;
};

struct NishimoriResult {
  double beta_n = 0.0;
  double bracket_lo = 0.0;  // scan bracket containing the root
  double bracket_hi = 0.0;
  double residual = 0.0;    // |lambda_min(H(beta_n))|
  double g = 0.0;           // d lambda_min / d beta at beta_n
  int iterations = 0;       // Brent iterations
};

struct RootOptions {
  double beta_max = 0.0;  // <= 0 means 20 / median(W)
  int n_scan = 40;
  double tol_beta = 1e-6;
  double tol_lambda = 1e-8;
  int max_iter = 100;
};

/// lambda_min of assemble_bethe_hessian(g, beta).
double lambda_min_at(const SimilarityGraph& g, double beta);

/// 20 / median(W), clamped to the sinh overflow guard (kOverflowGuard /
/// max(W)) so a heavy-tailed weight distribution cannot push the scan into
/// a range error.
double default_beta_max(const SimilarityGraph& g);

/// Evaluates the full geometric grid beta_max/2^n_scan, ..., beta_max
/// (doubling steps) plus the beta = 0 anchor.
BetaCurve scan_lambda(const SimilarityGraph& g, double beta_max = 0.0,
                      int n_scan = 40);

/// First reliable sign-change interval of the geometric scan (evaluation
/// stops at the first crossing; reentrant crossings at larger beta are
/// ignored). "Reliable" means lambda_min clears -1e-11 * ||H(beta)||_inf:
/// the eigensolve's backward error grows with ||H|| ~ e^{2 beta w}, so raw
/// sub-roundoff flips at the scan tail do not count. Throws
/// NoTransitionError when no grid point is reliably negative up to beta_max.
std::pair<double, double> bracket_root(const SimilarityGraph& g,
                                       double beta_max = 0.0, int n_scan = 40);

/// Bracket scan followed by Brent refinement (bisection fallback when
/// interpolation stagnates) until |hi - lo| <= tol_beta or
/// |lambda_min| <= tol_lambda. g comes from a central difference with step
/// h = max(1e-4, tol_beta), shrunk if beta_n - h would go negative.
NishimoriResult find_beta_n(const SimilarityGraph& g, const RootOptions& opt);
NishimoriResult find_beta_n(const SimilarityGraph& g, double tol_beta = 1e-6,
                            double tol_lambda = 1e-8);

struct FeatureRoot {
  bool found = false;
  double beta_n = 0.0;
  std::string note;  // bracket-failure reason when !found
};

/// Independent root per univariate feature graph. A slice without a sign
/// change is flagged, not fatal; solver failures still propagate.
std::vector<FeatureRoot> beta_n_per_feature(const DataMatrix& X,
                                            const GraphParams& gp = {},
                                            const RootOptions& opt = {});

/// CSV "beta,lambda_min" with a header row, 17 significant digits.
void write_beta_curve(std::ostream& out, const BetaCurve& curve);

}  // namespace nbse
