#include "nbse/nishimori.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "nbse/bethe_hessian.hpp"
#include "nbse/fingerprint.hpp"

namespace nbse {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double resolve_beta_max(const SimilarityGraph& g, double requested) {
  if (g.n_edges() == 0)
    throw NoTransitionError(
        "graph has no edges; lambda_min(H) = 1 for every beta");
  const double cap = kOverflowGuard / g.max_weight();
  double bmax = requested > 0.0 ? requested : 20.0 / g.median_weight();
  return std::min(bmax, cap);
}

struct Bracket {
  double lo = 0.0, hi = 0.0;
  double f_lo = 0.0, f_hi = 0.0;
};

// The symmetric eigensolve carries a backward error of a few hundred ulps of
// ||H||, and d_tilde grows like e^{2 beta w}, so at the tail of the scan the
// computed lambda_min of a transition-free graph (true value near 0+, e.g. a
// ring) is pure roundoff of magnitude eps * ||H||. A crossing is only
// believed when lambda_min clears this band on the negative side; genuine
// transitions do so immediately, since past the root lambda_min is
// macroscopic while ||H|| is still moderate.
constexpr double kSignFloorRel = 1e-11;

struct FlooredLambda {
  double lambda = 0.0;
  double floor = 0.0;  // kSignFloorRel * ||H(beta)||_inf
  bool negative() const { return lambda < -floor; }
  bool positive() const { return lambda > floor; }
};

FlooredLambda lambda_with_floor(const SimilarityGraph& g, double beta) {
  const BetheHessianAssembly a = assemble_bethe_hessian(g, beta);
  FlooredLambda out;
  out.lambda = smallest_eigenpair(a).lambda;
  Eigen::VectorXd row = a.d_tilde.array() + 1.0;  // |H_ii|, d_tilde >= 0
  for (int k = 0; k < a.S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a.S, k); it; ++it)
      row[it.row()] += std::abs(it.value());
  out.floor = kSignFloorRel * row.maxCoeff();
  return out;
}

// Geometric doubling scan; stops at the first reliable sign change.
Bracket scan_bracket(const SimilarityGraph& g, double beta_max, int n_scan) {
  if (n_scan < 2) throw ConfigError("n_scan must be at least 2");
  const double bmax = resolve_beta_max(g, beta_max);

  double lo = 0.0, f_lo = 1.0;  // H(0) = I
  double min_f = 1.0, min_beta = 0.0;
  for (int i = 0; i <= n_scan; ++i) {
    const double b = std::ldexp(bmax, i - n_scan);
    const FlooredLambda f = lambda_with_floor(g, b);
    if (f.negative()) return {lo, b, f_lo, f.lambda};
    // track the smallest value whose sign is actually trustworthy
    if (f.positive() && f.lambda < min_f) {
      min_f = f.lambda;
      min_beta = b;
    }
    lo = b;
    f_lo = f.lambda;
  }
  throw NoTransitionError("lambda_min has no sign change on (0, " +
                          fmt17(bmax) + "]; smallest reliable value " +
                          fmt17(min_f) + " at beta = " + fmt17(min_beta));
}

}  // namespace

int BetaCurve::sign_changes() const {
  int flips = 0;
  for (Eigen::Index i = 0; i + 1 < lambdas.size(); ++i)
    if ((lambdas[i] > 0.0) != (lambdas[i + 1] > 0.0)) ++flips;
  return flips;
}

double lambda_min_at(const SimilarityGraph& g, double beta) {
  return smallest_eigenpair(assemble_bethe_hessian(g, beta)).lambda;
}

double default_beta_max(const SimilarityGraph& g) {
  return resolve_beta_max(g, 0.0);
}

BetaCurve scan_lambda(const SimilarityGraph& g, double beta_max, int n_scan) {
  if (n_scan < 2) throw ConfigError("n_scan must be at least 2");
  const double bmax = resolve_beta_max(g, beta_max);
  BetaCurve curve;
  curve.betas.resize(n_scan + 2);
  curve.lambdas.resize(n_scan + 2);
  curve.betas[0] = 0.0;
  curve.lambdas[0] = 1.0;
  for (int i = 0; i <= n_scan; ++i) {
    curve.betas[i + 1] = std::ldexp(bmax, i - n_scan);
    curve.lambdas[i + 1] = lambda_min_at(g, curve.betas[i + 1]);
  }
  return curve;
}

std::pair<double, double> bracket_root(const SimilarityGraph& g,
                                       double beta_max, int n_scan) {
  const Bracket br = scan_bracket(g, beta_max, n_scan);
  return {br.lo, br.hi};
}

NishimoriResult find_beta_n(const SimilarityGraph& g, const RootOptions& opt) {
  if (!(opt.tol_beta > 0.0) || !(opt.tol_lambda > 0.0))
    throw ConfigError("tolerances must be positive");
  if (opt.max_iter < 1) throw ConfigError("max_iter must be at least 1");

  const Bracket br = scan_bracket(g, opt.beta_max, opt.n_scan);
  const auto f = [&g](double beta) { return lambda_min_at(g, beta); };

  // Brent's method (inverse quadratic / secant with bisection fallback).
  double a = br.lo, b = br.hi, fa = br.f_lo, fb = br.f_hi;
  double c = a, fc = fa;
  double d = b - a, e = d;
  const double eps = std::numeric_limits<double>::epsilon();
  int iter = 0;
  bool converged = false;
  for (; iter < opt.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * opt.tol_beta;
    const double xm = 0.5 * (c - b);
    if (std::abs(fb) <= opt.tol_lambda || std::abs(xm) <= tol1) {
      converged = true;
      break;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double r0 = fa / fc, r1 = fb / fc;
        p = s * (2.0 * xm * r0 * (r0 - r1) - (b - a) * (r1 - 1.0));
        q = (r0 - 1.0) * (r1 - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q),
                             std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  if (!converged)
    throw SolverError("Brent refinement did not converge in " +
                      std::to_string(opt.max_iter) +
                      " iterations; |lambda| = " + fmt17(std::abs(fb)));

  NishimoriResult res;
  res.beta_n = b;
  res.bracket_lo = br.lo;
  res.bracket_hi = br.hi;
  res.residual = std::abs(fb);
  res.iterations = iter;
  double h = std::max(1e-4, opt.tol_beta);
  if (h >= res.beta_n) h = 0.5 * res.beta_n;
  res.g = (f(res.beta_n + h) - f(res.beta_n - h)) / (2.0 * h);
  return res;
}

NishimoriResult find_beta_n(const SimilarityGraph& g, double tol_beta,
                            double tol_lambda) {
  RootOptions opt;
  opt.tol_beta = tol_beta;
  opt.tol_lambda = tol_lambda;
  return find_beta_n(g, opt);
}

std::vector<FeatureRoot> beta_n_per_feature(const DataMatrix& X,
                                            const GraphParams& gp,
                                            const RootOptions& opt) {
  validate_data_matrix(X.values);
  std::vector<FeatureRoot> roots(X.n_features());
  for (int l = 0; l < X.n_features(); ++l) {
    const SimilarityGraph g = univariate_graph(X, l, gp);
    try {
      roots[l].beta_n = find_beta_n(g, opt).beta_n;
      roots[l].found = true;
    } catch (const NoTransitionError& e) {
      roots[l].note = e.what();
    }
  }
  return roots;
}

void write_beta_curve(std::ostream& out, const BetaCurve& curve) {
  out << "beta,lambda_min\n";
  for (Eigen::Index i = 0; i < curve.betas.size(); ++i)
    out << fmt17(curve.betas[i]) << ',' << fmt17(curve.lambdas[i]) << '\n';
}

}  // namespace nbse
