#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <iosfwd>

#include "nbse/errors.hpp"
#include "nbse/graph.hpp"

namespace nbse {

/// sinh overflows near argument 710 and S_ij = sinh(2 beta W_ij)/2, so the
/// assembly refuses beta * max(W) beyond this instead of returning inf.
inline constexpr double kOverflowGuard = 350.0;

/// At or below this node count eigen-solves use a full dense symmetric
/// decomposition; above it, Lanczos with full reorthogonalization.
inline constexpr int kDenseCutoff = 512;

/// H(beta) = I + diag(d_tilde) - S with
///   d_tilde_i = sum_j sinh^2(beta W_ij),  S_ij = sinh(2 beta W_ij) / 2.
/// S keeps the graph's sparsity pattern even where entries underflow to 0.
struct BetheHessianAssembly {
  double beta = 0.0;
  Eigen::SparseMatrix<double> H;
  Eigen::VectorXd d_tilde;
  Eigen::SparseMatrix<double> S;

  int n() const { return static_cast<int>(d_tilde.size()); }
};

struct EigenPair {
  double lambda = 0.0;
  Eigen::VectorXd psi;      // unit norm, canonical sign
  double residual = 0.0;    // ||H psi - lambda psi||_2
};

/// Signature of a symmetric matrix: eigenvalues with |lambda| <= zero_tol
/// count as zero. Counts sum to the dimension.
struct Inertia {
  int n_negative = 0;
  int n_zero = 0;
  int n_positive = 0;

  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Flips psi so its largest-magnitude entry is positive (ties resolve to the
/// lowest index). Eigenvector sign is otherwise arbitrary and the downstream
/// histogram binning needs a deterministic one.
void canonical_sign(Eigen::VectorXd& psi);

BetheHessianAssembly assemble_bethe_hessian(const SimilarityGraph& g,
                                            double beta);

/// Algebraically smallest eigenpair of H. Dense path at or below
/// dense_cutoff nodes, Lanczos above; throws SolverError (carrying the best
/// residual reached) if the iteration budget runs out.
EigenPair smallest_eigenpair(const BetheHessianAssembly& a, double tol = 1e-10,
                             int max_iter = 500,
                             int dense_cutoff = kDenseCutoff);

/// L_BH = I - (I+D)^{-1/2} S (I+D)^{-1/2}, congruent to H (same inertia).
Eigen::SparseMatrix<double> bh_laplacian(const BetheHessianAssembly& a);

Inertia inertia(const Eigen::MatrixXd& a, double zero_tol);
/// Scale-aware default threshold zero_tol = 1e-8 * ||A||_inf.
Inertia inertia(const Eigen::MatrixXd& a);

/// Second-order expansion I - beta W + beta^2 diag(sum_j W_ij^2); the
/// remainder on a fixed graph is O(beta^3).
Eigen::SparseMatrix<double> small_beta_approx(const SimilarityGraph& g,
                                              double beta);

/// Debug dump: "diag i d_tilde_i" section followed by "edge i j S_ij" rows,
/// 17 significant digits.
void write_assembly(std::ostream& out, const BetheHessianAssembly& a);

}  // namespace nbse
