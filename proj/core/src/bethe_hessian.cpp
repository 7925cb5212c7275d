#include "nbse/bethe_hessian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "nbse/rng.hpp"

namespace nbse {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void canonical_sign(Eigen::VectorXd& psi) {
  int pick = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double m = std::abs(psi[i]);
    if (m > best) {
      best = m;
      pick = static_cast<int>(i);
    }
  }
  if (psi.size() > 0 && psi[pick] < 0.0) psi = -psi;
}

BetheHessianAssembly assemble_bethe_hessian(const SimilarityGraph& g,
                                            double beta) {
  if (!(beta >= 0.0)) throw ConfigError("beta must be nonnegative");
  const double arg = beta * g.max_weight();
  if (arg > kOverflowGuard)
    throw RangeError("beta*max(W) = " + fmt17(arg) +
                     " exceeds the sinh overflow guard " + fmt17(kOverflowGuard));

  const int n = g.n_nodes();
  BetheHessianAssembly a;
  a.beta = beta;
  a.d_tilde = Eigen::VectorXd::Zero(n);

  std::vector<Eigen::Triplet<double>> st;
  st.reserve(2 * g.edges().size());
  for (const Edge& e : g.edges()) {
    const double sh = std::sinh(beta * e.w);
    const double s = 0.5 * std::sinh(2.0 * beta * e.w);
    a.d_tilde[e.u] += sh * sh;
    a.d_tilde[e.v] += sh * sh;
    st.emplace_back(e.u, e.v, s);
    st.emplace_back(e.v, e.u, s);
  }
  a.S.resize(n, n);
  a.S.setFromTriplets(st.begin(), st.end());

  std::vector<Eigen::Triplet<double>> ht;
  ht.reserve(st.size() + n);
  for (const auto& t : st) ht.emplace_back(t.row(), t.col(), -t.value());
  for (int i = 0; i < n; ++i) ht.emplace_back(i, i, 1.0 + a.d_tilde[i]);
  a.H.resize(n, n);
  a.H.setFromTriplets(ht.begin(), ht.end());
  return a;
}

namespace {

EigenPair dense_smallest(const Eigen::SparseMatrix<double>& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(H)};
  if (es.info() != Eigen::Success)
    throw SolverError("dense symmetric eigensolver did not converge");
  EigenPair p;
  p.lambda = es.eigenvalues()(0);
  p.psi = es.eigenvectors().col(0);
  p.psi.normalize();
  canonical_sign(p.psi);
  p.residual = (H * p.psi - p.lambda * p.psi).norm();
  return p;
}

// Shift-free Lanczos with full reorthogonalization (two classical
// Gram-Schmidt passes per step). Deterministic start vector; Ritz pair for
// the smallest eigenvalue extracted every step with an exact residual.
EigenPair lanczos_smallest(const Eigen::SparseMatrix<double>& H, double tol,
                           int max_iter) {
  const int n = static_cast<int>(H.rows());
  const int m = std::min(max_iter, n);

  std::mt19937_64 gen(mix_seed(0x6e62736521ull, 0));
  GaussianDraw gauss;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(gen);
  v.normalize();

  Eigen::MatrixXd V(n, m);
  V.col(0) = v;
  std::vector<double> alpha, off;

  EigenPair best;
  best.residual = std::numeric_limits<double>::infinity();

  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = H * V.col(j);
    if (j > 0) w -= off[j - 1] * V.col(j - 1);
    const double a = V.col(j).dot(w);
    alpha.push_back(a);
    w -= a * V.col(j);
    const auto basis = V.leftCols(j + 1);
    w -= basis * (basis.transpose() * w);
    w -= basis * (basis.transpose() * w);
    double b = w.norm();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j + 1, j + 1);
    for (int i = 0; i <= j; ++i) T(i, i) = alpha[i];
    for (int i = 0; i < j; ++i) {
      T(i, i + 1) = off[i];
      T(i + 1, i) = off[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Eigen::VectorXd y = basis * es.eigenvectors().col(0);
    y.normalize();
    const double theta = es.eigenvalues()(0);
    const double res = (H * y - theta * y).norm();
    if (res < best.residual) {
      best.lambda = theta;
      best.psi = y;
      best.residual = res;
    }
    if (best.residual <= tol) {
      canonical_sign(best.psi);
      return best;
    }

    if (b <= 1e-14) {
      // Invariant subspace hit early; continue in a fresh orthogonal
      // direction if one exists.
      for (int i = 0; i < n; ++i) w[i] = gauss(gen);
      w -= basis * (basis.transpose() * w);
      b = w.norm();
      if (b <= 1e-14) break;
    }
    if (j + 1 < m) {
      off.push_back(b);
      V.col(j + 1) = w / b;
    }
  }
  throw SolverError("Lanczos iteration budget " + std::to_string(max_iter) +
                    " exhausted; best residual " + fmt17(best.residual));
}

}  // namespace

EigenPair smallest_eigenpair(const BetheHessianAssembly& a, double tol,
                             int max_iter, int dense_cutoff) {
  if (a.n() < 2) throw ConfigError("smallest_eigenpair needs at least 2 nodes");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (a.n() <= dense_cutoff) return dense_smallest(a.H);
  return lanczos_smallest(a.H, tol, max_iter);
}

Eigen::SparseMatrix<double> bh_laplacian(const BetheHessianAssembly& a) {
  const int n = a.n();
  const Eigen::VectorXd inv_sqrt = (1.0 + a.d_tilde.array()).rsqrt();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.S.nonZeros() + n);
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
  for (int k = 0; k < a.S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a.S, k); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                     -inv_sqrt[it.row()] * it.value() * inv_sqrt[it.col()]);
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

Inertia inertia(const Eigen::MatrixXd& a, double zero_tol) {
  if (a.rows() != a.cols()) throw ConfigError("inertia needs a square matrix");
  if (a.rows() > kDenseCutoff)
    throw ConfigError("inertia is a dense diagnostic; matrix exceeds dense_cutoff");
  if (!(zero_tol >= 0.0)) throw ConfigError("zero_tol must be nonnegative");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SolverError("dense symmetric eigensolver did not converge");
  Inertia sig;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (std::abs(lam) <= zero_tol)
      ++sig.n_zero;
    else if (lam < 0.0)
      ++sig.n_negative;
    else
      ++sig.n_positive;
  }
  return sig;
}

Inertia inertia(const Eigen::MatrixXd& a) {
  const double norm_inf =
      a.rows() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
  return inertia(a, 1e-8 * norm_inf);
}

Eigen::SparseMatrix<double> small_beta_approx(const SimilarityGraph& g,
                                              double beta) {
  if (!(beta >= 0.0)) throw ConfigError("beta must be nonnegative");
  const int n = g.n_nodes();
  Eigen::VectorXd w2 = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * g.edges().size() + n);
  for (const Edge& e : g.edges()) {
    t.emplace_back(e.u, e.v, -beta * e.w);
    t.emplace_back(e.v, e.u, -beta * e.w);
    w2[e.u] += e.w * e.w;
    w2[e.v] += e.w * e.w;
  }
  for (int i = 0; i < n; ++i)
    t.emplace_back(i, i, 1.0 + beta * beta * w2[i]);
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

void write_assembly(std::ostream& out, const BetheHessianAssembly& a) {
  const int n = a.n();
  int m = 0;
  for (int k = 0; k < a.S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a.S, k); it; ++it)
      if (it.row() < it.col()) ++m;
  out << "nbse-bh v1 " << n << ' ' << m << " beta " << fmt17(a.beta) << '\n';
  for (int i = 0; i < n; ++i)
    out << "diag " << i << ' ' << fmt17(a.d_tilde[i]) << '\n';
  for (int k = 0; k < a.S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a.S, k); it; ++it)
      if (it.row() < it.col())
        out << "edge " << it.row() << ' ' << it.col() << ' '
            << fmt17(it.value()) << '\n';
}

}  // namespace nbse
