#include "nbse/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <utility>

#include "nbse/bethe_hessian.hpp"

namespace nbse {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SimilarityGraph univariate_graph(const DataMatrix& X, int l,
                                 const GraphParams& gp) {
  validate_data_matrix(X.values);
  if (l < 0 || l >= X.n_features())
    throw ConfigError("feature index " + std::to_string(l) +
                      " out of range [0, " + std::to_string(X.n_features()) +
                      ")");
  const Eigen::VectorXd col = X.values.col(l);
  const auto d2 = [&col](int i, int j) {
    const double d = col[i] - col[j];
    return d * d;
  };
  const int n = X.n_objects();
  const LocalScales sc = local_scales_from_d2(n, gp.k_scale, d2);
  return build_knn_graph_from_d2(n, gp.k_graph, d2, sc, gp.mutual);
}

SpectralFingerprint fingerprint(const DataMatrix& X, FingerprintMode mode,
                                const FingerprintParams& params) {
  validate_data_matrix(X.values);
  const int M = X.n_objects();
  const int D = X.n_features();

  SpectralFingerprint fp;
  fp.mode = mode;
  fp.psi = Eigen::MatrixXd::Zero(M, D);
  fp.beta = Eigen::VectorXd::Zero(D);
  fp.residual = Eigen::VectorXd::Zero(D);
  fp.flagged.assign(D, false);

  double beta_global = 0.0;
  if (mode == FingerprintMode::global) {
    const LocalScales sc = local_scales(X, params.graph.k_scale);
    const SimilarityGraph obj =
        build_knn_graph(X, params.graph.k_graph, sc, params.graph.mutual);
    beta_global = find_beta_n(obj, params.root).beta_n;
  }

  for (int l = 0; l < D; ++l) {
    const SimilarityGraph g = univariate_graph(X, l, params.graph);
    double beta_l = beta_global;
    if (mode == FingerprintMode::per_feature) {
      try {
        beta_l = find_beta_n(g, params.root).beta_n;
      } catch (const NoTransitionError&) {
        fp.flagged[l] = true;
        continue;
      }
    }
    const EigenPair pair = smallest_eigenpair(
        assemble_bethe_hessian(g, beta_l), params.eig_tol, params.eig_max_iter);
    fp.psi.col(l) = pair.psi;
    fp.beta[l] = beta_l;
    fp.residual[l] = pair.residual;
  }
  return fp;
}

FeatureEmbedding feature_axis_embedding(const DataMatrix& X,
                                        const FeatureAxisParams& params) {
  validate_data_matrix(X.values);
  const int D = X.n_features();
  if (D < 2) throw ConfigError("feature-axis embedding needs at least 2 features");

  Eigen::MatrixXd Z = X.values.transpose();  // D x M, rows = feature vectors
  if (params.standardize) {
    for (int i = 0; i < D; ++i) {
      const double mean = Z.row(i).mean();
      Z.row(i).array() -= mean;
      const double var = Z.row(i).squaredNorm() / Z.cols();
      if (var > 0.0) Z.row(i) /= std::sqrt(var);
    }
  }

  const DataMatrix feat = DataMatrix::from(std::move(Z));
  int kf = params.k_feat > 0 ? params.k_feat : std::min(10, D - 1);
  kf = std::min(kf, D - 1);
  const int ks = std::min(params.k_scale, D - 1);
  const LocalScales sc = local_scales(feat, ks);
  const SimilarityGraph fg = build_knn_graph(feat, kf, sc, params.mutual);

  const NishimoriResult root = find_beta_n(fg, params.root);
  const EigenPair pair =
      smallest_eigenpair(assemble_bethe_hessian(fg, root.beta_n),
                         params.eig_tol, params.eig_max_iter);

  FeatureEmbedding emb;
  emb.phi = pair.psi;
  emb.beta_n = root.beta_n;
  emb.affinity_stats.d = D;
  emb.affinity_stats.n_edges = fg.n_edges();
  if (fg.n_edges() > 0) {
    double lo = fg.edges()[0].w, hi = lo, sum = 0.0;
    for (const Edge& e : fg.edges()) {
      lo = std::min(lo, e.w);
      hi = std::max(hi, e.w);
      sum += e.w;
    }
    emb.affinity_stats.min_weight = lo;
    emb.affinity_stats.max_weight = hi;
    emb.affinity_stats.mean_weight = sum / fg.n_edges();
  }
  return emb;
}

FeatureEmbedding feature_axis_embedding(const DataMatrix& X, int k_feat) {
  FeatureAxisParams p;
  p.k_feat = k_feat;
  return feature_axis_embedding(X, p);
}

void write_fingerprint_csv(std::ostream& out, const SpectralFingerprint& fp) {
  const Eigen::Index D = fp.psi.cols();
  for (Eigen::Index l = 0; l < D; ++l)
    out << (l ? "," : "") << 'f' << l;
  out << '\n';
  for (Eigen::Index i = 0; i < fp.psi.rows(); ++i) {
    for (Eigen::Index l = 0; l < D; ++l)
      out << (l ? "," : "") << fmt17(fp.psi(i, l));
    out << '\n';
  }
}

void write_phi_csv(std::ostream& out, const FeatureEmbedding& emb) {
  const Eigen::Index D = emb.phi.size();
  for (Eigen::Index l = 0; l < D; ++l)
    out << (l ? "," : "") << 'f' << l;
  out << '\n';
  for (Eigen::Index l = 0; l < D; ++l)
    out << (l ? "," : "") << fmt17(emb.phi[l]);
  out << '\n';
}

}  // namespace nbse
