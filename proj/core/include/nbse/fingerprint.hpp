#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "nbse/data_matrix.hpp"
#include "nbse/errors.hpp"
#include "nbse/graph.hpp"
#include "nbse/nishimori.hpp"

namespace nbse {

enum class FingerprintMode { global, per_feature };

/// Column l is psi_min of the univariate graph on feature l. In global mode
/// every column shares the object-graph root; in per_feature mode each
/// column uses its own root and slices without a transition are flagged and
/// left as zero columns.
struct SpectralFingerprint {
  Eigen::MatrixXd psi;        // M x D, unit columns, canonical sign
  Eigen::VectorXd beta;       // beta used per column (0 for flagged slices)
  Eigen::VectorXd residual;   // eigensolver residual per column
  std::vector<bool> flagged;  // per_feature slices with no bracket
  FingerprintMode mode = FingerprintMode::global;
};

/// Edge-weight summary of the sparse feature-affinity graph.
struct AffinityStats {
  int d = 0;  // number of features
  int n_edges = 0;
  double min_weight = 0.0;
  double max_weight = 0.0;
  double mean_weight = 0.0;
};

struct FeatureEmbedding {
  Eigen::VectorXd phi;  // length D, unit norm, canonical sign
  double beta_n = 0.0;
  AffinityStats affinity_stats;
};

struct FingerprintParams {
  GraphParams graph;
  RootOptions root;
  double eig_tol = 1e-10;
  int eig_max_iter = 500;
};

struct FeatureAxisParams {
  int k_feat = 0;    // <= 0 means min(10, D-1); always clamped to D-1
  int k_scale = 10;  // clamped to D-1
  bool mutual = false;
  bool standardize = true;  // zero mean, unit variance per feature
  RootOptions root;
  double eig_tol = 1e-10;
  int eig_max_iter = 500;
};

/// Graph on the M objects using |x_il - x_jl| distances only, with adaptive
/// scales computed from the same one-dimensional slice.
SimilarityGraph univariate_graph(const DataMatrix& X, int l,
                                 const GraphParams& gp = {});

SpectralFingerprint fingerprint(const DataMatrix& X, FingerprintMode mode,
                                const FingerprintParams& params = {});

/// Treats the D features as objects in R^M (rows of X^T, standardized by
/// default), builds their sparse k-NN affinity graph, finds its Nishimori
/// root, and returns the smallest eigenvector phi_min of H(beta_N).
FeatureEmbedding feature_axis_embedding(const DataMatrix& X,
                                        const FeatureAxisParams& params = {});
FeatureEmbedding feature_axis_embedding(const DataMatrix& X, int k_feat);

/// CSV with a header row of feature indices f0..f{D-1}.
void write_fingerprint_csv(std::ostream& out, const SpectralFingerprint& fp);
void write_phi_csv(std::ostream& out, const FeatureEmbedding& emb);

}  // namespace nbse
