#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nbse/data_matrix.hpp"
#include "nbse/errors.hpp"

namespace nbse {

/// Per-object kernel scales: sigma_i = mean distance to the k nearest
/// other objects, clamped below by sigma_floor.
struct LocalScales {
  Eigen::VectorXd sigma;
  int k = 0;
};

/// Duplicated points would otherwise give zero scales and the kernel
/// divides by sigma_i*sigma_j.
inline constexpr double kSigmaFloor = 1e-12;

/// Undirected weighted edge, canonical orientation u < v.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;
  int type = 0;
};

/// Immutable undirected weighted graph. Edges are stored once with u < v,
/// sorted lexicographically; a CSR view over both orientations backs
/// neighbor traversal. Weights must be finite and nonzero; the kernel
/// builders below always produce weights in (0, 1], while signed couplings
/// (planted Ising testbeds) are allowed through this constructor.
class SimilarityGraph {
 public:
  /// Validates (no self loops, indices in range, finite nonzero weights),
  /// sorts and collapses duplicate (u,v) pairs; the survivor is the copy
  /// with the smallest type tag (smallest weight on type ties), so the
  /// result never depends on input order.
  static SimilarityGraph from_edges(int n_nodes, std::vector<Edge> edges,
                                    bool with_types = false);

  int n_nodes() const { return n_nodes_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  bool has_types() const { return has_types_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const int> neighbors(int u) const;
  std::span<const double> neighbor_weights(int u) const;
  int degree(int u) const;

  double average_degree() const;
  int connected_components() const;
  /// Largest and median |w|; the magnitudes are what bound sinh arguments.
  double max_weight() const;
  double median_weight() const;

  /// Same topology with every weight multiplied by c > 0.
  SimilarityGraph scaled(double c) const;

 private:
  int n_nodes_ = 0;
  bool has_types_ = false;
  std::vector<Edge> edges_;
  // CSR over both edge orientations
  std::vector<int> offsets_;
  std::vector<int> adj_;
  std::vector<double> adj_w_;
};

/// Graph-construction parameters shared by the pipeline stages.
struct GraphParams {
  int k_scale = 10;    // neighbors for local scales
  int k_graph = 9;     // neighbors for the edge set
  bool mutual = false; // union symmetrization by default
};

/// Eq.-style adaptive Gaussian kernel weight exp(-d2/(sigma_i*sigma_j)).
/// Underflow is clamped to the smallest positive normal so stored weights
/// stay in (0, 1].
double gaussian_weight(double d2, double sigma_i, double sigma_j);

/// Mean Euclidean distance from each row to its k nearest other rows.
/// Ties in distance break toward the lower node index.
LocalScales local_scales(const DataMatrix& X, int k);

/// Same as local_scales but on a caller-supplied squared-distance functor;
/// used for univariate slices and transposed (feature-space) data.
LocalScales local_scales_from_d2(
    int n, int k, const std::function<double(int, int)>& d2);

/// k-NN graph with adaptive Gaussian weights. `mutual` = keep an edge only
/// if both endpoints list each other; otherwise union. Disconnection is not
/// an error; check connected_components() on the result.
SimilarityGraph build_knn_graph(const DataMatrix& X, int k_graph,
                                const LocalScales& scales, bool mutual = false);

/// k-NN graph over a generic squared-distance functor on n items.
SimilarityGraph build_knn_graph_from_d2(
    int n, int k_graph, const std::function<double(int, int)>& d2,
    const LocalScales& scales, bool mutual = false);

/// Re-weights an existing edge set with the adaptive kernel evaluated on
/// rows of X. Topology (and type tags) are preserved.
SimilarityGraph weight_graph_on_backbone(const DataMatrix& X,
                                         const SimilarityGraph& backbone,
                                         const LocalScales& scales);

inline constexpr int kGirthInfinite = std::numeric_limits<int>::max();

/// Length of the shortest cycle (per-node BFS); kGirthInfinite for forests.
int girth(const SimilarityGraph& g);

/// Applies the heat kernel exp(-t L) of the combinatorial Laplacian
/// L = D_g - W to f via dense eigendecomposition. Diagnostic use only:
/// throws RangeError above `dense_cap` nodes.
Eigen::VectorXd heat_kernel_apply(const SimilarityGraph& g, double t,
                                  const Eigen::VectorXd& f,
                                  int dense_cap = 512);

/// Text edge-list serialization, header "nbse-graph v1 <n_nodes> <n_edges>",
/// rows "i j weight [type]" at 17 significant digits.
void write_graph(std::ostream& out, const SimilarityGraph& g);
SimilarityGraph read_graph(std::istream& in);
void write_graph_file(const std::string& path, const SimilarityGraph& g);
SimilarityGraph read_graph_file(const std::string& path);

}  // namespace nbse
