#include "nbse/graph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

namespace nbse {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SimilarityGraph SimilarityGraph::from_edges(int n_nodes, std::vector<Edge> edges,
                                            bool with_types) {
  if (n_nodes < 1) throw ConfigError("graph needs at least one node");
  for (auto& e : edges) {
    if (e.u == e.v) throw ConfigError("self loop at node " + std::to_string(e.u));
    if (e.u < 0 || e.v < 0 || e.u >= n_nodes || e.v >= n_nodes)
      throw ConfigError("edge endpoint out of range");
    if (!std::isfinite(e.w) || e.w == 0.0)
      throw ConfigError("edge weight must be finite and nonzero");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    if (a.type != b.type) return a.type < b.type;
    return a.w < b.w;  // total order: collapse must not depend on input order
  });
  // collapse duplicates: first occurrence wins (smallest type, then smallest
  // weight, after the sort above)
  std::vector<Edge> unique;
  unique.reserve(edges.size());
  for (const auto& e : edges) {
    if (!unique.empty() && unique.back().u == e.u && unique.back().v == e.v)
      continue;
    unique.push_back(e);
  }

  SimilarityGraph g;
  g.n_nodes_ = n_nodes;
  g.has_types_ = with_types;
  g.edges_ = std::move(unique);

  std::vector<int> deg(n_nodes, 0);
  for (const auto& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(n_nodes + 1, 0);
  for (int i = 0; i < n_nodes; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.adj_.resize(g.offsets_[n_nodes]);
  g.adj_w_.resize(g.offsets_[n_nodes]);
  std::vector<int> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adj_[cursor[e.u]] = e.v;
    g.adj_w_[cursor[e.u]++] = e.w;
    g.adj_[cursor[e.v]] = e.u;
    g.adj_w_[cursor[e.v]++] = e.w;
  }
  // sort each adjacency row by neighbor index
  for (int i = 0; i < n_nodes; ++i) {
    const int lo = g.offsets_[i], hi = g.offsets_[i + 1];
    std::vector<std::pair<int, double>> row;
    row.reserve(hi - lo);
    for (int p = lo; p < hi; ++p) row.emplace_back(g.adj_[p], g.adj_w_[p]);
    std::sort(row.begin(), row.end());
    for (int p = lo; p < hi; ++p) {
      g.adj_[p] = row[p - lo].first;
      g.adj_w_[p] = row[p - lo].second;
    }
  }
  return g;
}

std::span<const int> SimilarityGraph::neighbors(int u) const {
  return {adj_.data() + offsets_[u],
          static_cast<size_t>(offsets_[u + 1] - offsets_[u])};
}

std::span<const double> SimilarityGraph::neighbor_weights(int u) const {
  return {adj_w_.data() + offsets_[u],
          static_cast<size_t>(offsets_[u + 1] - offsets_[u])};
}

int SimilarityGraph::degree(int u) const { return offsets_[u + 1] - offsets_[u]; }

double SimilarityGraph::average_degree() const {
  return n_nodes_ == 0 ? 0.0 : 2.0 * n_edges() / n_nodes_;
}

int SimilarityGraph::connected_components() const {
  std::vector<int> comp(n_nodes_, -1);
  int n_comp = 0;
  std::vector<int> stack;
  for (int s = 0; s < n_nodes_; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = n_comp;
    stack.push_back(s);
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y : neighbors(x)) {
        if (comp[y] < 0) {
          comp[y] = n_comp;
          stack.push_back(y);
        }
      }
    }
    ++n_comp;
  }
  return n_comp;
}

double SimilarityGraph::max_weight() const {
  double m = 0.0;
  for (const auto& e : edges_) m = std::max(m, std::fabs(e.w));
  return m;
}

double SimilarityGraph::median_weight() const {
  if (edges_.empty()) return 0.0;
  std::vector<double> w;
  w.reserve(edges_.size());
  for (const auto& e : edges_) w.push_back(std::fabs(e.w));
  std::sort(w.begin(), w.end());
  const size_t n = w.size();
  return n % 2 == 1 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
}

SimilarityGraph SimilarityGraph::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c))
    throw ConfigError("scale factor must be finite and positive");
  std::vector<Edge> edges = edges_;
  for (auto& e : edges) e.w *= c;
  return from_edges(n_nodes_, std::move(edges), has_types_);
}

double gaussian_weight(double d2, double sigma_i, double sigma_j) {
  if (!(sigma_i > 0.0) || !(sigma_j > 0.0))
    throw ConfigError("kernel scales must be positive");
  if (!(d2 >= 0.0)) throw ConfigError("squared distance must be nonnegative");
  const double w = std::exp(-d2 / (sigma_i * sigma_j));
  // exp can underflow to 0 for far pairs; clamp to stay inside (0, 1]
  return std::max(w, std::numeric_limits<double>::min());
}

namespace {

// indices of the k nearest others of i, ties toward the lower index;
// returns pairs (d2, j) sorted ascending
std::vector<std::pair<double, int>> k_nearest(
    int n, int i, int k, const std::function<double(int, int)>& d2) {
  std::vector<std::pair<double, int>> all;
  all.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const double d = d2(i, j);
    if (!std::isfinite(d)) throw ConfigError("non-finite distance encountered");
    all.emplace_back(d, j);
  }
  const int kk = std::min<int>(k, static_cast<int>(all.size()));
  std::partial_sort(all.begin(), all.begin() + kk, all.end());
  all.resize(kk);
  return all;
}

}  // namespace

LocalScales local_scales_from_d2(int n, int k,
                                 const std::function<double(int, int)>& d2) {
  if (k < 1 || k > n - 1)
    throw ConfigError("k must lie in [1, M-1], got " + std::to_string(k));
  Eigen::VectorXd sigma(n);
  for (int i = 0; i < n; ++i) {
    const auto nn = k_nearest(n, i, k, d2);
    double s = 0.0;
    for (const auto& [dd, j] : nn) s += std::sqrt(dd);
    sigma[i] = std::max(s / k, kSigmaFloor);
  }
  return LocalScales{std::move(sigma), k};
}

LocalScales local_scales(const DataMatrix& X, int k) {
  validate_data_matrix(X.values);
  const auto& V = X.values;
  return local_scales_from_d2(
      static_cast<int>(V.rows()), k,
      [&V](int i, int j) { return (V.row(i) - V.row(j)).squaredNorm(); });
}

SimilarityGraph build_knn_graph_from_d2(
    int n, int k_graph, const std::function<double(int, int)>& d2,
    const LocalScales& scales, bool mutual) {
  if (k_graph < 1) throw ConfigError("k_graph must be at least 1");
  if (scales.sigma.size() != n)
    throw ConfigError("scales length does not match node count");

  std::vector<std::vector<int>> lists(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& [dd, j] : k_nearest(n, i, k_graph, d2))
      lists[i].push_back(j);
  }
  auto listed = [&](int i, int j) {
    return std::find(lists[i].begin(), lists[i].end(), j) != lists[i].end();
  };

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j : lists[i]) {
      if (j < i && listed(j, i)) continue;  // already emitted from j's side
      const bool keep = mutual ? (listed(i, j) && listed(j, i))
                               : true;  // union: either side suffices
      if (!keep) continue;
      const int u = std::min(i, j), v = std::max(i, j);
      edges.push_back(
          {u, v, gaussian_weight(d2(u, v), scales.sigma[u], scales.sigma[v]), 0});
    }
  }
  return SimilarityGraph::from_edges(n, std::move(edges));
}

SimilarityGraph build_knn_graph(const DataMatrix& X, int k_graph,
                                const LocalScales& scales, bool mutual) {
  const auto& V = X.values;
  return build_knn_graph_from_d2(
      static_cast<int>(V.rows()), k_graph,
      [&V](int i, int j) { return (V.row(i) - V.row(j)).squaredNorm(); }, scales,
      mutual);
}

SimilarityGraph weight_graph_on_backbone(const DataMatrix& X,
                                         const SimilarityGraph& backbone,
                                         const LocalScales& scales) {
  const auto& V = X.values;
  if (backbone.n_nodes() != V.rows())
    throw ConfigError("backbone node count does not match data rows");
  if (scales.sigma.size() != V.rows())
    throw ConfigError("scales length does not match data rows");
  std::vector<Edge> edges = backbone.edges();
  for (auto& e : edges) {
    const double d2 = (V.row(e.u) - V.row(e.v)).squaredNorm();
    e.w = gaussian_weight(d2, scales.sigma[e.u], scales.sigma[e.v]);
  }
  return SimilarityGraph::from_edges(backbone.n_nodes(), std::move(edges),
                                     backbone.has_types());
}

int girth(const SimilarityGraph& g) {
  const int n = g.n_nodes();
  int best = kGirthInfinite;
  std::vector<int> dist(n), parent(n);
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    dist[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int x = q.front();
      q.pop();
      if (best != kGirthInfinite && 2 * dist[x] >= best) continue;
      for (int y : g.neighbors(x)) {
        if (y == parent[x]) continue;
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          parent[y] = x;
          q.push(y);
        } else {
          best = std::min(best, dist[x] + dist[y] + 1);
        }
      }
    }
  }
  return best;
}

Eigen::VectorXd heat_kernel_apply(const SimilarityGraph& g, double t,
                                  const Eigen::VectorXd& f, int dense_cap) {
  if (!(t >= 0.0)) throw ConfigError("diffusion time must be nonnegative");
  const int n = g.n_nodes();
  if (n > dense_cap)
    throw RangeError("heat kernel is a dense diagnostic, node count " +
                     std::to_string(n) + " exceeds cap " +
                     std::to_string(dense_cap));
  if (f.size() != n) throw ConfigError("signal length does not match node count");

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    L(e.u, e.v) -= e.w;
    L(e.v, e.u) -= e.w;
    L(e.u, e.u) += e.w;
    L(e.v, e.v) += e.w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  const Eigen::VectorXd decay = (-t * es.eigenvalues().array()).exp();
  return es.eigenvectors() *
         (decay.array() * (es.eigenvectors().transpose() * f).array()).matrix();
}

void write_graph(std::ostream& out, const SimilarityGraph& g) {
  out << "nbse-graph v1 " << g.n_nodes() << ' ' << g.n_edges() << '\n';
  for (const auto& e : g.edges()) {
    out << e.u << ' ' << e.v << ' ' << fmt17(e.w);
    if (g.has_types()) out << ' ' << e.type;
    out << '\n';
  }
}

SimilarityGraph read_graph(std::istream& in) {
  std::string tag, version;
  int n = 0, m = 0;
  if (!(in >> tag >> version >> n >> m) || tag != "nbse-graph" || version != "v1")
    throw IoError("bad graph header, expected 'nbse-graph v1 <n> <m>'");
  std::string line;
  std::getline(in, line);  // rest of header line
  std::vector<Edge> edges;
  edges.reserve(m);
  bool with_types = false;
  for (int r = 0; r < m; ++r) {
    if (!std::getline(in, line))
      throw IoError("graph file truncated at edge " + std::to_string(r));
    std::istringstream ls(line);
    Edge e;
    if (!(ls >> e.u >> e.v >> e.w))
      throw IoError("bad edge line: '" + line + "'");
    if (ls >> e.type) with_types = true;
    edges.push_back(e);
  }
  return SimilarityGraph::from_edges(n, std::move(edges), with_types);
}

void write_graph_file(const std::string& path, const SimilarityGraph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_graph(out, g);
  if (!out) throw IoError("write failed: " + path);
}

SimilarityGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  return read_graph(in);
}

}  // namespace nbse
