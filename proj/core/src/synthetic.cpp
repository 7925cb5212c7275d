#include "nbse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "nbse/rng.hpp"

namespace nbse {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void common_checks(const SyntheticSpec& spec) {
  if (spec.m < 2) throw ConfigError("need at least 2 objects");
  if (spec.d < 1) throw ConfigError("need at least 1 feature");
  if (spec.classes < 1 || spec.classes > spec.m)
    throw ConfigError("class count must lie in [1, m]");
  if (!(spec.separation >= 0.0) || !(spec.noise >= 0.0))
    throw ConfigError("separation and noise must be nonnegative");
}

SyntheticData make_blobs(const SyntheticSpec& spec) {
  std::mt19937_64 gen(mix_seed(spec.seed, 0x73626d));
  GaussianDraw gauss;

  // Cluster centres: separation * random unit directions.
  Eigen::MatrixXd centres(spec.classes, spec.d);
  for (int c = 0; c < spec.classes; ++c) {
    for (int l = 0; l < spec.d; ++l) centres(c, l) = gauss(gen);
    const double norm = centres.row(c).norm();
    if (norm > 0.0) centres.row(c) *= spec.separation / norm;
  }

  SyntheticData out;
  out.spec = spec;
  out.data.n_classes = spec.classes;
  out.data.y.resize(spec.m);
  Eigen::MatrixXd x(spec.m, spec.d);
  for (int i = 0; i < spec.m; ++i) {
    out.data.y[i] = i % spec.classes;
    for (int l = 0; l < spec.d; ++l)
      x(i, l) = centres(out.data.y[i], l) + gauss(gen);
  }
  out.data.X = DataMatrix::from(std::move(x));
  return out;
}

SyntheticData make_redundant(const SyntheticSpec& spec) {
  if (spec.groups < 1 || spec.copies < 1)
    throw ConfigError("groups and copies must be at least 1");
  if (spec.d < spec.groups * spec.copies)
    throw ConfigError("d must be at least groups * copies");

  std::mt19937_64 gen(mix_seed(spec.seed, 0x726772));
  GaussianDraw gauss;

  SyntheticData out;
  out.spec = spec;
  out.data.n_classes = spec.classes;
  out.data.y.resize(spec.m);
  for (int i = 0; i < spec.m; ++i) out.data.y[i] = i % spec.classes;

  Eigen::MatrixXd x(spec.m, spec.d);
  out.feature_group.assign(spec.d, -1);
  int col = 0;
  for (int t = 0; t < spec.groups; ++t) {
    Eigen::VectorXd mu(spec.classes);
    for (int c = 0; c < spec.classes; ++c)
      mu[c] = spec.separation * gauss(gen);
    Eigen::VectorXd proto(spec.m);
    for (int i = 0; i < spec.m; ++i)
      proto[i] = mu[out.data.y[i]] + gauss(gen);
    for (int j = 0; j < spec.copies; ++j, ++col) {
      out.feature_group[col] = t;
      for (int i = 0; i < spec.m; ++i)
        x(i, col) = proto[i] + spec.noise * gauss(gen);
    }
  }
  for (; col < spec.d; ++col)
    for (int i = 0; i < spec.m; ++i) x(i, col) = gauss(gen);

  out.data.X = DataMatrix::from(std::move(x));
  return out;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  common_checks(spec);
  return spec.kind == SyntheticKind::sbm_blobs ? make_blobs(spec)
                                               : make_redundant(spec);
}

int groups_covered(const SyntheticData& synth,
                   const std::vector<int>& selected) {
  std::set<int> seen;
  for (int l : selected) {
    if (l < 0 || l >= static_cast<int>(synth.feature_group.size())) continue;
    if (synth.feature_group[l] >= 0) seen.insert(synth.feature_group[l]);
  }
  return static_cast<int>(seen.size());
}

PlantedPartition make_planted_partition(const Protograph& proto,
                                        double coupling, double flip_prob,
                                        int girth_min, int max_retries) {
  if (!(coupling > 0.0)) throw ConfigError("coupling must be positive");
  if (!(flip_prob >= 0.0 && flip_prob < 0.5))
    throw ConfigError("flip probability must lie in [0, 0.5)");

  PlantedPartition out;
  const SimilarityGraph backbone =
      build_qc_backbone(proto, girth_min, max_retries);

  out.y.resize(backbone.n_nodes());
  for (int i = 0; i < backbone.n_nodes(); ++i) out.y[i] = i / proto.lift;

  // Couplings see only the planted spins s_i = 2*(y_i mod 2) - 1; sign
  // noise is drawn per edge in the sorted edge order, seeded off the
  // topology seed so different lifts decorrelate.
  std::mt19937_64 gen(mix_seed(proto.seed, 0x706c616e74ull));
  std::vector<Edge> edges;
  edges.reserve(backbone.n_edges());
  for (const Edge& e : backbone.edges()) {
    const int su = 2 * (out.y[e.u] % 2) - 1;
    const int sv = 2 * (out.y[e.v] % 2) - 1;
    const double flip = uniform_unit(gen) < flip_prob ? -1.0 : 1.0;
    edges.push_back({e.u, e.v, coupling * su * sv * flip, e.type});
  }
  out.graph =
      SimilarityGraph::from_edges(backbone.n_nodes(), std::move(edges),
                                  backbone.has_types());
  out.beta_star = std::atanh(1.0 - 2.0 * flip_prob) / coupling;  // inf at 0
  return out;
}

void write_planted(std::ostream& out, const SyntheticData& synth) {
  const SyntheticSpec& s = synth.spec;
  out << "nbse-planted v1\n";
  out << "kind "
      << (s.kind == SyntheticKind::sbm_blobs ? "sbm_blobs"
                                             : "redundant_groups")
      << '\n';
  out << "m " << s.m << '\n';
  out << "d " << s.d << '\n';
  out << "classes " << s.classes << '\n';
  out << "seed " << s.seed << '\n';
  out << "separation " << fmt17(s.separation) << '\n';
  if (s.kind == SyntheticKind::redundant_groups) {
    out << "groups " << s.groups << '\n';
    out << "copies " << s.copies << '\n';
    out << "noise " << fmt17(s.noise) << '\n';
    out << "feature_groups";
    for (int g : synth.feature_group) out << ' ' << g;
    out << '\n';
  }
}

}  // namespace nbse
