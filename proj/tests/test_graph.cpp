#include <doctest.h>

#include <Eigen/Dense>
#include <cfloat>
#include <cmath>
#include <set>
#include <sstream>

#include "nbse/graph.hpp"
#include "nbse/qc_ldpc.hpp"
#include "nbse/rng.hpp"
#include "nbse/synthetic.hpp"

using namespace nbse;

namespace {

DataMatrix column(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return DataMatrix::from(std::move(m));
}

SimilarityGraph triangle(double w01 = 1.0, double w02 = 2.0, double w12 = 3.0) {
  return SimilarityGraph::from_edges(3, {{0, 1, w01}, {0, 2, w02}, {1, 2, w12}});
}

SimilarityGraph cycle(int n, double w = 1.0) {
  std::vector<Edge> es;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    es.push_back({std::min(i, j), std::max(i, j), w});
  }
  return SimilarityGraph::from_edges(n, std::move(es));
}

}  // namespace

TEST_CASE("local scales: mean distance to the k nearest") {
  // 1-D points 0, 1, 3 with k = 2:
  //   sigma_0 = (1 + 3)/2 = 2, sigma_1 = (1 + 2)/2 = 1.5, sigma_2 = (2 + 3)/2.
  const DataMatrix X = column({0.0, 1.0, 3.0});
  const LocalScales sc = local_scales(X, 2);
  CHECK(sc.k == 2);
  CHECK(sc.sigma.size() == 3);
  CHECK(sc.sigma[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sc.sigma[1] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(sc.sigma[2] == doctest::Approx(2.5).epsilon(1e-15));

  CHECK_THROWS_AS(local_scales(X, 0), ConfigError);
  CHECK_THROWS_AS(local_scales(X, 3), ConfigError);  // k must be <= M-1
}

TEST_CASE("local scales: duplicated points clamp to the sigma floor") {
  const DataMatrix X = column({5.0, 5.0, 5.0});
  const LocalScales sc = local_scales(X, 2);
  for (int i = 0; i < 3; ++i) CHECK(sc.sigma[i] == kSigmaFloor);
}

TEST_CASE("adaptive gaussian kernel weight") {
  // d2 = sigma_i * sigma_j gives exactly exp(-1).
  CHECK(gaussian_weight(0.75, 0.5, 1.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  // d2 = 4 with sigma = (1, 2) gives exp(-2).
  CHECK(gaussian_weight(4.0, 1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(gaussian_weight(0.0, 1.0, 1.0) == 1.0);
  // monotone decreasing in distance
  CHECK(gaussian_weight(1.0, 1.0, 1.0) > gaussian_weight(2.0, 1.0, 1.0));
  // extreme distances underflow to the smallest positive normal, never to 0
  const double tiny = gaussian_weight(1e9, 1.0, 1.0);
  CHECK(tiny == DBL_MIN);
  CHECK(tiny > 0.0);

  CHECK_THROWS_AS(gaussian_weight(1.0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(gaussian_weight(1.0, 1.0, -2.0), ConfigError);
  CHECK_THROWS_AS(gaussian_weight(-1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("knn graph: union vs mutual symmetrization") {
  // 1-D points 0, 1, 2, 10 with k_graph = 1. Nearest neighbours:
  //   0 -> 1, 1 -> 0 (tie with 2 breaks to the lower index), 2 -> 1, 3 -> 2.
  const DataMatrix X = column({0.0, 1.0, 2.0, 10.0});
  const LocalScales sc = local_scales(X, 2);

  const SimilarityGraph un = build_knn_graph(X, 1, sc, /*mutual=*/false);
  REQUIRE(un.n_edges() == 3);
  CHECK(un.edges()[0].u == 0);
  CHECK(un.edges()[0].v == 1);
  CHECK(un.edges()[1].u == 1);
  CHECK(un.edges()[1].v == 2);
  CHECK(un.edges()[2].u == 2);
  CHECK(un.edges()[2].v == 3);

  const SimilarityGraph mu = build_knn_graph(X, 1, sc, /*mutual=*/true);
  REQUIRE(mu.n_edges() == 1);
  CHECK(mu.edges()[0].u == 0);
  CHECK(mu.edges()[0].v == 1);

  // edge weights come from the adaptive kernel on the same scales
  const double expect01 = gaussian_weight(1.0, sc.sigma[0], sc.sigma[1]);
  CHECK(un.edges()[0].w == doctest::Approx(expect01).epsilon(1e-15));
  CHECK(mu.edges()[0].w == un.edges()[0].w);
}

TEST_CASE("from_edges validates and canonicalizes") {
  CHECK_THROWS_AS(SimilarityGraph::from_edges(0, {}), ConfigError);
  CHECK_THROWS_AS(SimilarityGraph::from_edges(2, {{0, 0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(SimilarityGraph::from_edges(2, {{0, 2, 1.0}}), ConfigError);
  CHECK_THROWS_AS(SimilarityGraph::from_edges(2, {{-1, 1, 1.0}}), ConfigError);
  CHECK_THROWS_AS(SimilarityGraph::from_edges(2, {{0, 1, 0.0}}), ConfigError);
  CHECK_THROWS_AS(SimilarityGraph::from_edges(2, {{0, 1, std::nan("")}}),
                  ConfigError);
  CHECK_THROWS_AS(SimilarityGraph::from_edges(2, {{0, 1, HUGE_VAL}}), ConfigError);

  // duplicates (either orientation) collapse to the copy with the smallest
  // type tag, carrying that copy's weight; edges come out sorted with u < v
  const std::vector<Edge> dup = {
      {2, 1, 0.5, 7}, {0, 1, 0.25, 1}, {1, 2, 0.9, 3}, {1, 0, 0.8, 0}};
  const SimilarityGraph g =
      SimilarityGraph::from_edges(3, dup, /*with_types=*/true);
  REQUIRE(g.n_edges() == 2);
  CHECK(g.has_types());
  CHECK(g.edges()[0].u == 0);
  CHECK(g.edges()[0].v == 1);
  CHECK(g.edges()[0].w == 0.8);
  CHECK(g.edges()[0].type == 0);
  CHECK(g.edges()[1].u == 1);
  CHECK(g.edges()[1].v == 2);
  CHECK(g.edges()[1].w == 0.9);
  CHECK(g.edges()[1].type == 3);

  // the survivor must not depend on input order
  const std::vector<Edge> rev(dup.rbegin(), dup.rend());
  const SimilarityGraph g2 =
      SimilarityGraph::from_edges(3, rev, /*with_types=*/true);
  REQUIRE(g2.n_edges() == 2);
  for (int e = 0; e < 2; ++e) {
    CHECK(g2.edges()[e].w == g.edges()[e].w);
    CHECK(g2.edges()[e].type == g.edges()[e].type);
  }

  // negative weights are legal through this constructor (signed couplings)
  const SimilarityGraph s = SimilarityGraph::from_edges(2, {{0, 1, -1.5}});
  CHECK(s.edges()[0].w == -1.5);
}

TEST_CASE("csr adjacency view") {
  const SimilarityGraph g = triangle();
  for (int u = 0; u < 3; ++u) {
    CHECK(g.degree(u) == 2);
    const auto nb = g.neighbors(u);
    const auto nw = g.neighbor_weights(u);
    REQUIRE(nb.size() == 2);
    REQUIRE(nw.size() == 2);
    CHECK(nb[0] < nb[1]);  // rows are sorted by neighbour index
  }
  // weights line up with the edge list
  CHECK(g.neighbors(1)[0] == 0);
  CHECK(g.neighbor_weights(1)[0] == 1.0);
  CHECK(g.neighbors(1)[1] == 2);
  CHECK(g.neighbor_weights(1)[1] == 3.0);
}

TEST_CASE("summary statistics") {
  const SimilarityGraph g = triangle();
  CHECK(g.average_degree() == doctest::Approx(2.0));
  CHECK(g.connected_components() == 1);
  CHECK(g.max_weight() == 3.0);
  CHECK(g.median_weight() == 2.0);

  // two disjoint triangles
  const SimilarityGraph two = SimilarityGraph::from_edges(
      6, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0},
          {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}});
  CHECK(two.connected_components() == 2);

  // stats are magnitudes: signed couplings report |w|
  const SimilarityGraph s =
      SimilarityGraph::from_edges(3, {{0, 1, -4.0}, {1, 2, 1.0}});
  CHECK(s.max_weight() == 4.0);
  CHECK(s.median_weight() == doctest::Approx(2.5));  // mean of |{-4, 1}| mid pair
}

TEST_CASE("scaled copies the topology and multiplies weights") {
  const SimilarityGraph g = triangle();
  const SimilarityGraph h = g.scaled(0.5);
  REQUIRE(h.n_edges() == g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e) {
    CHECK(h.edges()[e].u == g.edges()[e].u);
    CHECK(h.edges()[e].v == g.edges()[e].v);
    CHECK(h.edges()[e].w == doctest::Approx(0.5 * g.edges()[e].w).epsilon(1e-15));
  }
  CHECK_THROWS_AS(g.scaled(0.0), ConfigError);
  CHECK_THROWS_AS(g.scaled(-1.0), ConfigError);
  CHECK_THROWS_AS(g.scaled(HUGE_VAL), ConfigError);
}

TEST_CASE("girth") {
  CHECK(girth(triangle()) == 3);
  CHECK(girth(cycle(5)) == 5);
  CHECK(girth(cycle(17)) == 17);
  // path = tree = no cycle
  const SimilarityGraph path =
      SimilarityGraph::from_edges(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  CHECK(girth(path) == kGirthInfinite);
  // square with a chord
  const SimilarityGraph chord = SimilarityGraph::from_edges(
      4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}, {0, 2, 1.0}});
  CHECK(girth(chord) == 3);
  // disjoint C3 and C5: shortest anywhere wins
  std::vector<Edge> es = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}};
  for (int i = 0; i < 5; ++i) {
    const int a = 3 + i, b = 3 + (i + 1) % 5;
    es.push_back({std::min(a, b), std::max(a, b), 1.0});
  }
  CHECK(girth(SimilarityGraph::from_edges(8, std::move(es))) == 3);
}

TEST_CASE("heat kernel diffusion") {
  // single edge of weight w: L = [[w, -w], [-w, w]], so
  // exp(-tL)(1, 0) = ((1 + e^{-2tw})/2, (1 - e^{-2tw})/2)
  const double w = 0.8, t = 0.7;
  const SimilarityGraph g = SimilarityGraph::from_edges(2, {{0, 1, w}});
  Eigen::VectorXd f(2);
  f << 1.0, 0.0;
  const Eigen::VectorXd out = heat_kernel_apply(g, t, f);
  CHECK(out[0] == doctest::Approx(0.5 * (1.0 + std::exp(-2 * t * w))).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.5 * (1.0 - std::exp(-2 * t * w))).epsilon(1e-12));

  // t = 0 is the identity
  const Eigen::VectorXd id = heat_kernel_apply(g, 0.0, f);
  CHECK((id - f).norm() < 1e-14);

  // diffusion conserves total mass (constant vector spans ker L)
  const SimilarityGraph tri = triangle();
  Eigen::VectorXd h(3);
  h << 2.0, -1.0, 0.5;
  const Eigen::VectorXd diff = heat_kernel_apply(tri, 1.3, h);
  CHECK(diff.sum() == doctest::Approx(h.sum()).epsilon(1e-12));

  CHECK_THROWS_AS(heat_kernel_apply(g, -1.0, f), ConfigError);
  Eigen::VectorXd bad(3);
  bad.setZero();
  CHECK_THROWS_AS(heat_kernel_apply(g, 1.0, bad), ConfigError);
  // the dense decomposition refuses large graphs
  CHECK_THROWS_AS(heat_kernel_apply(g, 1.0, f, /*dense_cap=*/1), RangeError);
}

TEST_CASE("graph text serialization round trips") {
  const SyntheticData sd = make_synthetic(
      {SyntheticKind::sbm_blobs, 30, 4, 2, 10, 4, 5.0, 0.25, 11});
  const LocalScales sc = local_scales(sd.data.X, 5);
  const SimilarityGraph g = build_knn_graph(sd.data.X, 4, sc);

  std::stringstream ss;
  write_graph(ss, g);
  const SimilarityGraph back = read_graph(ss);
  REQUIRE(back.n_nodes() == g.n_nodes());
  REQUIRE(back.n_edges() == g.n_edges());
  CHECK(back.has_types() == g.has_types());
  for (int e = 0; e < g.n_edges(); ++e) {
    CHECK(back.edges()[e].u == g.edges()[e].u);
    CHECK(back.edges()[e].v == g.edges()[e].v);
    // 17 significant digits round-trip doubles exactly
    CHECK(back.edges()[e].w == g.edges()[e].w);
  }

  // typed graphs carry the tag column
  const SimilarityGraph qc = build_qc_backbone({{{0, 2}, {2, 0}}, 7, 5}, 4, 50);
  std::stringstream ts;
  write_graph(ts, qc);
  const SimilarityGraph qback = read_graph(ts);
  REQUIRE(qback.has_types());
  for (int e = 0; e < qc.n_edges(); ++e)
    CHECK(qback.edges()[e].type == qc.edges()[e].type);
}

TEST_CASE("graph parse errors") {
  auto parse = [](const std::string& text) {
    std::stringstream ss(text);
    return read_graph(ss);
  };
  CHECK_THROWS_AS(parse("garbage header\n"), IoError);
  CHECK_THROWS_AS(parse("nbse-graph v2 2 1\n0 1 1.0\n"), IoError);
  CHECK_THROWS_AS(parse("nbse-graph v1 2 2\n0 1 1.0\n"), IoError);  // truncated
  CHECK_THROWS_AS(parse("nbse-graph v1 2 1\n0 one 1.0\n"), IoError);
  // syntactically fine but semantically invalid content fails validation
  CHECK_THROWS_AS(parse("nbse-graph v1 2 1\n1 1 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse("nbse-graph v1 2 1\n0 1 0.0\n"), ConfigError);
  CHECK_THROWS_AS(read_graph_file("/nonexistent/g.txt"), IoError);
}

TEST_CASE("weight_graph_on_backbone keeps topology, recomputes weights") {
  const Protograph proto{{{0, 2}, {2, 0}}, 10, 3};
  const SimilarityGraph backbone = build_qc_backbone(proto, 4, 50);

  const SyntheticData sd = make_synthetic(
      {SyntheticKind::sbm_blobs, proto.n_nodes(), 3, 2, 10, 4, 4.0, 0.25, 5});
  const LocalScales sc = local_scales(sd.data.X, 5);
  const SimilarityGraph rw = weight_graph_on_backbone(sd.data.X, backbone, sc);

  REQUIRE(rw.n_edges() == backbone.n_edges());
  CHECK(rw.has_types() == backbone.has_types());
  for (int e = 0; e < rw.n_edges(); ++e) {
    const Edge& a = rw.edges()[e];
    const Edge& b = backbone.edges()[e];
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
    CHECK(a.type == b.type);
    const double d2 =
        (sd.data.X.values.row(a.u) - sd.data.X.values.row(a.v)).squaredNorm();
    CHECK(a.w == doctest::Approx(gaussian_weight(d2, sc.sigma[a.u], sc.sigma[a.v]))
                     .epsilon(1e-14));
  }

  const SyntheticData small = make_synthetic(
      {SyntheticKind::sbm_blobs, 7, 3, 2, 10, 4, 4.0, 0.25, 5});
  const LocalScales scs = local_scales(small.data.X, 3);
  CHECK_THROWS_AS(weight_graph_on_backbone(small.data.X, backbone, scs),
                  ConfigError);
}

TEST_CASE("protograph validation") {
  CHECK_THROWS_AS(validate_protograph({{{1, 1}}, 4, 0}), ConfigError);  // ragged
  CHECK_THROWS_AS(validate_protograph({{{0, 1}, {2, 0}}, 4, 0}),
                  ConfigError);  // asymmetric
  CHECK_THROWS_AS(validate_protograph({{{0, -1}, {-1, 0}}, 4, 0}),
                  ConfigError);  // negative multiplicity
  CHECK_THROWS_AS(validate_protograph({{{0, 0}, {0, 0}}, 4, 0}),
                  ConfigError);  // no edges at all
  CHECK_THROWS_AS(validate_protograph({{{1}}, 0, 0}), ConfigError);  // lift < 1
  CHECK_NOTHROW(validate_protograph({{{0, 2}, {2, 0}}, 4, 0}));

  const Protograph p{{{0, 2}, {2, 0}}, 25, 0};
  CHECK(p.classes() == 2);
  CHECK(p.n_nodes() == 50);
}

TEST_CASE("explicit circulant lifts: hand examples") {
  SUBCASE("single shift-1 bundle on [[1]] is an L-cycle") {
    LiftStats st;
    const SimilarityGraph g = lift_protograph({{{1}}, 5, 0}, {{1}}, &st);
    CHECK(g.n_nodes() == 5);
    CHECK(g.n_edges() == 5);
    CHECK(girth(g) == 5);
    for (int u = 0; u < 5; ++u) CHECK(g.degree(u) == 2);
    for (const Edge& e : g.edges()) CHECK(e.w == 1.0);
    CHECK(st.self_loops_dropped == 0);
    CHECK(st.duplicates_collapsed == 0);
    CHECK(st.girth_achieved == 5);
  }

  SUBCASE("shift 0 on a diagonal bundle lands on self loops") {
    LiftStats st;
    const SimilarityGraph g = lift_protograph({{{2}}, 4, 0}, {{0, 1}}, &st);
    CHECK(g.n_nodes() == 4);
    CHECK(g.n_edges() == 4);  // the shift-1 circulant survives as a 4-cycle
    CHECK(girth(g) == 4);
    CHECK(st.self_loops_dropped == 4);
  }

  SUBCASE("shifts s and L-s generate the same undirected circulant") {
    LiftStats st;
    const SimilarityGraph g = lift_protograph({{{2}}, 4, 0}, {{1, 3}}, &st);
    CHECK(g.n_edges() == 4);
    CHECK(st.duplicates_collapsed == 4);
    CHECK(girth(g) == 4);
  }

  SUBCASE("two off-diagonal matchings close into a 2L-cycle") {
    LiftStats st;
    const SimilarityGraph g =
        lift_protograph({{{0, 2}, {2, 0}}, 3, 0}, {{0, 1}}, &st);
    CHECK(g.n_nodes() == 6);
    CHECK(g.n_edges() == 6);
    CHECK(girth(g) == 6);
    CHECK(st.self_loops_dropped == 0);  // shift 0 off-diagonal is a matching
    // bipartite between the class index ranges [0,3) and [3,6)
    for (const Edge& e : g.edges()) {
      CHECK(e.u < 3);
      CHECK(e.v >= 3);
    }
  }

  SUBCASE("a single off-diagonal matching is a forest") {
    const SimilarityGraph g = lift_protograph({{{0, 1}, {1, 0}}, 3, 0}, {{1}});
    CHECK(g.n_edges() == 3);
    CHECK(girth(g) == kGirthInfinite);
  }
}

TEST_CASE("qc backbone: girth retries, determinism, accounting") {
  const Protograph proto{{{0, 2}, {2, 0}}, 25, 42};
  LiftStats st;
  const SimilarityGraph g = build_qc_backbone(proto, 6, 50, &st);
  CHECK(g.n_nodes() == 50);
  CHECK(girth(g) >= 6);
  CHECK(st.girth_achieved == girth(g));
  CHECK(st.attempts >= 1);
  CHECK(g.has_types());

  // the base matrix has no diagonal bundles, so classes stay bipartite
  for (const Edge& e : g.edges()) {
    CHECK(e.u < 25);
    CHECK(e.v >= 25);
  }

  // raw pair accounting closes: generated - dropped - collapsed = edges
  int generated = 0;
  for (const auto& b : st.bundles) generated += b.generated;
  CHECK(generated - st.self_loops_dropped - st.duplicates_collapsed ==
        g.n_edges());

  // same seed, same graph; another seed, another shift assignment
  const SimilarityGraph again = build_qc_backbone(proto, 6, 50);
  REQUIRE(again.n_edges() == g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e) {
    CHECK(again.edges()[e].u == g.edges()[e].u);
    CHECK(again.edges()[e].v == g.edges()[e].v);
  }
  LiftStats st2;
  const Protograph other{{{0, 2}, {2, 0}}, 25, 43};
  build_qc_backbone(other, 6, 50, &st2);
  bool any_shift_differs = false;
  for (size_t b = 0; b < st.bundles.size(); ++b)
    if (st.bundles[b].shifts != st2.bundles[b].shifts) any_shift_differs = true;
  CHECK(any_shift_differs);

  // an impossible girth target names the best it saw
  CHECK_THROWS_AS(build_qc_backbone({{{2, 2}, {2, 2}}, 3, 1}, 12, 3),
                  SolverError);
}
