#include "nbse/qc_ldpc.hpp"

#include <algorithm>
#include <set>

#include "nbse/rng.hpp"

namespace nbse {

void validate_protograph(const Protograph& proto) {
  const int c = proto.classes();
  if (c < 1) throw ConfigError("protograph base matrix is empty");
  if (proto.lift < 1) throw ConfigError("lift size must be at least 1");
  int total = 0;
  for (int r = 0; r < c; ++r) {
    if (static_cast<int>(proto.base[r].size()) != c)
      throw ConfigError("protograph base matrix must be square");
    for (int j = 0; j < c; ++j) {
      if (proto.base[r][j] < 0)
        throw ConfigError("base multiplicities must be nonnegative");
      if (proto.base[r][j] != proto.base[j][r])
        throw ConfigError("base matrix must be symmetric (class adjacency)");
      if (r <= j) total += proto.base[r][j];
    }
  }
  if (total == 0) throw ConfigError("protograph has no edges");
  for (int r = 0; r < c; ++r)
    for (int j = r; j < c; ++j)
      if (proto.base[r][j] > proto.lift)
        throw ConfigError("bundle multiplicity exceeds lift size");
}

namespace {

int count_bundles(const Protograph& proto) {
  int b = 0;
  for (int r = 0; r < proto.classes(); ++r)
    for (int j = r; j < proto.classes(); ++j)
      if (proto.base[r][j] > 0) ++b;
  return b;
}

}  // namespace

SimilarityGraph lift_protograph(const Protograph& proto,
                                const std::vector<std::vector<int>>& shifts,
                                LiftStats* stats) {
  validate_protograph(proto);
  if (static_cast<int>(shifts.size()) != count_bundles(proto))
    throw ConfigError("one shift vector required per nonzero bundle");

  const int c = proto.classes();
  const int L = proto.lift;
  LiftStats st;
  std::vector<Edge> edges;
  int bundle = 0, type_tag = 0;
  for (int r = 0; r < c; ++r) {
    for (int j = r; j < c; ++j) {
      const int mult = proto.base[r][j];
      if (mult == 0) continue;
      const auto& sv = shifts[bundle++];
      if (static_cast<int>(sv.size()) != mult)
        throw ConfigError("bundle (" + std::to_string(r) + "," +
                          std::to_string(j) + ") needs " + std::to_string(mult) +
                          " distinct shifts");
      if (std::set<int>(sv.begin(), sv.end()).size() != sv.size())
        throw ConfigError("shifts within a bundle must be distinct");
      LiftStats::BundleRecord rec;
      rec.r = r;
      rec.c = j;
      rec.shifts = sv;
      for (int s : sv) {
        if (s < 0 || s >= L) throw ConfigError("shift out of [0, L)");
        for (int v = 0; v < L; ++v) {
          const int a = r * L + v;
          const int b = j * L + (v + s) % L;
          ++rec.generated;
          if (a == b) {
            ++st.self_loops_dropped;
            continue;
          }
          edges.push_back({std::min(a, b), std::max(a, b), 1.0, type_tag});
        }
      }
      st.bundles.push_back(std::move(rec));
      ++type_tag;
    }
  }
  {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(edges.size());
    for (const auto& e : edges) pairs.emplace_back(e.u, e.v);
    std::sort(pairs.begin(), pairs.end());
    st.duplicates_collapsed = static_cast<int>(
        pairs.size() - (std::unique(pairs.begin(), pairs.end()) - pairs.begin()));
  }
  auto g = SimilarityGraph::from_edges(proto.n_nodes(), std::move(edges),
                                       /*with_types=*/true);
  st.girth_achieved = girth(g);
  if (stats) *stats = std::move(st);
  return g;
}

SimilarityGraph build_qc_backbone(const Protograph& proto, int girth_min,
                                  int max_retries, LiftStats* stats) {
  validate_protograph(proto);
  if (girth_min < 4) throw ConfigError("girth_min must be at least 4");
  if (max_retries < 1) throw ConfigError("max_retries must be at least 1");

  std::mt19937_64 gen(proto.seed);
  const int L = proto.lift;
  int best_girth = 0;
  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    std::vector<std::vector<int>> shifts;
    for (int r = 0; r < proto.classes(); ++r) {
      for (int j = r; j < proto.classes(); ++j) {
        const int mult = proto.base[r][j];
        if (mult == 0) continue;
        std::set<int> used;
        while (static_cast<int>(used.size()) < mult)
          used.insert(static_cast<int>(uniform_below(gen, L)));
        shifts.emplace_back(used.begin(), used.end());
      }
    }
    LiftStats st;
    auto g = lift_protograph(proto, shifts, &st);
    if (st.girth_achieved >= girth_min) {
      st.attempts = attempt;
      if (stats) *stats = std::move(st);
      return g;
    }
    best_girth = std::max(
        best_girth, st.girth_achieved == kGirthInfinite ? 0 : st.girth_achieved);
  }
  throw SolverError("girth target " + std::to_string(girth_min) + " not met in " +
                    std::to_string(max_retries) + " retries; best girth " +
                    std::to_string(best_girth));
}

}  // namespace nbse
