#pragma once

#include <cstdint>
#include <vector>

#include "nbse/graph.hpp"

namespace nbse {

/// Block-circulant lift description. The base matrix is the class-adjacency
/// multigraph of the protograph: square and symmetric, entry (r, j) counts
/// circulant bundles between node classes r and j (diagonal = self-class
/// bundles). A lift of size L yields M = classes * L nodes; class j owns the
/// contiguous index range [j*L, (j+1)*L).
struct Protograph {
  std::vector<std::vector<int>> base;  // multiplicities, square symmetric
  int lift = 0;                        // L
  std::uint64_t seed = 0;

  int classes() const { return static_cast<int>(base.size()); }
  int n_nodes() const { return classes() * lift; }
};

/// Shift assignment actually used plus raw lift accounting, kept so the
/// projected multigraph can be checked against the base matrix before
/// self-loop drops and duplicate collapse.
struct LiftStats {
  struct BundleRecord {
    int r = 0, c = 0;          // base edge (r <= c)
    std::vector<int> shifts;   // one distinct shift per multiplicity unit
    int generated = 0;         // raw undirected pairs emitted by the bundle
  };
  std::vector<BundleRecord> bundles;
  int self_loops_dropped = 0;
  int duplicates_collapsed = 0;
  int girth_achieved = 0;      // of the returned graph
  int attempts = 0;
};

/// Builds the circulant lift with unit weights and per-edge type tags from
/// base-edge identity, resampling the full shift assignment until the BFS
/// girth reaches girth_min. Deterministic per Protograph::seed. Throws
/// SolverError naming the best girth achieved when retries run out.
SimilarityGraph build_qc_backbone(const Protograph& proto, int girth_min,
                                  int max_retries, LiftStats* stats = nullptr);

/// Single lift with an explicit shift assignment, one vector of distinct
/// shifts per nonzero bundle in (r <= c) row-major scan order. Self-loops
/// (shift 0 on a diagonal bundle) are dropped and coinciding circulants
/// collapse; both are accounted in LiftStats.
SimilarityGraph lift_protograph(const Protograph& proto,
                                const std::vector<std::vector<int>>& shifts,
                                LiftStats* stats = nullptr);

/// Validates a base matrix (square, symmetric, nonnegative, some edge).
void validate_protograph(const Protograph& proto);

}  // namespace nbse
