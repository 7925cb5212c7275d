#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "nbse/data_matrix.hpp"
#include "nbse/errors.hpp"
#include "nbse/fingerprint.hpp"

namespace nbse {

/// A bin whose quota could not be met from its own unused members borrowed
/// the nearest unused feature to its centre.
struct FallbackEvent {
  int bin = 0;
  int index = 0;  // feature pulled in
};

struct SelectionResult {
  std::vector<int> indices;     // sorted retained set I, |I| = n for 0 < n < D
  Eigen::VectorXd bin_edges;    // n+1 edges over [a_min, a_max] (empty in guard paths)
  std::vector<int> counts;      // |C_k| per bin
  std::vector<int> quotas;      // q_k after adjustment, sum = n
  std::vector<FallbackEvent> fallback_events;
};

/// Proportional quotas q_k = round(n*counts_k/D), round half away from zero,
/// then adjusted to sum exactly n by +/-1 on bins in descending count order
/// (ties to the lowest bin index).
std::vector<int> quotas(const std::vector<int>& counts, int n, int d_total);

/// Balanced histogram binning over phi: n equal intervals on
/// [min(phi), max(phi)], half-open with the last closed; per bin the unused
/// members are sorted ascending by value and q_k of them are taken at evenly
/// spread ranks round(t*(L-1)/(q_k-1)) (the lowest rank when q_k = 1); any
/// unmet quota falls back to the nearest unused feature to the bin centre.
/// Guards: n <= 0 -> empty, n >= D -> everything, flat phi -> first n.
SelectionResult select_features(const Eigen::VectorXd& phi, int n);
SelectionResult select_features(const FeatureEmbedding& emb, int n);

/// X restricted to the retained columns, ascending original order.
DataMatrix reduce_matrix(const DataMatrix& X, const SelectionResult& sel);

/// CSV "bin,count,quota" rows followed by one "selected,..." line.
void write_selection_csv(std::ostream& out, const SelectionResult& sel);

}  // namespace nbse
