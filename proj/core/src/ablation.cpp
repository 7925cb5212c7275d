#include "nbse/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <utility>

namespace nbse {

std::vector<int> quotas(const std::vector<int>& counts, int n, int d_total) {
  if (n < 1) throw ConfigError("quota target must be at least 1");
  long long sum = 0;
  for (int c : counts) {
    if (c < 0) throw ConfigError("bin counts must be nonnegative");
    sum += c;
  }
  if (sum != d_total)
    throw ConfigError("bin counts must sum to the feature total");

  const int K = static_cast<int>(counts.size());
  std::vector<int> q(K);
  int total = 0;
  for (int k = 0; k < K; ++k) {
    q[k] = static_cast<int>(
        std::llround(static_cast<double>(n) * counts[k] / d_total));
    total += q[k];
  }

  // +/-1 per pass over bins in descending count order, ties to the lowest
  // index, cycling until the sum lands on n.
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&counts](int a, int b) { return counts[a] > counts[b]; });
  int diff = n - total;
  while (diff != 0) {
    for (int k : order) {
      if (diff == 0) break;
      if (diff > 0) {
        ++q[k];
        --diff;
      } else if (q[k] > 0) {
        --q[k];
        ++diff;
      }
    }
  }
  return q;
}

namespace {

int bin_of_value(const Eigen::VectorXd& edges, double x) {
  const int n = static_cast<int>(edges.size()) - 1;
  const double* first = edges.data();
  int k = static_cast<int>(std::upper_bound(first, first + n + 1, x) - first) - 1;
  if (k < 0) k = 0;
  if (k >= n) k = n - 1;  // last bin is closed
  return k;
}

}  // namespace

SelectionResult select_features(const Eigen::VectorXd& phi, int n) {
  if (!phi.allFinite()) throw ConfigError("phi must be finite");
  const int D = static_cast<int>(phi.size());
  SelectionResult res;
  if (n <= 0) return res;
  if (n >= D) {
    res.indices.resize(D);
    std::iota(res.indices.begin(), res.indices.end(), 0);
    return res;
  }
  const double a_min = phi.minCoeff();
  const double a_max = phi.maxCoeff();
  if (a_min == a_max) {
    res.indices.resize(n);
    std::iota(res.indices.begin(), res.indices.end(), 0);
    return res;
  }

  res.bin_edges.resize(n + 1);
  for (int k = 0; k <= n; ++k)
    res.bin_edges[k] = a_min + (a_max - a_min) * k / n;
  res.bin_edges[n] = a_max;

  std::vector<int> bin_of(D);
  res.counts.assign(n, 0);
  for (int i = 0; i < D; ++i) {
    bin_of[i] = bin_of_value(res.bin_edges, phi[i]);
    ++res.counts[bin_of[i]];
  }
  res.quotas = quotas(res.counts, n, D);

  std::vector<char> used(D, 0);
  for (int k = 0; k < n; ++k) {
    const int q = res.quotas[k];
    if (q <= 0) continue;

    std::vector<int> members;
    for (int i = 0; i < D; ++i)
      if (bin_of[i] == k && !used[i]) members.push_back(i);
    std::sort(members.begin(), members.end(), [&phi](int a, int b) {
      return phi[a] != phi[b] ? phi[a] < phi[b] : a < b;
    });

    int picked = 0;
    const int L = static_cast<int>(members.size());
    if (L > 0) {
      for (int t = 0; t < q; ++t) {
        long long r = q == 1 ? 0
                             : std::llround(static_cast<double>(t) * (L - 1) /
                                            (q - 1));
        r = std::clamp<long long>(r, 0, L - 1);
        const int i = members[static_cast<int>(r)];
        if (used[i]) continue;  // rank collision when q > L
        used[i] = 1;
        ++picked;
      }
    }

    const double centre = 0.5 * (res.bin_edges[k] + res.bin_edges[k + 1]);
    while (picked < q) {
      int best = -1;
      double best_dist = 0.0;
      for (int i = 0; i < D; ++i) {
        if (used[i]) continue;
        const double dist = std::abs(phi[i] - centre);
        if (best < 0 || dist < best_dist) {
          best = i;
          best_dist = dist;
        }
      }
      if (best < 0) break;  // unreachable: n < D keeps an unused feature
      used[best] = 1;
      res.fallback_events.push_back({k, best});
      ++picked;
    }
  }

  for (int i = 0; i < D; ++i)
    if (used[i]) res.indices.push_back(i);
  return res;
}

SelectionResult select_features(const FeatureEmbedding& emb, int n) {
  return select_features(emb.phi, n);
}

DataMatrix reduce_matrix(const DataMatrix& X, const SelectionResult& sel) {
  std::vector<int> idx = sel.indices;
  std::sort(idx.begin(), idx.end());
  for (int i : idx)
    if (i < 0 || i >= X.n_features())
      throw ConfigError("selected index " + std::to_string(i) +
                        " out of range");
  Eigen::MatrixXd r(X.n_objects(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j)
    r.col(static_cast<Eigen::Index>(j)) = X.values.col(idx[j]);
  return DataMatrix::from(std::move(r));
}

void write_selection_csv(std::ostream& out, const SelectionResult& sel) {
  out << "bin,count,quota\n";
  for (size_t k = 0; k < sel.counts.size(); ++k)
    out << k << ',' << sel.counts[k] << ',' << sel.quotas[k] << '\n';
  out << "selected";
  for (int i : sel.indices) out << ',' << i;
  out << '\n';
}

}  // namespace nbse
