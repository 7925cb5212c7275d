#include "nbse/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nbse/rng.hpp"

namespace nbse {

void validate_labeled_dataset(const LabeledDataset& data,
                              bool require_nonempty) {
  validate_data_matrix(data.X.values);
  if (static_cast<Eigen::Index>(data.y.size()) != data.X.n_objects())
    throw ConfigError("label count must equal the number of objects");
  if (data.n_classes < 1) throw ConfigError("need at least one class");
  std::vector<int> per_class(data.n_classes, 0);
  for (int c : data.y) {
    if (c < 0 || c >= data.n_classes)
      throw ConfigError("label " + std::to_string(c) + " out of range [0, " +
                        std::to_string(data.n_classes) + ")");
    ++per_class[c];
  }
  if (require_nonempty)
    for (int c = 0; c < data.n_classes; ++c)
      if (per_class[c] == 0)
        throw ConfigError("class " + std::to_string(c) + " has no samples");
}

Eigen::VectorXd anova_f_scores(const LabeledDataset& data) {
  validate_labeled_dataset(data);
  const int m = data.X.n_objects();
  const int d = data.X.n_features();
  const int c = data.n_classes;
  if (c < 2) throw ConfigError("ANOVA needs at least two classes");
  if (m <= c)
    throw ConfigError("ANOVA needs more samples than classes (df = M - C)");

  std::vector<int> n_c(c, 0);
  for (int label : data.y) ++n_c[label];

  Eigen::VectorXd f(d);
  for (int l = 0; l < d; ++l) {
    const auto col = data.X.values.col(l);
    const double grand = col.mean();
    Eigen::VectorXd class_mean = Eigen::VectorXd::Zero(c);
    for (int i = 0; i < m; ++i) class_mean[data.y[i]] += col[i];
    for (int k = 0; k < c; ++k) class_mean[k] /= n_c[k];

    double ss_between = 0.0, ss_within = 0.0;
    for (int k = 0; k < c; ++k) {
      const double dm = class_mean[k] - grand;
      ss_between += n_c[k] * dm * dm;
    }
    for (int i = 0; i < m; ++i) {
      const double dv = col[i] - class_mean[data.y[i]];
      ss_within += dv * dv;
    }
    const double ms_between = ss_between / (c - 1);
    const double ms_within = ss_within / (m - c);
    if (ms_within == 0.0)
      f[l] = ms_between == 0.0 ? 0.0
                               : std::numeric_limits<double>::infinity();
    else
      f[l] = ms_between / ms_within;
  }
  return f;
}

std::vector<int> top_n_select(const Eigen::VectorXd& scores, int n) {
  const int d = static_cast<int>(scores.size());
  if (n < 0 || n > d)
    throw ConfigError("selection size must lie in [0, D]");
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (std::isnan(scores[i])) throw ConfigError("scores must not be NaN");

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&scores](int a, int b) {
    return scores[a] > scores[b];
  });
  order.resize(n);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<int> random_select(int d_total, int n, std::uint64_t seed) {
  if (d_total < 0 || n < 0 || n > d_total)
    throw ConfigError("selection size must lie in [0, D]");
  std::vector<int> pool(d_total);
  std::iota(pool.begin(), pool.end(), 0);
  std::mt19937_64 gen(mix_seed(seed, 0x72616e64));
  for (int i = 0; i < n; ++i) {
    const int j = i + static_cast<int>(uniform_below(gen, d_total - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace nbse
