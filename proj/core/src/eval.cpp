#include "nbse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <utility>

#include "nbse/rng.hpp"

namespace nbse {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

DataMatrix take(const Eigen::MatrixXd& r, const std::vector<int>& rows,
                const std::vector<int>& cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          r(rows[i], cols[j]);
  return DataMatrix::from(std::move(m));
}

}  // namespace

std::string selector_name(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::nbse: return "nbse";
    case SelectorKind::anova: return "anova";
    case SelectorKind::random: return "random";
  }
  throw ConfigError("unknown selector");
}

SelectorKind selector_from_name(const std::string& name) {
  if (name == "nbse") return SelectorKind::nbse;
  if (name == "anova") return SelectorKind::anova;
  if (name == "random") return SelectorKind::random;
  throw ConfigError("unknown selector '" + name + "'");
}

SplitIndices stratified_split(const std::vector<int>& y, int n_classes,
                              double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0) || !(test_fraction < 1.0))
    throw ConfigError("test_fraction must lie in [0, 1)");
  if (n_classes < 1) throw ConfigError("need at least one class");
  std::vector<std::vector<int>> by_class(n_classes);
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= n_classes)
      throw ConfigError("label out of range in split");
    by_class[y[i]].push_back(static_cast<int>(i));
  }

  std::mt19937_64 gen(mix_seed(seed, 0x73706c69));
  SplitIndices split;
  for (int c = 0; c < n_classes; ++c) {
    auto& idx = by_class[c];
    for (size_t i = 0; i + 1 < idx.size(); ++i) {
      const size_t j =
          i + uniform_below(gen, static_cast<std::uint64_t>(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    const int n_c = static_cast<int>(idx.size());
    int n_test = static_cast<int>(std::llround(n_c * test_fraction));
    n_test = std::clamp(n_test, 0, n_c > 0 ? n_c - 1 : 0);
    for (int i = 0; i < n_c; ++i)
      (i < n_test ? split.test : split.train).push_back(idx[i]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

LabeledDataset subset(const LabeledDataset& data,
                      const std::vector<int>& rows) {
  LabeledDataset out;
  out.n_classes = data.n_classes;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    data.X.values.cols());
  out.y.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= data.X.n_objects())
      throw ConfigError("row index out of range in subset");
    m.row(static_cast<Eigen::Index>(i)) = data.X.values.row(rows[i]);
    out.y.push_back(data.y[rows[i]]);
  }
  out.X = DataMatrix::from(std::move(m));
  return out;
}

RetentionCurve retention_sweep(const LabeledDataset& data,
                               const std::vector<SelectorKind>& methods,
                               const SweepOptions& opt) {
  validate_labeled_dataset(data);
  if (methods.empty()) throw ConfigError("no selection methods given");
  if (opt.seeds.empty()) throw ConfigError("no seeds given");
  if (opt.proportions.empty()) throw ConfigError("no proportions given");
  for (double p : opt.proportions)
    if (!(p > 0.0 && p <= 1.0))
      throw ConfigError("proportions must lie in (0, 1]");

  const int d = data.X.n_features();
  RetentionCurve curve;
  curve.proportions = opt.proportions;
  std::sort(curve.proportions.begin(), curve.proportions.end(),
            std::greater<double>());
  curve.proportions.erase(
      std::unique(curve.proportions.begin(), curve.proportions.end()),
      curve.proportions.end());

  const bool wants_nbse =
      std::find(methods.begin(), methods.end(), SelectorKind::nbse) !=
      methods.end();
  const bool wants_anova =
      std::find(methods.begin(), methods.end(), SelectorKind::anova) !=
      methods.end();

  // The NBSE selector is label-free: one embedding of the full matrix
  // serves every seed and proportion.
  Eigen::VectorXd phi;
  if (wants_nbse) phi = feature_axis_embedding(data.X, opt.axis).phi;

  Eigen::MatrixXd r = data.X.values;
  if (opt.representation == Representation::spectral)
    r = fingerprint(data.X, opt.fp_mode, opt.fp).psi;

  struct PerSeed {
    SplitIndices split;
    std::vector<int> y_train, y_test;
    Eigen::VectorXd anova_scores;
  };
  std::vector<PerSeed> per_seed(opt.seeds.size());
  for (size_t si = 0; si < opt.seeds.size(); ++si) {
    PerSeed& ps = per_seed[si];
    ps.split = stratified_split(data.y, data.n_classes, opt.test_fraction,
                                opt.seeds[si]);
    for (int i : ps.split.train) ps.y_train.push_back(data.y[i]);
    for (int i : ps.split.test) ps.y_test.push_back(data.y[i]);
    if (wants_anova)
      ps.anova_scores = anova_f_scores(subset(data, ps.split.train));
  }

  std::map<int, std::vector<int>> nbse_by_n;
  std::vector<int> all(d);
  for (int i = 0; i < d; ++i) all[i] = i;

  for (SelectorKind method : methods) {
    for (size_t pi = 0; pi < curve.proportions.size(); ++pi) {
      const double p = curve.proportions[pi];
      const int n = std::clamp(static_cast<int>(std::llround(p * d)), 1, d);
      std::vector<double> accs;
      for (size_t si = 0; si < opt.seeds.size(); ++si) {
        const PerSeed& ps = per_seed[si];
        std::vector<int> picked;
        if (n == d) {
          picked = all;
        } else if (method == SelectorKind::nbse) {
          auto it = nbse_by_n.find(n);
          if (it == nbse_by_n.end())
            it = nbse_by_n.emplace(n, select_features(phi, n).indices).first;
          picked = it->second;
        } else if (method == SelectorKind::anova) {
          picked = top_n_select(ps.anova_scores, n);
        } else {
          picked = random_select(
              d, n, mix_seed(opt.seeds[si], 0xacc0 + static_cast<int>(pi)));
        }

        LabeledDataset train;
        train.X = take(r, ps.split.train, picked);
        train.y = ps.y_train;
        train.n_classes = data.n_classes;
        LabeledDataset test;
        test.X = take(r, ps.split.test, picked);
        test.y = ps.y_test;
        test.n_classes = data.n_classes;

        const TrainResult fit = train_linear_classifier(train, opt.train);
        const double acc = accuracy(fit.model, test);
        curve.cells.push_back({method, p, opt.seeds[si], acc});
        accs.push_back(acc);
      }
      double mean = 0.0;
      for (double a : accs) mean += a;
      mean /= accs.size();
      double var = 0.0;
      for (double a : accs) var += (a - mean) * (a - mean);
      var /= accs.size();
      curve.aggregates.push_back({method, p, mean, std::sqrt(var)});
    }
  }
  return curve;
}

void write_sweep_cells_csv(std::ostream& out, const RetentionCurve& curve) {
  out << "method,p,seed,accuracy\n";
  for (const SweepCell& c : curve.cells)
    out << selector_name(c.method) << ',' << fmt17(c.p) << ',' << c.seed
        << ',' << fmt17(c.accuracy) << '\n';
}

void write_sweep_aggregate_csv(std::ostream& out,
                               const RetentionCurve& curve) {
  out << "method,p,mean,std\n";
  for (const auto& a : curve.aggregates)
    out << selector_name(a.method) << ',' << fmt17(a.p) << ',' << fmt17(a.mean)
        << ',' << fmt17(a.std_dev) << '\n';
}

}  // namespace nbse
