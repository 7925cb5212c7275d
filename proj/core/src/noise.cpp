#include "nbse/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "nbse/rng.hpp"

namespace nbse {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DataMatrix perturb(const DataMatrix& X, const NoiseSpec& spec) {
  validate_data_matrix(X.values);
  if (!(spec.factor >= 0.0)) throw ConfigError("noise factor must be >= 0");
  if (spec.base_scales.sigma.size() != X.n_objects())
    throw ConfigError("base_scales size does not match the object count");
  Eigen::MatrixXd out = X.values;
  if (spec.factor == 0.0) return DataMatrix::from(std::move(out));

  std::mt19937_64 gen(mix_seed(spec.seed, 0x6e6f6973));
  GaussianDraw gauss;
  for (int i = 0; i < X.n_objects(); ++i) {
    const double sd = spec.factor * spec.base_scales.sigma[i];
    for (int l = 0; l < X.n_features(); ++l) out(i, l) += sd * gauss(gen);
  }
  return DataMatrix::from(std::move(out));
}

double weight_epsilon(const SimilarityGraph& g,
                      const SimilarityGraph& g_tilde) {
  if (g.n_nodes() != g_tilde.n_nodes() || g.n_edges() != g_tilde.n_edges())
    throw ConfigError("edge sets differ (size mismatch)");
  double eps = 0.0;
  for (int e = 0; e < g.n_edges(); ++e) {
    const Edge& a = g.edges()[e];
    const Edge& b = g_tilde.edges()[e];
    if (a.u != b.u || a.v != b.v)
      throw ConfigError("edge sets differ at position " + std::to_string(e));
    eps = std::max(eps, std::abs(b.w - a.w) / std::abs(a.w));
  }
  return eps;
}

ShiftTable beta_shift_sweep(const DataMatrix& X,
                            const ShiftSweepOptions& opt) {
  validate_data_matrix(X.values);
  if (opt.trials < 1) throw ConfigError("trials must be at least 1");

  ShiftTable table;
  table.factors = opt.factors;
  if (table.factors.empty()) {
    for (int i = 0; i < 8; ++i)
      table.factors.push_back(std::pow(10.0, -3.0 + 2.0 * i / 7.0));
  }
  for (size_t i = 0; i < table.factors.size(); ++i) {
    if (!(table.factors[i] > 0.0))
      throw ConfigError("noise factors must be positive");
    if (i > 0 && table.factors[i] <= table.factors[i - 1])
      throw ConfigError("noise factors must be ascending");
  }

  const LocalScales scales = local_scales(X, opt.graph.k_scale);
  const SimilarityGraph baseline =
      build_knn_graph(X, opt.graph.k_graph, scales, opt.graph.mutual);
  const NishimoriResult base_root = find_beta_n(baseline, opt.root);
  table.beta_n_baseline = base_root.beta_n;
  table.g_baseline = base_root.g;
  table.n_edges = baseline.n_edges();

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t fi = 0; fi < table.factors.size(); ++fi) {
    std::vector<double> ok_shifts;
    for (int t = 0; t < opt.trials; ++t) {
      NoiseSpec spec;
      spec.base_scales = scales;
      spec.factor = table.factors[fi];
      spec.seed = mix_seed(opt.seed, 1000003ull * fi + t);
      const DataMatrix xt = perturb(X, spec);
      const LocalScales scales_t = local_scales(xt, opt.graph.k_scale);
      const SimilarityGraph gt =
          weight_graph_on_backbone(xt, baseline, scales_t);

      ShiftRow row;
      row.factor = spec.factor;
      row.trial = t;
      row.epsilon = weight_epsilon(baseline, gt);
      try {
        row.shift = std::abs(find_beta_n(gt, opt.root).beta_n -
                             table.beta_n_baseline);
        row.ok = true;
        ok_shifts.push_back(row.shift);
      } catch (const NoTransitionError&) {
        row.shift = nan;
        ++table.excluded;
      }
      table.rows.push_back(row);
    }
    table.median_shifts.push_back(ok_shifts.empty() ? nan
                                                    : median_of(ok_shifts));
  }

  // Least-squares line through (log factor, log median shift); factors with
  // no usable trials or a zero median drop out of the fit.
  std::vector<double> lx, ly;
  for (size_t fi = 0; fi < table.factors.size(); ++fi) {
    const double med = table.median_shifts[fi];
    if (std::isfinite(med) && med > 0.0) {
      lx.push_back(std::log(table.factors[fi]));
      ly.push_back(std::log(med));
    }
  }
  const size_t n = lx.size();
  if (n >= 2) {
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    table.slope = sxy / sxx;
    table.intercept = my - table.slope * mx;
    double sse = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double r = ly[i] - (table.intercept + table.slope * lx[i]);
      sse += r * r;
    }
    table.slope_stderr =
        n > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
  } else {
    table.slope = nan;
    table.intercept = nan;
    table.slope_stderr = nan;
  }
  return table;
}

void write_shift_csv(std::ostream& out, const ShiftTable& table) {
  out << "factor,trial,epsilon,shift\n";
  for (const ShiftRow& r : table.rows)
    out << fmt17(r.factor) << ',' << r.trial << ',' << fmt17(r.epsilon)
        << ',' << fmt17(r.shift) << '\n';
}

void write_shift_fit(std::ostream& out, const ShiftTable& table) {
  out << "slope=" << fmt17(table.slope) << '\n';
  out << "intercept=" << fmt17(table.intercept) << '\n';
  out << "slope_stderr=" << fmt17(table.slope_stderr) << '\n';
  out << "excluded=" << table.excluded << '\n';
  out << "beta_n=" << fmt17(table.beta_n_baseline) << '\n';
  out << "g=" << fmt17(table.g_baseline) << '\n';
  out << "n_edges=" << table.n_edges << '\n';
}

}  // namespace nbse
