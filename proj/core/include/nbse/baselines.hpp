#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "nbse/dataset.hpp"
#include "nbse/errors.hpp"

namespace nbse {

/// One-way ANOVA F statistic per feature with degrees of freedom
/// (C-1, M-C). A feature with zero variance everywhere scores 0 (0/0 is
/// read as uninformative); zero within-class variance with real class
/// separation scores +infinity.
Eigen::VectorXd anova_f_scores(const LabeledDataset& data);

/// Indices of the n largest scores, ties to the lowest index, returned
/// ascending.
std::vector<int> top_n_select(const Eigen::VectorXd& scores, int n);

/// Uniform sample of n indices from {0..d_total-1} without replacement,
/// deterministic per seed, returned ascending.
std::vector<int> random_select(int d_total, int n, std::uint64_t seed);

}  // namespace nbse
