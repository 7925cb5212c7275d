#pragma once

#include <vector>

#include "nbse/data_matrix.hpp"
#include "nbse/errors.hpp"

namespace nbse {

struct LabeledDataset {
  DataMatrix X;
  std::vector<int> y;  // labels in {0..n_classes-1}
  int n_classes = 0;
};

/// Checks |y| = M, labels in range, and (when require_nonempty) that every
/// class has at least one sample.
void validate_labeled_dataset(const LabeledDataset& data,
                              bool require_nonempty = true);

}  // namespace nbse
