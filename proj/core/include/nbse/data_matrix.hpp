#pragma once

#include <Eigen/Core>

#include "nbse/errors.hpp"

namespace nbse {

/// M objects (rows) by D features (columns), all entries finite.
struct DataMatrix {
  Eigen::MatrixXd values;

  Eigen::Index n_objects() const { return values.rows(); }
  Eigen::Index n_features() const { return values.cols(); }

  /// Validating factory: M >= 2, D >= 1, every entry finite.
  static DataMatrix from(Eigen::MatrixXd m);
};

/// Throws ConfigError if the matrix violates the DataMatrix invariants.
void validate_data_matrix(const Eigen::MatrixXd& m);

}  // namespace nbse
