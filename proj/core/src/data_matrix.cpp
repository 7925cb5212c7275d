#include "nbse/data_matrix.hpp"

#include <cmath>

namespace nbse {

void validate_data_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() < 2) throw ConfigError("data matrix needs at least 2 objects (rows)");
  if (m.cols() < 1) throw ConfigError("data matrix needs at least 1 feature (column)");
  if (!m.allFinite()) throw ConfigError("data matrix contains non-finite entries");
}

DataMatrix DataMatrix::from(Eigen::MatrixXd m) {
  validate_data_matrix(m);
  return DataMatrix{std::move(m)};
}

}  // namespace nbse
