#pragma once

#include <Eigen/Core>

#include "nbse/dataset.hpp"
#include "nbse/errors.hpp"

namespace nbse {

struct LinearModel {
  Eigen::MatrixXd w;  // n_classes x n_features
  Eigen::VectorXd b;  // n_classes

  int n_classes() const { return static_cast<int>(w.rows()); }
  int n_features() const { return static_cast<int>(w.cols()); }
};

struct TrainOptions {
  double l2 = 1e-4;      // on w only, not the bias
  int max_epochs = 500;
  double tol = 1e-6;     // gradient-norm stopping threshold
  double step0 = 1.0;    // initial backtracking step
};

/// Whether training reached the gradient tolerance; the model is usable
/// either way and the final gradient norm is reported rather than thrown.
struct TrainResult {
  LinearModel model;
  int epochs = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
};

/// Mean softmax cross-entropy plus (l2/2)||w||_F^2.
double softmax_loss(const LabeledDataset& data, const LinearModel& model,
                    double l2);

/// Analytic gradient of softmax_loss; exposed for finite-difference checks.
void softmax_gradient(const LabeledDataset& data, const LinearModel& model,
                      double l2, Eigen::MatrixXd& grad_w,
                      Eigen::VectorXd& grad_b);

/// Multinomial logistic regression by full-batch gradient descent from a
/// zero initialization, with Armijo backtracking so the loss never
/// increases across epochs.
TrainResult train_linear_classifier(const LabeledDataset& data,
                                    const TrainOptions& opt = {});

/// Argmax class scores, ties to the lowest class index.
std::vector<int> predict(const LinearModel& model, const DataMatrix& X);

double accuracy(const LinearModel& model, const LabeledDataset& data);

}  // namespace nbse
