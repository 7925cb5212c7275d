#include "nbse/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace nbse {

namespace {

// Row-stabilized class probabilities, M x C.
Eigen::MatrixXd softmax_probs(const DataMatrix& X, const LinearModel& model) {
  Eigen::MatrixXd scores =
      (X.values * model.w.transpose()).rowwise() + model.b.transpose();
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    scores.row(i) = (scores.row(i).array() - mx).exp();
    scores.row(i) /= scores.row(i).sum();
  }
  return scores;
}

void check_shapes(const LabeledDataset& data, const LinearModel& model) {
  validate_labeled_dataset(data);
  if (model.n_features() != data.X.n_features())
    throw ConfigError("model width does not match the feature count");
  if (model.n_classes() != data.n_classes)
    throw ConfigError("model class count does not match the dataset");
}

}  // namespace

double softmax_loss(const LabeledDataset& data, const LinearModel& model,
                    double l2) {
  check_shapes(data, model);
  const Eigen::MatrixXd scores =
      (data.X.values * model.w.transpose()).rowwise() + model.b.transpose();
  const int m = data.X.n_objects();
  double loss = 0.0;
  for (int i = 0; i < m; ++i) {
    const double mx = scores.row(i).maxCoeff();
    const double lse =
        mx + std::log((scores.row(i).array() - mx).exp().sum());
    loss += lse - scores(i, data.y[i]);
  }
  return loss / m + 0.5 * l2 * model.w.squaredNorm();
}

void softmax_gradient(const LabeledDataset& data, const LinearModel& model,
                      double l2, Eigen::MatrixXd& grad_w,
                      Eigen::VectorXd& grad_b) {
  check_shapes(data, model);
  const int m = data.X.n_objects();
  Eigen::MatrixXd r = softmax_probs(data.X, model);
  for (int i = 0; i < m; ++i) r(i, data.y[i]) -= 1.0;
  r /= m;
  grad_w = r.transpose() * data.X.values + l2 * model.w;
  grad_b = r.colwise().sum().transpose();
}

TrainResult train_linear_classifier(const LabeledDataset& data,
                                    const TrainOptions& opt) {
  validate_labeled_dataset(data);
  if (data.X.n_features() < 1)
    throw ConfigError("classifier needs at least one feature");
  if (!(opt.step0 > 0.0) || !(opt.tol > 0.0))
    throw ConfigError("step0 and tol must be positive");
  if (opt.max_epochs < 1) throw ConfigError("max_epochs must be at least 1");

  TrainResult res;
  res.model.w =
      Eigen::MatrixXd::Zero(data.n_classes, data.X.n_features());
  res.model.b = Eigen::VectorXd::Zero(data.n_classes);

  double loss = softmax_loss(data, res.model, opt.l2);
  double step = opt.step0;
  Eigen::MatrixXd grad_w;
  Eigen::VectorXd grad_b;
  for (int epoch = 0; epoch < opt.max_epochs; ++epoch) {
    softmax_gradient(data, res.model, opt.l2, grad_w, grad_b);
    const double gn2 = grad_w.squaredNorm() + grad_b.squaredNorm();
    res.grad_norm = std::sqrt(gn2);
    res.epochs = epoch;
    if (res.grad_norm <= opt.tol) {
      res.converged = true;
      break;
    }

    // Armijo backtracking keeps the loss non-increasing.
    step = std::min(opt.step0, 2.0 * step);
    bool accepted = false;
    while (step > 1e-14) {
      LinearModel trial;
      trial.w = res.model.w - step * grad_w;
      trial.b = res.model.b - step * grad_b;
      const double trial_loss = softmax_loss(data, trial, opt.l2);
      if (trial_loss <= loss - 1e-4 * step * gn2) {
        res.model = std::move(trial);
        loss = trial_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search stalled at numerical optimum
  }
  res.loss = loss;
  return res;
}

std::vector<int> predict(const LinearModel& model, const DataMatrix& X) {
  if (model.n_features() != X.n_features())
    throw ConfigError("model width does not match the feature count");
  const Eigen::MatrixXd scores =
      (X.values * model.w.transpose()).rowwise() + model.b.transpose();
  std::vector<int> labels(X.n_objects());
  for (int i = 0; i < X.n_objects(); ++i) {
    int best = 0;
    for (int c = 1; c < model.n_classes(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    labels[i] = best;
  }
  return labels;
}

double accuracy(const LinearModel& model, const LabeledDataset& data) {
  validate_labeled_dataset(data, /*require_nonempty=*/false);
  const std::vector<int> pred = predict(model, data.X);
  int hits = 0;
  for (size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == data.y[i]) ++hits;
  return data.y.empty() ? 0.0 : static_cast<double>(hits) / pred.size();
}

}  // namespace nbse
