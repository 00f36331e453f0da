#include "decole/learner.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "decole/errors.h"
#include "decole/rng.h"

namespace decole {

namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double ClampOpen(double p) {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - 0x1.0p-53;
  return std::clamp(p, kLow, kHigh);
}

double InfNorm(std::span<const double> v) {
  double norm = 0.0;
  for (const double x : v) norm = std::max(norm, std::abs(x));
  return norm;
}

}  // namespace

void LogisticHyperparams::Validate() const {
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
    throw ConfigError("l2_lambda must be a finite non-negative number");
  }
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Standardizer Standardizer::Fit(const Matrix& features) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += features(i, j);
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = features(i, j) - s.mean[j];
      var[j] += delta * delta;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    if (sd > 0.0) s.scale[j] = sd;
  }
  return s;
}

Matrix Standardizer::Apply(const Matrix& features) const {
  if (is_identity()) return features;
  Matrix out = features;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.Row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = (row[j] - mean[j]) / scale[j];
    }
  }
  return out;
}

LogisticModel::LogisticModel(std::vector<double> weights, double intercept,
                             Standardizer standardizer)
    : weights_(std::move(weights)),
      intercept_(intercept),
      standardizer_(std::move(standardizer)) {}

std::vector<double> LogisticModel::OriginalScaleWeights() const {
  if (standardizer_.is_identity()) return weights_;
  std::vector<double> out(weights_.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = weights_[j] / standardizer_.scale[j];
  }
  return out;
}

double LogisticModel::OriginalScaleIntercept() const {
  double b = intercept_;
  if (standardizer_.is_identity()) return b;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    b -= weights_[j] * standardizer_.mean[j] / standardizer_.scale[j];
  }
  return b;
}

std::vector<double> LogisticModel::PredictProb(const Matrix& features) const {
  if (features.cols() != weights_.size()) {
    throw DataError("feature dimension " + std::to_string(features.cols()) +
                    " does not match model dimension " +
                    std::to_string(weights_.size()));
  }
  std::vector<double> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto row = features.Row(i);
    double z = intercept_;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double x = standardizer_.is_identity()
                           ? row[j]
                           : (row[j] - standardizer_.mean[j]) /
                                 standardizer_.scale[j];
      z += weights_[j] * x;
    }
    out[i] = ClampOpen(Sigmoid(z));
  }
  return out;
}

LogisticObjective::LogisticObjective(const Matrix& features,
                                     std::span<const Label> labels,
                                     double l2_lambda)
    : features_(features), labels_(labels), l2_lambda_(l2_lambda) {}

double LogisticObjective::Value(std::span<const double> params) const {
  const std::size_t d = features_.cols();
  const double b = params[d];
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.rows(); ++i) {
    const auto row = features_.Row(i);
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += params[j] * row[j];
    loss += Softplus(z) - (labels_[i] ? z : 0.0);
  }
  loss /= static_cast<double>(features_.rows());
  double penalty = 0.0;
  for (std::size_t j = 0; j < d; ++j) penalty += params[j] * params[j];
  return loss + 0.5 * l2_lambda_ * penalty;
}

double LogisticObjective::ValueAndGradient(std::span<const double> params,
                                           std::span<double> gradient) const {
  const std::size_t d = features_.cols();
  const double b = params[d];
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.rows(); ++i) {
    const auto row = features_.Row(i);
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += params[j] * row[j];
    loss += Softplus(z) - (labels_[i] ? z : 0.0);
    const double residual = Sigmoid(z) - labels_[i];
    for (std::size_t j = 0; j < d; ++j) gradient[j] += residual * row[j];
    gradient[d] += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(features_.rows());
  loss *= inv_n;
  double penalty = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    gradient[j] = gradient[j] * inv_n + l2_lambda_ * params[j];
    penalty += params[j] * params[j];
  }
  gradient[d] *= inv_n;
  return loss + 0.5 * l2_lambda_ * penalty;
}

LogisticModel FitLogistic(const Matrix& features, std::span<const Label> labels,
                          const LogisticHyperparams& hyperparams) {
  hyperparams.Validate();
  if (labels.size() != features.rows()) {
    throw DataError("label count differs from feature rows");
  }
  std::size_t positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    positives += labels[i];
    for (const double v : features.Row(i)) {
      if (!std::isfinite(v)) throw DataError("non-finite feature value", i);
    }
  }
  if (positives == 0 || positives == labels.size()) {
    throw InsufficientDataError(
        "logistic regression needs both classes; got " +
        std::to_string(positives) + " positives out of " +
        std::to_string(labels.size()));
  }

  Standardizer standardizer = Standardizer::Fit(features);
  const Matrix x = standardizer.Apply(features);
  const LogisticObjective objective(x, labels, hyperparams.l2_lambda);
  const std::size_t p = objective.num_params();

  std::vector<double> params(p, 0.0);
  std::vector<double> gradient(p);
  std::vector<double> candidate(p);
  // Fixed diagonal scaling: on standardized columns the curvature is at most
  // 1/4 plus the ridge term, which otherwise dominates for large lambda.
  std::vector<double> inverse_scale(p, 1.0 / (0.25 + hyperparams.l2_lambda));
  inverse_scale.back() = 4.0;
  std::vector<double> direction(p);
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-20;
  double step = 1.0;
  double value = objective.ValueAndGradient(params, gradient);
  double grad_norm = InfNorm(gradient);
  int iteration = 0;
  bool converged = false;
  while (true) {
    if (!std::isfinite(value) || !std::isfinite(grad_norm)) {
      throw NumericalError("non-finite loss at iteration " +
                           std::to_string(iteration));
    }
    if (grad_norm <= hyperparams.tolerance) {
      converged = true;
      break;
    }
    if (iteration >= hyperparams.max_iterations) break;

    double decrease = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      direction[k] = inverse_scale[k] * gradient[k];
      decrease += direction[k] * gradient[k];
    }
    step *= 2.0;
    double next = 0.0;
    while (true) {
      for (std::size_t k = 0; k < p; ++k) {
        candidate[k] = params[k] - step * direction[k];
      }
      next = objective.Value(candidate);
      if (std::isfinite(next) && next <= value - kArmijo * step * decrease) {
        break;
      }
      step *= 0.5;
      if (step < kMinStep) break;
    }
    if (step < kMinStep) break;  // no descent possible at double precision
    params.swap(candidate);
    value = objective.ValueAndGradient(params, gradient);
    grad_norm = InfNorm(gradient);
    ++iteration;
  }

  LogisticModel model(std::vector<double>(params.begin(), params.end() - 1),
                      params.back(), std::move(standardizer));
  model.iterations_ = iteration;
  model.converged_ = converged;
  model.gradient_norm_ = grad_norm;
  return model;
}

std::unique_ptr<Predictor> LogisticRegressionLearner::Fit(
    const Matrix& features, std::span<const Label> labels) const {
  return std::make_unique<LogisticModel>(
      FitLogistic(features, labels, hyperparams_));
}

std::vector<int> AssignStratifiedFolds(std::span<const Label> labels, int folds,
                                       std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  std::vector<int> assignment(labels.size(), -1);
  std::size_t dealt = 0;
  for (Label c = 0; c < 2; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) rows.push_back(i);
    }
    if (rows.size() < static_cast<std::size_t>(folds)) {
      throw InsufficientDataError(
          "class " + std::to_string(int{c}) + " has " +
          std::to_string(rows.size()) + " instances, fewer than the " +
          std::to_string(folds) + " folds required for stratification");
    }
    Rng rng(DeriveSeed(seed, "folds", c));
    rng.Shuffle(std::span<std::size_t>(rows));
    for (const std::size_t r : rows) {
      assignment[r] = static_cast<int>(dealt % static_cast<std::size_t>(folds));
      ++dealt;
    }
  }
  return assignment;
}

ProbEstimates CrossValProb(const Matrix& features, std::span<const Label> labels,
                           const BaseLearner& learner,
                           const CrossValOptions& options) {
  if (labels.size() != features.rows()) {
    throw DataError("label count differs from feature rows");
  }
  ProbEstimates out;
  out.fold_assignment =
      AssignStratifiedFolds(labels, options.folds, options.seed);
  out.p_hat.assign(labels.size(), 0.0);
  out.fold_training_rows.resize(static_cast<std::size_t>(options.folds));

  std::vector<std::vector<std::size_t>> held_out(out.fold_training_rows.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto fold = static_cast<std::size_t>(out.fold_assignment[i]);
    held_out[fold].push_back(i);
    for (std::size_t f = 0; f < held_out.size(); ++f) {
      if (f != fold) out.fold_training_rows[f].push_back(i);
    }
  }

  auto run_fold = [&](std::size_t fold) {
    const auto& train = out.fold_training_rows[fold];
    std::vector<Label> train_labels;
    train_labels.reserve(train.size());
    for (const std::size_t r : train) train_labels.push_back(labels[r]);
    const auto model = learner.Fit(features.SelectRows(train), train_labels);
    return model->PredictProb(features.SelectRows(held_out[fold]));
  };

  std::vector<std::vector<double>> predictions(held_out.size());
  if (options.parallel) {
    std::vector<std::future<std::vector<double>>> pending;
    for (std::size_t f = 0; f < held_out.size(); ++f) {
      pending.push_back(std::async(std::launch::async, run_fold, f));
    }
    for (std::size_t f = 0; f < held_out.size(); ++f) {
      predictions[f] = pending[f].get();
    }
  } else {
    for (std::size_t f = 0; f < held_out.size(); ++f) {
      predictions[f] = run_fold(f);
    }
  }
  for (std::size_t f = 0; f < held_out.size(); ++f) {
    for (std::size_t k = 0; k < held_out[f].size(); ++k) {
      out.p_hat[held_out[f][k]] = predictions[f][k];
    }
  }
  return out;
}

}  // namespace decole
