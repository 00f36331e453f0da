#ifndef DECOLE_LEARNER_H_
#define DECOLE_LEARNER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "decole/dataset.h"

namespace decole {

struct LogisticHyperparams {
  double l2_lambda = 1e-4;
  int max_iterations = 10000;
  // Stop once the gradient infinity-norm drops to this value.
  double tolerance = 1e-6;

  void Validate() const;
};

// Per-column affine map to zero mean and unit variance. A constant column
// keeps scale 1. An empty transform is the identity.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer Fit(const Matrix& features);
  Matrix Apply(const Matrix& features) const;
  bool is_identity() const { return mean.empty(); }
};

// Something that maps feature rows to P(label = 1).
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<double> PredictProb(const Matrix& features) const = 0;
};

// Fit half of the base-learner contract. Implementations must be pure: the
// same inputs give a predictor with identical outputs.
class BaseLearner {
 public:
  virtual ~BaseLearner() = default;
  virtual std::unique_ptr<Predictor> Fit(const Matrix& features,
                                         std::span<const Label> labels) const = 0;
};

// sigmoid(w . standardize(x) + b). Weights live in the standardized space of
// the training split; OriginalScaleWeights() folds the transform back.
class LogisticModel : public Predictor {
 public:
  LogisticModel() = default;
  LogisticModel(std::vector<double> weights, double intercept,
                Standardizer standardizer = {});

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  const Standardizer& standardizer() const { return standardizer_; }
  int iterations() const { return iterations_; }
  bool converged() const { return converged_; }
  double gradient_norm() const { return gradient_norm_; }

  std::vector<double> OriginalScaleWeights() const;
  double OriginalScaleIntercept() const;

  // Throws DataError on a feature-dimension mismatch. Values are clamped to
  // the open interval (0, 1).
  std::vector<double> PredictProb(const Matrix& features) const override;

 private:
  friend LogisticModel FitLogistic(const Matrix&, std::span<const Label>,
                                   const LogisticHyperparams&);

  std::vector<double> weights_;
  double intercept_ = 0.0;
  Standardizer standardizer_;
  int iterations_ = 0;
  bool converged_ = true;
  double gradient_norm_ = 0.0;
};

// Mean negative log-likelihood plus (l2 / 2) * |w|^2 over already-transformed
// features. Parameters are laid out as [w_0 .. w_{d-1}, b]; the intercept is
// not penalized.
class LogisticObjective {
 public:
  LogisticObjective(const Matrix& features, std::span<const Label> labels,
                    double l2_lambda);

  std::size_t num_params() const { return features_.cols() + 1; }
  double Value(std::span<const double> params) const;
  double ValueAndGradient(std::span<const double> params,
                          std::span<double> gradient) const;

 private:
  const Matrix& features_;
  std::span<const Label> labels_;
  double l2_lambda_;
};

double Sigmoid(double z);

// Full-batch gradient descent with a fixed diagonal scaling and Armijo
// backtracking on standardized features. Throws InsufficientDataError when a class is absent and
// NumericalError on a non-finite objective.
LogisticModel FitLogistic(const Matrix& features, std::span<const Label> labels,
                          const LogisticHyperparams& hyperparams);

class LogisticRegressionLearner : public BaseLearner {
 public:
  explicit LogisticRegressionLearner(LogisticHyperparams hyperparams = {})
      : hyperparams_(hyperparams) {}

  std::unique_ptr<Predictor> Fit(const Matrix& features,
                                 std::span<const Label> labels) const override;

  const LogisticHyperparams& hyperparams() const { return hyperparams_; }

 private:
  LogisticHyperparams hyperparams_;
};

struct CrossValOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  // Fit fold models on separate threads. Output is identical either way.
  bool parallel = false;
};

// Out-of-fold P(label = 1). fold_training_rows[f] lists the rows the model
// for fold f was fitted on, kept so purity can be audited.
struct ProbEstimates {
  std::vector<double> p_hat;
  std::vector<int> fold_assignment;
  std::vector<std::vector<std::size_t>> fold_training_rows;

  std::size_t size() const { return p_hat.size(); }
};

// Stratified assignment: within each class the rows are shuffled and dealt
// round-robin, class 1 continuing where class 0 stopped. Throws
// InsufficientDataError when a class has fewer rows than folds.
std::vector<int> AssignStratifiedFolds(std::span<const Label> labels, int folds,
                                       std::uint64_t seed);

ProbEstimates CrossValProb(const Matrix& features, std::span<const Label> labels,
                           const BaseLearner& learner,
                           const CrossValOptions& options);

}  // namespace decole

#endif  // DECOLE_LEARNER_H_
