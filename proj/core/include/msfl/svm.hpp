#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace msfl {

enum class SVMKind { Linear, ExpChi2, Knn3 };

// One-vs-rest classifier. Linear kind keeps per-class weights with the bias
// folded in as a trailing constant-one dimension; kernel kind keeps the
// referenced training features and per-class dual coefficients; 3-NN keeps
// the training set outright.
struct SVMModel {
  SVMKind kind = SVMKind::Linear;
  int n_classes = 0;
  double C = 1.0;
  double gamma = 1.0;              // exp-chi2 bandwidth
  Eigen::MatrixXd W;               // (D+1) x K, linear
  Eigen::MatrixXd support;         // D x n, kernel and knn
  Eigen::MatrixXd dual;            // n x K, y-signed dual coefficients
  Eigen::VectorXd bias;            // K, kernel
  Eigen::VectorXi support_labels;  // n, knn
};

struct SVMTrainConfig {
  SVMKind kind = SVMKind::Linear;
  double C = 1.0;
  double gamma = 0.0;  // 0 = 1 / mean chi2 distance over training pairs
  std::uint64_t seed = 0;
  int max_epochs = 2000;         // linear dual CD
  long long max_smo_steps = 20000000;  // kernel SMO
};

struct EvalResult {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // rows true class, cols predicted
};

// Chi-squared distance sum_i (x_i-y_i)^2 / (x_i+y_i+1e-10) over clipped
// nonnegative parts.
double chi2_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// exp(-gamma * chi2_distance). Warns once per call about negative inputs.
double chi2_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double gamma);

// Gram matrix K(X_i, Y_j) over columns; warns once about negative inputs.
Eigen::MatrixXd chi2_gram(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          double gamma);

// Mean chi2 distance over up to max_pairs random pairs, the default
// bandwidth scale.
double chi2_mean_distance(const Eigen::MatrixXd& X, int max_pairs = 10000,
                          std::uint64_t seed = 0);

// Columns of X are samples; labels are dense ids 0..K-1. Linear models train
// by dual coordinate descent to duality gap < 1e-4 |primal|; kernel models
// by maximal-violating-pair SMO to violation < 1e-3.
SVMModel svm_train(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                   const SVMTrainConfig& cfg);

// Per-class decision values (negated 3-NN vote distances for Knn3).
Eigen::VectorXd svm_decision(const SVMModel& m, const Eigen::VectorXd& x);

int svm_predict(const SVMModel& m, const Eigen::VectorXd& x);

EvalResult evaluate(const SVMModel& m, const Eigen::MatrixXd& X,
                    const std::vector<int>& labels);

}  // namespace msfl
