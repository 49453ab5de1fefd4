#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace msfl {

// Sigmoid encoder/decoder pair; weights untied.
struct AEParams {
  Eigen::MatrixXd W;    // N x D encoder
  Eigen::VectorXd b;    // N
  Eigen::MatrixXd Wd;   // D x N decoder
  Eigen::VectorXd bd;   // D

  int input_dim() const { return static_cast<int>(W.cols()); }
  int code_dim() const { return static_cast<int>(W.rows()); }
};

struct AEGradients {
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
  Eigen::MatrixXd dWd;
  Eigen::VectorXd dbd;
};

struct AELearnResult {
  AEParams params;
  std::vector<double> epoch_loss;  // mean squared-error loss per epoch
};

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x);

// Mean reconstruction loss over the batch columns:
// mean_i ||v_i - f(Wd f(W v_i + b) + bd)||^2, with its gradients.
double ae_loss_grad(const AEParams& p, const Eigen::MatrixXd& batch,
                    AEGradients* grads);

// Minibatch gradient descent on the reconstruction loss. Columns of X are
// samples. Throws NumericalError if the loss turns non-finite.
AELearnResult ae_learn(const Eigen::MatrixXd& X, int code_dim, double lr,
                       int epochs, std::uint64_t seed, int batch_size = 32);

// Forward pass of the encoder half only.
Eigen::VectorXd ae_encode(const AEParams& p, const Eigen::VectorXd& v);

Eigen::VectorXd ae_reconstruct(const AEParams& p, const Eigen::VectorXd& v);

}  // namespace msfl
