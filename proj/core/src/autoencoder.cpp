#include "msfl/autoencoder.hpp"

#include <cmath>
#include <numeric>

#include "msfl/errors.hpp"
#include "msfl/rng.hpp"

namespace msfl {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
  return 1.0 / (1.0 + (-x.array()).exp());
}

static Eigen::MatrixXd sigmoid_m(const Eigen::MatrixXd& x) {
  return 1.0 / (1.0 + (-x.array()).exp());
}

double ae_loss_grad(const AEParams& p, const Eigen::MatrixXd& batch,
                    AEGradients* grads) {
  const int m = static_cast<int>(batch.cols());
  if (m == 0) throw ConfigError("ae_loss_grad: empty batch");
  if (batch.rows() != p.W.cols())
    throw ConfigError("ae_loss_grad: batch dimension mismatch");

  const Eigen::MatrixXd a1 = sigmoid_m((p.W * batch).colwise() + p.b);
  const Eigen::MatrixXd a2 = sigmoid_m((p.Wd * a1).colwise() + p.bd);
  const Eigen::MatrixXd err = a2 - batch;
  const double loss = err.squaredNorm() / m;

  if (grads) {
    const Eigen::MatrixXd dz2 =
        (2.0 / m) * err.array() * a2.array() * (1.0 - a2.array());
    grads->dWd = dz2 * a1.transpose();
    grads->dbd = dz2.rowwise().sum();
    const Eigen::MatrixXd dz1 =
        (p.Wd.transpose() * dz2).array() * a1.array() * (1.0 - a1.array());
    grads->dW = dz1 * batch.transpose();
    grads->db = dz1.rowwise().sum();
  }
  return loss;
}

AELearnResult ae_learn(const Eigen::MatrixXd& X, int code_dim, double lr,
                       int epochs, std::uint64_t seed, int batch_size) {
  const int dim = static_cast<int>(X.rows());
  const int n = static_cast<int>(X.cols());
  if (code_dim < 1) throw ConfigError("ae_learn: code_dim must be positive");
  if (n == 0) throw ConfigError("ae_learn: no samples");
  if (batch_size < 1) throw ConfigError("ae_learn: batch_size must be positive");

  Rng rng(seed);
  AELearnResult res;
  AEParams& p = res.params;
  const double lim_e = std::sqrt(6.0 / (dim + code_dim));
  p.W.resize(code_dim, dim);
  p.Wd.resize(dim, code_dim);
  for (int i = 0; i < code_dim; ++i)
    for (int j = 0; j < dim; ++j) p.W(i, j) = rng.uniform(-lim_e, lim_e);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < code_dim; ++j) p.Wd(i, j) = rng.uniform(-lim_e, lim_e);
  p.b = Eigen::VectorXd::Zero(code_dim);
  p.bd = Eigen::VectorXd::Zero(dim);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  AEGradients g;
  Eigen::MatrixXd batch;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    int batches = 0;
    for (int start = 0; start < n; start += batch_size) {
      const int bs = std::min(batch_size, n - start);
      batch.resize(dim, bs);
      for (int c = 0; c < bs; ++c) batch.col(c) = X.col(order[start + c]);
      const double loss = ae_loss_grad(p, batch, &g);
      if (!std::isfinite(loss))
        throw NumericalError(
            "ae_learn: loss diverged, try a smaller learning rate");
      p.W -= lr * g.dW;
      p.b -= lr * g.db;
      p.Wd -= lr * g.dWd;
      p.bd -= lr * g.dbd;
      epoch_loss += loss;
      ++batches;
    }
    res.epoch_loss.push_back(epoch_loss / batches);
  }
  return res;
}

Eigen::VectorXd ae_encode(const AEParams& p, const Eigen::VectorXd& v) {
  if (v.size() != p.W.cols())
    throw ConfigError("ae_encode: input dimension mismatch");
  return sigmoid(p.W * v + p.b);
}

Eigen::VectorXd ae_reconstruct(const AEParams& p, const Eigen::VectorXd& v) {
  return sigmoid(p.Wd * ae_encode(p, v) + p.bd);
}

}  // namespace msfl
