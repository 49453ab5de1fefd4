#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "msfl/autoencoder.hpp"
#include "msfl/errors.hpp"

using namespace msfl;

namespace {

AEParams random_params(int dim, int code, Rng& rng, double scale = 0.5) {
  AEParams p;
  p.W.resize(code, dim);
  p.Wd.resize(dim, code);
  p.b.resize(code);
  p.bd.resize(dim);
  for (int i = 0; i < code; ++i) {
    p.b[i] = scale * rng.normal();
    for (int j = 0; j < dim; ++j) p.W(i, j) = scale * rng.normal();
  }
  for (int i = 0; i < dim; ++i) {
    p.bd[i] = scale * rng.normal();
    for (int j = 0; j < code; ++j) p.Wd(i, j) = scale * rng.normal();
  }
  return p;
}

// Central finite difference of the loss in every parameter entry.
double max_relative_gradient_error(const AEParams& p,
                                   const Eigen::MatrixXd& batch) {
  AEGradients g;
  ae_loss_grad(p, batch, &g);
  const double h = 1e-5;
  double worst = 0.0;
  const auto probe = [&](double* slot, double analytic) {
    const double saved = *slot;
    *slot = saved + h;
    const double up = ae_loss_grad(p, batch, nullptr);
    *slot = saved - h;
    const double down = ae_loss_grad(p, batch, nullptr);
    *slot = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
    worst = std::max(worst, std::abs(numeric - analytic) / denom);
  };
  AEParams& mp = const_cast<AEParams&>(p);
  for (int i = 0; i < p.W.rows(); ++i)
    for (int j = 0; j < p.W.cols(); ++j) probe(&mp.W(i, j), g.dW(i, j));
  for (int i = 0; i < p.b.size(); ++i) probe(&mp.b[i], g.db[i]);
  for (int i = 0; i < p.Wd.rows(); ++i)
    for (int j = 0; j < p.Wd.cols(); ++j) probe(&mp.Wd(i, j), g.dWd(i, j));
  for (int i = 0; i < p.bd.size(); ++i) probe(&mp.bd[i], g.dbd[i]);
  return worst;
}

}  // namespace

TEST_SUITE("ae") {

TEST_CASE("zero parameters reconstruct a constant half") {
  AEParams p;
  p.W = Eigen::MatrixXd::Zero(3, 5);
  p.b = Eigen::VectorXd::Zero(3);
  p.Wd = Eigen::MatrixXd::Zero(5, 3);
  p.bd = Eigen::VectorXd::Zero(5);
  const Eigen::VectorXd r = ae_reconstruct(p, Eigen::VectorXd::Random(5));
  for (int i = 0; i < 5; ++i) CHECK(r[i] == 0.5);
}

TEST_CASE("the encoder is a sigmoid affine map") {
  Rng rng(41);
  const AEParams p = random_params(6, 4, rng);
  const Eigen::VectorXd v = test::random_normal_vector(6, rng);
  const Eigen::VectorXd code = ae_encode(p, v);
  const Eigen::VectorXd z = p.W * v + p.b;
  for (int i = 0; i < 4; ++i)
    CHECK(code[i] == doctest::Approx(1.0 / (1.0 + std::exp(-z[i]))).epsilon(1e-12));
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const AEParams p = random_params(6, 4, rng);
    Eigen::MatrixXd batch(6, 3);
    for (int c = 0; c < 3; ++c)
      batch.col(c) = Eigen::VectorXd::Constant(6, 0.5) +
                     0.2 * test::random_normal_vector(6, rng);
    CHECK(max_relative_gradient_error(p, batch) < 1e-4);
  }
}

TEST_CASE("training lowers the loss and is deterministic") {
  Rng rng(43);
  Eigen::MatrixXd X(8, 64);
  for (int c = 0; c < 64; ++c)
    X.col(c) = Eigen::VectorXd::Constant(8, 0.5) +
               0.15 * test::random_normal_vector(8, rng);
  const AELearnResult a = ae_learn(X, 4, 0.5, 30, 7);
  const AELearnResult b = ae_learn(X, 4, 0.5, 30, 7);
  CHECK(a.params.W == b.params.W);
  CHECK(a.params.bd == b.params.bd);
  REQUIRE(a.epoch_loss.size() == 30);
  CHECK(a.epoch_loss.back() < a.epoch_loss.front());
}

TEST_CASE("a non-finite loss raises a numerical error") {
  // Sigmoid outputs keep the loss bounded for any learning rate, so the
  // divergence guard is exercised the only way it can fire: non-finite data.
  Rng rng(44);
  Eigen::MatrixXd X(6, 32);
  for (int c = 0; c < 32; ++c) X.col(c) = test::random_normal_vector(6, rng);
  X(2, 5) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ae_learn(X, 3, 0.1, 50, 1), NumericalError);
}

}  // TEST_SUITE
