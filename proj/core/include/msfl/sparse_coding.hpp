#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace msfl {

struct ScDict {
  Eigen::MatrixXd W;  // D x N, column norms <= 1
  double beta = 0.1;
  int n_atoms() const { return static_cast<int>(W.cols()); }
};

struct ScLearnResult {
  ScDict dict;
  std::vector<double> objective_trace;  // total objective per outer iteration
};

// Lasso objective ||v - W s||^2 + beta * ||s||_1.
double sc_objective(const Eigen::MatrixXd& W, const Eigen::VectorXd& v,
                    double beta, const Eigen::VectorXd& s);

// Max KKT residual of the lasso at s: |2 W_j'(Ws - v) + beta sign(s_j)| on the
// active set, excess of |2 W_j'(Ws - v)| over beta off it.
double sc_kkt_residual(const Eigen::MatrixXd& W, const Eigen::VectorXd& v,
                       double beta, const Eigen::VectorXd& s);

// Cyclic coordinate descent on the lasso with covariance updates, run until
// the KKT residual drops below tol. Throws NumericalError with the residual
// if max_sweeps is exhausted. warm, when given, seeds the iterate.
Eigen::VectorXd sc_encode(const Eigen::MatrixXd& W, const Eigen::VectorXd& v,
                          double beta, double tol = 1e-8,
                          int max_sweeps = 10000,
                          const Eigen::VectorXd* warm = nullptr);

Eigen::VectorXd sc_encode(const ScDict& dict, const Eigen::VectorXd& v);

// Batch encoder that reuses the Gram matrix across solves.
class ScEncoder {
public:
  ScEncoder(const Eigen::MatrixXd& W, double beta, double tol = 1e-8,
            int max_sweeps = 10000);
  Eigen::VectorXd encode(const Eigen::VectorXd& v,
                         const Eigen::VectorXd* warm = nullptr) const;

private:
  const Eigen::MatrixXd W_;
  Eigen::MatrixXd gram_;
  double beta_;
  double tol_;
  int max_sweeps_;
};

// Alternating minimization: codes by sc_encode (warm-started), dictionary by
// per-column least squares with projection onto the unit ball. The total
// objective is non-increasing across outer iterations.
ScLearnResult sc_learn(const Eigen::MatrixXd& X, int n_atoms, double beta,
                       int iters, std::uint64_t seed);

}  // namespace msfl
