#include "msfl/sparse_coding.hpp"

#include <cmath>
#include <string>

#include "msfl/errors.hpp"
#include "msfl/rng.hpp"

namespace msfl {

double sc_objective(const Eigen::MatrixXd& W, const Eigen::VectorXd& v,
                    double beta, const Eigen::VectorXd& s) {
  return (v - W * s).squaredNorm() + beta * s.lpNorm<1>();
}

double sc_kkt_residual(const Eigen::MatrixXd& W, const Eigen::VectorXd& v,
                       double beta, const Eigen::VectorXd& s) {
  const Eigen::VectorXd g = 2.0 * (W.transpose() * (W * s - v));
  double worst = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    double r;
    if (s[j] > 0.0)
      r = std::abs(g[j] + beta);
    else if (s[j] < 0.0)
      r = std::abs(g[j] - beta);
    else
      r = std::max(0.0, std::abs(g[j]) - beta);
    worst = std::max(worst, r);
  }
  return worst;
}

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// One solve given precomputed gram = W'W and corr = W'v.
Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& W, const Eigen::MatrixXd& gram,
                         const Eigen::VectorXd& corr, const Eigen::VectorXd& v,
                         double beta, double tol, int max_sweeps,
                         const Eigen::VectorXd* warm) {
  const Eigen::Index n = gram.rows();
  Eigen::VectorXd s = warm ? *warm : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd q = gram * s;  // running W'W s
  const double half_beta = 0.5 * beta;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double gjj = gram(j, j);
      if (gjj < 1e-12) {
        s[j] = 0.0;
        continue;
      }
      const double rho = corr[j] - q[j] + gjj * s[j];
      const double snew = soft_threshold(rho, half_beta) / gjj;
      const double delta = snew - s[j];
      if (delta != 0.0) {
        q += gram.col(j) * delta;
        s[j] = snew;
      }
    }
    // residual check on exact quantities, not the running q
    if (sc_kkt_residual(W, v, beta, s) < tol) return s;
    if ((sweep & 0x3F) == 0x3F) q = gram * s;  // shed drift
  }
  throw NumericalError("sc_encode: no convergence after " +
                       std::to_string(max_sweeps) + " sweeps, KKT residual " +
                       std::to_string(sc_kkt_residual(W, v, beta, s)));
}

}  // namespace

Eigen::VectorXd sc_encode(const Eigen::MatrixXd& W, const Eigen::VectorXd& v,
                          double beta, double tol, int max_sweeps,
                          const Eigen::VectorXd* warm) {
  if (beta <= 0.0) throw ConfigError("sc_encode: beta must be > 0");
  if (v.size() != W.rows()) throw ConfigError("sc_encode: dimension mismatch");
  const Eigen::MatrixXd gram = W.transpose() * W;
  const Eigen::VectorXd corr = W.transpose() * v;
  return lasso_cd(W, gram, corr, v, beta, tol, max_sweeps, warm);
}

Eigen::VectorXd sc_encode(const ScDict& dict, const Eigen::VectorXd& v) {
  return sc_encode(dict.W, v, dict.beta);
}

ScEncoder::ScEncoder(const Eigen::MatrixXd& W, double beta, double tol,
                     int max_sweeps)
    : W_(W), gram_(W.transpose() * W), beta_(beta), tol_(tol),
      max_sweeps_(max_sweeps) {
  if (beta <= 0.0) throw ConfigError("ScEncoder: beta must be > 0");
}

Eigen::VectorXd ScEncoder::encode(const Eigen::VectorXd& v,
                                  const Eigen::VectorXd* warm) const {
  if (v.size() != W_.rows()) throw ConfigError("ScEncoder: dimension mismatch");
  const Eigen::VectorXd corr = W_.transpose() * v;
  return lasso_cd(W_, gram_, corr, v, beta_, tol_, max_sweeps_, warm);
}

ScLearnResult sc_learn(const Eigen::MatrixXd& X, int n_atoms, double beta,
                       int iters, std::uint64_t seed) {
  if (beta <= 0.0) throw ConfigError("sc_learn: beta must be > 0");
  if (X.cols() < 1) throw ConfigError("sc_learn: no data");
  const Eigen::Index d = X.rows();
  const Eigen::Index n = X.cols();

  Rng rng(seed);
  Eigen::MatrixXd W(d, n_atoms);
  for (int j = 0; j < n_atoms; ++j) {
    Eigen::VectorXd cand = X.col(rng.uniform_int(n));
    double norm = cand.norm();
    if (norm < 1e-12) {
      for (Eigen::Index i = 0; i < d; ++i) cand[i] = rng.normal();
      norm = cand.norm();
    }
    W.col(j) = cand / norm;
  }

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n_atoms, n);
  ScLearnResult res;

  for (int it = 0; it < iters; ++it) {
    // codes, warm-started so the objective keeps descending
    ScEncoder enc(W, beta);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd warm = S.col(i);
      S.col(i) = enc.encode(X.col(i), &warm);
    }

    // dictionary, one block pass; residual maintained incrementally
    Eigen::MatrixXd R = X - W * S;
    for (int j = 0; j < n_atoms; ++j) {
      const Eigen::VectorXd srow = S.row(j).transpose();
      const double energy = srow.squaredNorm();
      if (energy < 1e-12) {
        // unused atom: reseed to the worst-reconstructed sample (objective
        // unchanged since the atom has no active codes)
        Eigen::Index worst;
        R.colwise().squaredNorm().maxCoeff(&worst);
        Eigen::VectorXd cand = R.col(worst);
        const double norm = cand.norm();
        if (norm > 1e-12) W.col(j) = cand / norm;
        continue;
      }
      R += W.col(j) * srow.transpose();
      Eigen::VectorXd wj = (R * srow) / energy;
      const double norm = wj.norm();
      if (norm > 1.0) wj /= norm;  // unit ball projection
      W.col(j) = wj;
      R -= W.col(j) * srow.transpose();
    }

    double obj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      obj += sc_objective(W, X.col(i), beta, S.col(i));
    res.objective_trace.push_back(obj);
  }

  res.dict.W = std::move(W);
  res.dict.beta = beta;
  return res;
}

}  // namespace msfl
