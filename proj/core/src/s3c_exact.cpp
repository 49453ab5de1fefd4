#include "msfl/s3c_exact.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <string>

#include "msfl/errors.hpp"

namespace msfl {

PosteriorExact exact_posterior(const S3CParams& p, const Eigen::VectorXd& v) {
  const int n = p.dict_size();
  const int dim = p.input_dim();
  if (n > 12)
    throw ConfigError("exact_posterior: enumeration over 2^" +
                      std::to_string(n) + " configurations refused (N > 12)");
  if (v.size() != dim)
    throw ConfigError("exact_posterior: input dimension mismatch");

  const int configs = 1 << n;
  const double log_beta_sum = p.beta.array().log().sum();
  const Eigen::VectorXd bv = p.beta.cwiseProduct(v);  // diag(beta) v
  const double vbv = v.dot(bv);
  // Bernoulli prior factors log p(h) = sum_i h_i b_i - log(1 + exp(b_i)).
  double log_prior_base = 0.0;
  for (int i = 0; i < n; ++i) log_prior_base -= log1pexp(p.b[i]);

  PosteriorExact out;
  out.log_weights.resize(configs);
  out.cond_mean.resize(configs);
  out.cond_cov.resize(configs);

  for (int c = 0; c < configs; ++c) {
    std::vector<int> active;
    double log_prior = log_prior_base;
    for (int i = 0; i < n; ++i) {
      if (c >> i & 1) {
        active.push_back(i);
        log_prior += p.b[i];
      }
    }
    const int k = static_cast<int>(active.size());

    double log_ev;
    if (k == 0) {
      log_ev = -0.5 * dim * std::log(2.0 * M_PI) + 0.5 * log_beta_sum -
               0.5 * vbv;
      out.cond_mean[c] = Eigen::VectorXd();
      out.cond_cov[c] = Eigen::MatrixXd();
    } else {
      Eigen::MatrixXd Wa(dim, k);
      Eigen::VectorXd mua(k), alpha_a(k);
      for (int t = 0; t < k; ++t) {
        Wa.col(t) = p.W.col(active[t]);
        mua[t] = p.mu[active[t]];
        alpha_a[t] = p.alpha[active[t]];
      }
      // Evidence covariance Wa diag(1/alpha) Wa' + diag(1/beta); its
      // determinant and inverse come from the matrix inversion lemma with
      // M = diag(alpha) + Wa' diag(beta) Wa.
      Eigen::MatrixXd M = Wa.transpose() * (p.beta.asDiagonal() * Wa);
      M.diagonal() += alpha_a;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
      const double log_det_M = ldlt.vectorD().array().log().sum();
      const double log_det_cov =
          -log_beta_sum - alpha_a.array().log().sum() + log_det_M;
      const Eigen::VectorXd u = v - Wa * mua;
      const Eigen::VectorXd bu = p.beta.cwiseProduct(u);
      const Eigen::VectorXd wbu = Wa.transpose() * bu;
      const double quad = u.dot(bu) - wbu.dot(ldlt.solve(wbu));
      log_ev = -0.5 * dim * std::log(2.0 * M_PI) - 0.5 * log_det_cov -
               0.5 * quad;
      const Eigen::VectorXd lin =
          alpha_a.cwiseProduct(mua) + Wa.transpose() * bv;
      out.cond_mean[c] = ldlt.solve(lin);
      out.cond_cov[c] = M.inverse();
    }
    out.log_weights[c] = log_prior + log_ev;
  }

  const double lmax = out.log_weights.maxCoeff();
  const Eigen::ArrayXd shifted = (out.log_weights.array() - lmax).exp();
  const double z = shifted.sum();
  out.weights = (shifted / z).matrix();
  out.log_weights.array() -= lmax + std::log(z);

  out.h_marginal = Eigen::VectorXd::Zero(n);
  out.hs_marginal = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < configs; ++c) {
    if (out.weights[c] == 0.0) continue;
    int t = 0;
    for (int i = 0; i < n; ++i) {
      if (c >> i & 1) {
        out.h_marginal[i] += out.weights[c];
        out.hs_marginal[i] += out.weights[c] * out.cond_mean[c][t];
        ++t;
      }
    }
  }
  return out;
}

}  // namespace msfl
