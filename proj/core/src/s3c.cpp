#include "msfl/s3c.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "msfl/errors.hpp"
#include "msfl/rng.hpp"

namespace msfl {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log1pexp(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

static double xlogx(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return x * std::log(x);
}

static void check_s3c_shapes(const S3CParams& p, const Eigen::VectorXd& v) {
  if (v.size() != p.W.rows())
    throw ConfigError("s3c: input dimension " + std::to_string(v.size()) +
                      " does not match model dimension " +
                      std::to_string(p.W.rows()));
}

S3CParams s3c_init(int dim, int dict_size, std::uint64_t seed) {
  if (dim < 1 || dict_size < 1)
    throw ConfigError("s3c_init: dimensions must be positive");
  Rng rng(seed);
  S3CParams p;
  p.W.resize(dim, dict_size);
  for (int j = 0; j < dict_size; ++j) {
    for (int d = 0; d < dim; ++d) p.W(d, j) = rng.normal();
    const double n = p.W.col(j).norm();
    if (n > 0) p.W.col(j) /= n;
    else p.W(0, j) = 1.0;
  }
  p.b = Eigen::VectorXd::Constant(dict_size, -1.0);
  p.mu = Eigen::VectorXd::Ones(dict_size);
  p.alpha = Eigen::VectorXd::Ones(dict_size);
  p.beta = Eigen::VectorXd::Constant(dim, 10.0);
  return p;
}

// Sum over d of beta_d W_dj^2, per column.
static Eigen::VectorXd column_energies(const S3CParams& p) {
  return (p.W.array().square().colwise() * p.beta.array())
      .colwise()
      .sum()
      .transpose();
}

double free_energy(const S3CParams& p, const Eigen::VectorXd& v,
                   const VariationalState& st) {
  check_s3c_shapes(p, v);
  const int n = p.dict_size();
  const Eigen::VectorXd wtilde = column_energies(p);
  const Eigen::VectorXd rho = st.hhat.cwiseProduct(st.shat);
  const Eigen::VectorXd resid = v - p.W * rho;

  double f = 0.5 * resid.cwiseProduct(p.beta.asDiagonal() * resid).sum();
  f -= 0.5 * p.beta.array().log().sum();
  f += 0.5 * v.size() * std::log(2.0 * M_PI);

  for (int j = 0; j < n; ++j) {
    const double h = st.hhat[j];
    const double s = st.shat[j];
    const double t = st.tau[j];
    const double var = h * (s * s + t) - h * h * s * s;
    f += 0.5 * wtilde[j] * var;
    const double d = s - p.mu[j];
    f += h * (0.5 * p.alpha[j] * (d * d + t) -
              0.5 * std::log(p.alpha[j] * t) - 0.5);
    f += xlogx(h) + xlogx(1.0 - h) - h * p.b[j] + log1pexp(p.b[j]);
  }
  return f;
}

VariationalState e_step(const S3CParams& p, const Eigen::VectorXd& v,
                        int max_sweeps, double tol,
                        const VariationalState* init,
                        std::vector<double>* fe_trace) {
  check_s3c_shapes(p, v);
  const int n = p.dict_size();
  const Eigen::VectorXd wtilde = column_energies(p);
  const Eigen::VectorXd tau =
      (p.alpha + wtilde).cwiseInverse();

  VariationalState st;
  st.tau = tau;
  if (init) {
    st.hhat = init->hhat;
    st.shat = init->shat;
  } else {
    st.hhat = p.b.unaryExpr([](double x) { return stable_sigmoid(x); });
    st.shat = p.mu;
  }

  // Columns of W pre-scaled by the visible precisions, so a residual dot
  // product gives W_j' diag(beta) r directly.
  const Eigen::MatrixXd Wb = p.W.array().colwise() * p.beta.array();
  Eigen::VectorXd rho = st.hhat.cwiseProduct(st.shat);
  Eigen::VectorXd r = v - p.W * rho;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (sweep > 0) r = v - p.W * rho;  // shed incremental drift
    double delta = 0.0;
    for (int j = 0; j < n; ++j) {
      const double dot = Wb.col(j).dot(r) + wtilde[j] * rho[j];
      const double a = p.alpha[j];
      const double m = p.mu[j];
      const double t = tau[j];
      const double s = t * (a * m + dot);
      const double z = p.b[j] + s * dot -
                       0.5 * (wtilde[j] + a) * (s * s + t) + a * m * s -
                       0.5 * a * m * m + 0.5 + 0.5 * std::log(a * t);
      const double h = stable_sigmoid(z);
      if (!std::isfinite(h) || !std::isfinite(s))
        throw NumericalError("e_step: non-finite state at unit " +
                             std::to_string(j));
      const double rho_new = h * s;
      delta = std::max({delta, std::abs(h - st.hhat[j]),
                        std::abs(rho_new - rho[j])});
      r -= p.W.col(j) * (rho_new - rho[j]);
      st.hhat[j] = h;
      st.shat[j] = s;
      rho[j] = rho_new;
    }
    if (fe_trace) fe_trace->push_back(free_energy(p, v, st));
    if (delta < tol) break;
  }
  return st;
}

S3CParams m_step(const S3CParams& p, const Eigen::MatrixXd& V,
                 std::vector<VariationalState>& states, bool diagonal_beta) {
  const int n = static_cast<int>(V.cols());
  const int dim = p.input_dim();
  const int k = p.dict_size();
  if (n == 0) throw ConfigError("m_step: empty batch");
  if (static_cast<int>(states.size()) != n)
    throw ConfigError("m_step: batch/state count mismatch");

  Eigen::MatrixXd P(k, n);    // code means h .* s per sample
  Eigen::MatrixXd Var(k, n);  // per-unit variance of h*s under Q
  for (int i = 0; i < n; ++i) {
    const VariationalState& st = states[i];
    for (int j = 0; j < k; ++j) {
      const double h = st.hhat[j];
      const double s = st.shat[j];
      P(j, i) = h * s;
      Var(j, i) = h * (s * s + st.tau[j]) - h * h * s * s;
    }
  }

  // W minimizes the expected reconstruction error: W A = C with
  // A = sum_i (rho rho' + diag(var)), C = sum_i v rho'.
  Eigen::MatrixXd A = P * P.transpose();
  A.diagonal() += Var.rowwise().sum();
  const Eigen::MatrixXd C = V * P.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  const double dmax = ldlt.vectorD().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success ||
      ldlt.vectorD().minCoeff() <= 1e-10 * std::max(1.0, dmax)) {
    log_warn("m_step: near-singular code statistics, adding ridge");
    A.diagonal().array() += 1e-6;
    ldlt.compute(A);
  }

  S3CParams out = p;
  out.W = ldlt.solve(C.transpose()).transpose();

  // Renormalize columns; the compensating rescale of mu, alpha and the
  // states leaves the model distribution and the free energy unchanged.
  for (int j = 0; j < k; ++j) {
    const double nj = out.W.col(j).norm();
    if (nj < 1e-12) {
      out.W.col(j) = p.W.col(j);
      continue;
    }
    out.W.col(j) /= nj;
    out.mu[j] *= nj;
    out.alpha[j] /= nj * nj;
    for (int i = 0; i < n; ++i) {
      states[i].shat[j] *= nj;
      states[i].tau[j] *= nj * nj;
      P(j, i) *= nj;
      Var(j, i) *= nj * nj;
    }
  }

  Eigen::VectorXd h_sum = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd hs_sum = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < n; ++i) {
    h_sum += states[i].hhat;
    hs_sum += states[i].hhat.cwiseProduct(states[i].shat);
  }
  for (int j = 0; j < k; ++j) {
    const double m = std::clamp(h_sum[j] / n, 1e-7, 1.0 - 1e-7);
    out.b[j] = std::log(m / (1.0 - m));
    if (h_sum[j] > 1e-12) out.mu[j] = hs_sum[j] / h_sum[j];
    double denom = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = states[i].shat[j] - out.mu[j];
      denom += states[i].hhat[j] * (d * d + states[i].tau[j]);
    }
    if (h_sum[j] > 1e-12 && denom > 1e-300)
      out.alpha[j] = std::min(h_sum[j] / denom, 1e12);
  }

  // Visible precisions from the expected residual power; unit columns make
  // the variance correction just the summed code variances.
  const Eigen::MatrixXd resid = V - out.W * P;
  if (diagonal_beta) {
    const Eigen::VectorXd varsum = Var.rowwise().sum();
    const Eigen::VectorXd w2v = out.W.array().square().matrix() * varsum;
    for (int d = 0; d < dim; ++d) {
      const double r = resid.row(d).squaredNorm() + w2v[d];
      out.beta[d] = r > 1e-300 ? std::min(n / r, 1e12) : 1e12;
    }
  } else {
    const double r = resid.squaredNorm() + Var.sum();
    const double bval =
        r > 1e-300 ? std::min(static_cast<double>(n) * dim / r, 1e12) : 1e12;
    out.beta.setConstant(bval);
  }
  return out;
}

S3CLearnResult s3c_learn(const Eigen::MatrixXd& X, const S3CLearnConfig& cfg) {
  const int dim = static_cast<int>(X.rows());
  const int n = static_cast<int>(X.cols());
  if (n == 0) throw ConfigError("s3c_learn: no samples");
  if (cfg.damping < 0.0 || cfg.damping >= 1.0)
    throw ConfigError("s3c_learn: damping must be in [0,1)");

  Rng rng(cfg.seed);
  S3CLearnResult res;
  res.params = s3c_init(dim, cfg.dict_size, rng.next_u64());
  S3CParams& p = res.params;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int bs = std::min(cfg.batch_size, n);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double fe_sum = 0.0;
    int fe_count = 0;
    for (int start = 0; start + bs <= n; start += bs) {
      Eigen::MatrixXd V(dim, bs);
      std::vector<VariationalState> states(bs);
      for (int c = 0; c < bs; ++c) {
        V.col(c) = X.col(order[start + c]);
        states[c] = e_step(p, V.col(c), cfg.estep_sweeps, cfg.estep_tol);
        fe_sum += free_energy(p, V.col(c), states[c]);
        ++fe_count;
      }
      const S3CParams fresh = m_step(p, V, states, cfg.diagonal_beta);
      const double keep = cfg.damping, take = 1.0 - cfg.damping;
      p.W = keep * p.W + take * fresh.W;
      for (int j = 0; j < cfg.dict_size; ++j) {
        const double nj = p.W.col(j).norm();
        if (nj > 1e-12) p.W.col(j) /= nj;
        else p.W.col(j) = fresh.W.col(j);
      }
      p.b = keep * p.b + take * fresh.b;
      p.mu = keep * p.mu + take * fresh.mu;
      p.alpha = keep * p.alpha + take * fresh.alpha;
      p.beta = keep * p.beta + take * fresh.beta;
    }
    res.free_energy_trace.push_back(fe_sum / std::max(fe_count, 1));
  }
  return res;
}

Eigen::VectorXd s3c_encode(const S3CParams& p, const Eigen::VectorXd& v,
                           S3CCode mode, int max_sweeps, double tol) {
  const VariationalState st = e_step(p, v, max_sweeps, tol);
  if (mode == S3CCode::SpikeSlab) return st.hhat.cwiseProduct(st.shat);
  return st.hhat;
}

}  // namespace msfl
