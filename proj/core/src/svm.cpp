#include "msfl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "msfl/errors.hpp"
#include "msfl/rng.hpp"

namespace msfl {

double chi2_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw ConfigError("chi2_distance: dimension mismatch");
  double d = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double a = std::max(x[i], 0.0);
    const double b = std::max(y[i], 0.0);
    const double diff = a - b;
    d += diff * diff / (a + b + 1e-10);
  }
  return d;
}

double chi2_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double gamma) {
  if (x.minCoeff() < 0.0 || y.minCoeff() < 0.0)
    log_warn("chi2_kernel: negative feature entries clipped to zero");
  return std::exp(-gamma * chi2_distance(x, y));
}

Eigen::MatrixXd chi2_gram(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          double gamma) {
  if (X.rows() != Y.rows()) throw ConfigError("chi2_gram: dimension mismatch");
  if (X.size() > 0 && X.minCoeff() < 0.0)
    log_warn("chi2_gram: negative feature entries clipped to zero");
  else if (Y.size() > 0 && Y.minCoeff() < 0.0)
    log_warn("chi2_gram: negative feature entries clipped to zero");
  const bool same = &X == &Y;
  Eigen::MatrixXd K(X.cols(), Y.cols());
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    const Eigen::Index j0 = same ? i : 0;
    for (Eigen::Index j = j0; j < Y.cols(); ++j) {
      K(i, j) = std::exp(-gamma * chi2_distance(X.col(i), Y.col(j)));
      if (same && j != i) K(j, i) = K(i, j);
    }
  }
  return K;
}

double chi2_mean_distance(const Eigen::MatrixXd& X, int max_pairs,
                          std::uint64_t seed) {
  const Eigen::Index n = X.cols();
  if (n < 2) return 0.0;
  double sum = 0.0;
  long long count = 0;
  const long long all = static_cast<long long>(n) * (n - 1) / 2;
  if (all <= max_pairs) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        sum += chi2_distance(X.col(i), X.col(j));
        ++count;
      }
  } else {
    Rng rng(seed);
    for (int t = 0; t < max_pairs; ++t) {
      const Eigen::Index i = static_cast<Eigen::Index>(rng.uniform_int(n));
      Eigen::Index j = static_cast<Eigen::Index>(rng.uniform_int(n - 1));
      if (j >= i) ++j;
      sum += chi2_distance(X.col(i), X.col(j));
      ++count;
    }
  }
  return sum / count;
}

// L1-loss dual coordinate descent on the augmented problem (bias as a
// trailing constant-one feature). Returns the augmented weight vector.
static Eigen::VectorXd linear_binary(const Eigen::MatrixXd& Xa,
                                     const std::vector<double>& y, double C,
                                     std::uint64_t seed, int max_epochs) {
  const Eigen::Index n = Xa.cols();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(Xa.rows());
  Eigen::VectorXd qdiag(n);
  for (Eigen::Index i = 0; i < n; ++i) qdiag[i] = Xa.col(i).squaredNorm();

  Rng rng(seed);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  double gap = 0.0;
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    rng.shuffle(order);
    for (const Eigen::Index i : order) {
      const double g = y[i] * w.dot(Xa.col(i)) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] >= C) pg = std::max(g, 0.0);
      if (std::abs(pg) > 1e-12) {
        const double a_new = std::clamp(alpha[i] - g / qdiag[i], 0.0, C);
        w += (a_new - alpha[i]) * y[i] * Xa.col(i);
        alpha[i] = a_new;
      }
    }
    double hinge = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      hinge += std::max(0.0, 1.0 - y[i] * w.dot(Xa.col(i)));
    const double primal = 0.5 * w.squaredNorm() + C * hinge;
    const double dual = alpha.sum() - 0.5 * w.squaredNorm();
    gap = primal - dual;
    if (gap < 1e-4 * std::abs(primal)) return w;
  }
  throw NumericalError("linear svm: no convergence after " +
                       std::to_string(max_epochs) + " epochs, duality gap " +
                       std::to_string(gap));
}

// Maximal-violating-pair SMO over the precomputed Gram matrix. Returns the
// y-signed dual coefficients and writes the midpoint bias.
static Eigen::VectorXd smo_binary(const Eigen::MatrixXd& K,
                                  const std::vector<double>& y, double C,
                                  long long max_steps, double* bias_out) {
  const Eigen::Index n = K.cols();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);  // s_i = y_i alpha_i
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);  // K s
  double violation = 0.0;
  for (long long step = 0; step < max_steps; ++step) {
    Eigen::Index best_i = -1, best_j = -1;
    double fmin = 0.0, fmax = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double f = g[i] - y[i];
      const bool in_up = y[i] > 0 ? s[i] < C - 1e-12 : s[i] < -1e-12;
      const bool in_low = y[i] > 0 ? s[i] > 1e-12 : s[i] > -C + 1e-12;
      if (in_up && (best_i < 0 || f < fmin)) { fmin = f; best_i = i; }
      if (in_low && (best_j < 0 || f > fmax)) { fmax = f; best_j = i; }
    }
    if (best_i < 0 || best_j < 0) {
      violation = 0.0;
      break;
    }
    violation = fmax - fmin;
    if (violation < 1e-3) break;
    if (step + 1 == max_steps)
      throw NumericalError("smo: no convergence, violation " +
                           std::to_string(violation));

    const Eigen::Index i = best_i, j = best_j;
    double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (eta < 1e-12) eta = 1e-12;
    double t = (fmax - fmin) / eta;
    const double up_i = y[i] > 0 ? C : 0.0;
    const double lo_j = y[j] > 0 ? 0.0 : -C;
    t = std::min(t, up_i - s[i]);
    t = std::min(t, s[j] - lo_j);
    s[i] += t;
    s[j] -= t;
    g += t * (K.col(i) - K.col(j));
  }

  // Midpoint bias between the active bounds.
  double fmin = std::numeric_limits<double>::infinity();
  double fmax = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double f = g[i] - y[i];
    const bool in_up = y[i] > 0 ? s[i] < C - 1e-12 : s[i] < -1e-12;
    const bool in_low = y[i] > 0 ? s[i] > 1e-12 : s[i] > -C + 1e-12;
    if (in_up) fmin = std::min(fmin, f);
    if (in_low) fmax = std::max(fmax, f);
  }
  if (std::isfinite(fmin) && std::isfinite(fmax))
    *bias_out = -(fmin + fmax) / 2.0;
  else
    *bias_out = 0.0;
  return s;
}

SVMModel svm_train(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                   const SVMTrainConfig& cfg) {
  const Eigen::Index n = X.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw ConfigError("svm_train: label count mismatch");
  if (!X.allFinite()) throw ConfigError("svm_train: non-finite features");
  int k = 0;
  for (const int label : labels) {
    if (label < 0) throw ConfigError("svm_train: negative label");
    k = std::max(k, label + 1);
  }
  if (k < 2) throw ConfigError("svm_train: need at least 2 classes");
  std::vector<int> support_count(k, 0);
  for (const int label : labels) ++support_count[label];
  for (int c = 0; c < k; ++c)
    if (support_count[c] == 0)
      throw ConfigError("svm_train: class " + std::to_string(c) +
                        " has no samples; labels must cover 0..k-1");

  SVMModel m;
  m.kind = cfg.kind;
  m.n_classes = k;
  m.C = cfg.C;

  if (cfg.kind == SVMKind::Knn3) {
    m.support = X;
    m.support_labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) m.support_labels[i] = labels[i];
    return m;
  }

  if (cfg.kind == SVMKind::Linear) {
    Eigen::MatrixXd Xa(X.rows() + 1, n);
    Xa.topRows(X.rows()) = X;
    Xa.row(X.rows()).setOnes();
    m.W.resize(X.rows() + 1, k);
    std::vector<double> y(n);
    for (int c = 0; c < k; ++c) {
      for (Eigen::Index i = 0; i < n; ++i)
        y[i] = labels[i] == c ? 1.0 : -1.0;
      m.W.col(c) = linear_binary(Xa, y, cfg.C, cfg.seed, cfg.max_epochs);
    }
    return m;
  }

  m.gamma = cfg.gamma;
  if (m.gamma <= 0.0) {
    const double mean = chi2_mean_distance(X, 10000, cfg.seed);
    m.gamma = mean > 1e-12 ? 1.0 / mean : 1.0;
  }
  const Eigen::MatrixXd K = chi2_gram(X, X, m.gamma);
  Eigen::MatrixXd dual(n, k);
  m.bias.resize(k);
  std::vector<double> y(n);
  for (int c = 0; c < k; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[i] == c ? 1.0 : -1.0;
    double b = 0.0;
    dual.col(c) = smo_binary(K, y, cfg.C, cfg.max_smo_steps, &b);
    m.bias[c] = b;
  }

  // Keep only the training columns some class actually references.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (dual.row(i).cwiseAbs().maxCoeff() > 1e-12) keep.push_back(i);
  m.support.resize(X.rows(), static_cast<Eigen::Index>(keep.size()));
  m.dual.resize(static_cast<Eigen::Index>(keep.size()), k);
  for (std::size_t t = 0; t < keep.size(); ++t) {
    m.support.col(static_cast<Eigen::Index>(t)) = X.col(keep[t]);
    m.dual.row(static_cast<Eigen::Index>(t)) = dual.row(keep[t]);
  }
  return m;
}

Eigen::VectorXd svm_decision(const SVMModel& m, const Eigen::VectorXd& x) {
  switch (m.kind) {
    case SVMKind::Linear: {
      if (x.size() + 1 != m.W.rows())
        throw ConfigError("svm_decision: feature dimension mismatch");
      Eigen::VectorXd xa(x.size() + 1);
      xa << x, 1.0;
      return m.W.transpose() * xa;
    }
    case SVMKind::ExpChi2: {
      Eigen::VectorXd kx(m.support.cols());
      for (Eigen::Index i = 0; i < m.support.cols(); ++i)
        kx[i] = std::exp(-m.gamma * chi2_distance(m.support.col(i), x));
      return m.dual.transpose() * kx + m.bias;
    }
    case SVMKind::Knn3: {
      const Eigen::Index n = m.support.cols();
      std::vector<std::pair<double, Eigen::Index>> dist(n);
      for (Eigen::Index i = 0; i < n; ++i)
        dist[i] = {chi2_distance(m.support.col(i), x), i};
      const Eigen::Index kn = std::min<Eigen::Index>(3, n);
      std::partial_sort(dist.begin(), dist.begin() + kn, dist.end());
      Eigen::VectorXd votes = Eigen::VectorXd::Zero(m.n_classes);
      for (Eigen::Index t = 0; t < kn; ++t)
        votes[m.support_labels[dist[t].second]] += 1.0;
      return votes;
    }
  }
  throw ConfigError("svm_decision: bad model kind");
}

int svm_predict(const SVMModel& m, const Eigen::VectorXd& x) {
  const Eigen::VectorXd scores = svm_decision(m, x);
  int best = 0;
  for (int c = 1; c < m.n_classes; ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

EvalResult evaluate(const SVMModel& m, const Eigen::MatrixXd& X,
                    const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != X.cols())
    throw ConfigError("evaluate: label count mismatch");
  EvalResult res;
  res.confusion = Eigen::MatrixXi::Zero(m.n_classes, m.n_classes);
  int correct = 0;
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    const int pred = svm_predict(m, X.col(i));
    const int truth = labels[i];
    if (truth < 0 || truth >= m.n_classes)
      throw ConfigError("evaluate: label " + std::to_string(truth) +
                        " outside the model's class range");
    res.confusion(truth, pred) += 1;
    if (pred == truth) ++correct;
  }
  res.accuracy = X.cols() > 0 ? static_cast<double>(correct) / X.cols() : 0.0;
  return res;
}

}  // namespace msfl
