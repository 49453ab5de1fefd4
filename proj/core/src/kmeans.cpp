#include "msfl/kmeans.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "msfl/errors.hpp"
#include "msfl/rng.hpp"

namespace msfl {

namespace {

double sq_dist(const Eigen::MatrixXd& X, Eigen::Index i,
               const Eigen::MatrixXd& C, Eigen::Index j) {
  return (X.col(i) - C.col(j)).squaredNorm();
}

}  // namespace

KMeansResult kmeans_learn(const Eigen::MatrixXd& X, int n_centers, int iters,
                          std::uint64_t seed) {
  const Eigen::Index n = X.cols();
  if (n < n_centers) {
    throw ConfigError("kmeans_learn: " + std::to_string(n) +
                      " samples < " + std::to_string(n_centers) + " centers");
  }
  if (iters < 1) throw ConfigError("kmeans_learn: iters must be >= 1");

  Rng rng(seed);
  Eigen::MatrixXd C(X.rows(), n_centers);

  // k-means++ seeding
  C.col(0) = X.col(rng.uniform_int(n));
  Eigen::VectorXd d2 = (X.colwise() - C.col(0)).colwise().squaredNorm();
  for (int j = 1; j < n_centers; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.uniform_int(n));
    }
    C.col(j) = X.col(pick);
    d2 = d2.cwiseMin((X.colwise() - C.col(j)).colwise().squaredNorm().transpose());
  }

  std::vector<int> assign(n, -1);
  std::vector<double> adist(n, 0.0);
  KMeansResult res;

  for (int it = 0; it < iters; ++it) {
    // assignment
    bool changed = false;
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double bestd = sq_dist(X, i, C, 0);
      for (int j = 1; j < n_centers; ++j) {
        const double d = sq_dist(X, i, C, j);
        if (d < bestd) {
          bestd = d;
          best = j;
        }
      }
      if (assign[i] != best) changed = true;
      assign[i] = best;
      adist[i] = bestd;
      wcss += bestd;
    }
    res.wcss_trace.push_back(wcss);
    if (!changed && it > 0) break;

    // update
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(X.rows(), n_centers);
    std::vector<int> counts(n_centers, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.col(assign[i]) += X.col(i);
      counts[assign[i]]++;
    }
    std::vector<bool> taken(n, false);
    for (int j = 0; j < n_centers; ++j) {
      if (counts[j] > 0) {
        C.col(j) = sums.col(j) / counts[j];
      } else {
        // reseed to the farthest point not already claimed
        Eigen::Index far = -1;
        double fard = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (!taken[i] && adist[i] > fard) {
            fard = adist[i];
            far = i;
          }
        }
        if (far >= 0) {
          C.col(j) = X.col(far);
          taken[far] = true;
        }
      }
    }
  }

  res.dict.centers = std::move(C);
  return res;
}

Eigen::VectorXd kmeans_encode(const KMeansDict& dict, const Eigen::VectorXd& v,
                              bool hard) {
  if (v.size() != dict.centers.rows())
    throw ConfigError("kmeans_encode: dimension mismatch");
  const int k = dict.n_atoms();
  Eigen::VectorXd dist(k);
  for (int j = 0; j < k; ++j)
    dist[j] = (v - dict.centers.col(j)).norm();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(k);
  if (hard) {
    Eigen::Index best;
    dist.minCoeff(&best);
    s[best] = 1.0;
  } else {
    const double mean = dist.mean();
    s = (mean - dist.array()).max(0.0);
  }
  return s;
}

}  // namespace msfl
