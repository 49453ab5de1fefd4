#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace msfl {

struct KMeansDict {
  Eigen::MatrixXd centers;  // D x N, one center per column
  int n_atoms() const { return static_cast<int>(centers.cols()); }
};

struct KMeansResult {
  KMeansDict dict;
  std::vector<double> wcss_trace;  // within-cluster sum of squares per iteration
};

// Lloyd's algorithm from k-means++ seeding. Columns of X are samples.
// Empty clusters are reseeded to the point farthest from its center.
KMeansResult kmeans_learn(const Eigen::MatrixXd& X, int n_centers, int iters,
                          std::uint64_t seed);

// Triangle activation: s_j = max(0, mean_dist - dist_j). With hard = true,
// one-hot at the nearest center instead.
Eigen::VectorXd kmeans_encode(const KMeansDict& dict, const Eigen::VectorXd& v,
                              bool hard = false);

}  // namespace msfl
