#include <doctest.h>

#include <vector>

#include "helpers.hpp"
#include "msfl/errors.hpp"
#include "msfl/kmeans.hpp"

using namespace msfl;

namespace {

// Three well-separated clusters in 8 dimensions.
Eigen::MatrixXd clustered_data(Eigen::MatrixXd* true_centers, Rng& rng) {
  const int dim = 8;
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(dim, 3);
  centers(0, 0) = 5.0;
  centers(1, 1) = 5.0;
  centers(2, 2) = -5.0;
  Eigen::MatrixXd X(dim, 300);
  for (int i = 0; i < 300; ++i)
    X.col(i) = centers.col(i % 3) + 0.3 * test::random_normal_vector(dim, rng);
  if (true_centers) *true_centers = centers;
  return X;
}

}  // namespace

TEST_SUITE("kmeans") {

TEST_CASE("planted clusters are recovered") {
  Rng rng(21);
  Eigen::MatrixXd truth;
  const Eigen::MatrixXd X = clustered_data(&truth, rng);
  const KMeansResult res = kmeans_learn(X, 3, 25, 1);
  REQUIRE(res.dict.centers.cols() == 3);
  for (int t = 0; t < 3; ++t) {
    double best = 1e100;
    for (int j = 0; j < 3; ++j)
      best = std::min(best, (res.dict.centers.col(j) - truth.col(t)).norm());
    CHECK(best < 0.2);
  }
}

TEST_CASE("within-cluster sum of squares never increases") {
  Rng rng(22);
  Eigen::MatrixXd X(6, 200);
  for (int c = 0; c < 200; ++c) X.col(c) = test::random_normal_vector(6, rng);
  const KMeansResult res = kmeans_learn(X, 12, 20, 3);
  for (std::size_t i = 1; i < res.wcss_trace.size(); ++i)
    CHECK(res.wcss_trace[i] <= res.wcss_trace[i - 1] + 1e-9);
}

TEST_CASE("learning is deterministic in the seed") {
  Rng rng(23);
  Eigen::MatrixXd X(5, 60);
  for (int c = 0; c < 60; ++c) X.col(c) = test::random_normal_vector(5, rng);
  const KMeansResult a = kmeans_learn(X, 8, 10, 42);
  const KMeansResult b = kmeans_learn(X, 8, 10, 42);
  CHECK(a.dict.centers == b.dict.centers);
}

TEST_CASE("more centers than points is rejected") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(4, 5);
  CHECK_THROWS_AS(kmeans_learn(X, 6, 5, 0), ConfigError);
}

TEST_CASE("hard encoding is one-hot at the nearest center") {
  Rng rng(24);
  KMeansDict dict;
  dict.centers = Eigen::MatrixXd(2, 3);
  dict.centers << 0, 4, 0, 0, 0, 4;
  Eigen::VectorXd v(2);
  v << 3.0, 0.5;
  const Eigen::VectorXd code = kmeans_encode(dict, v, true);
  CHECK(code[0] == 0.0);
  CHECK(code[1] == 1.0);
  CHECK(code[2] == 0.0);
}

TEST_CASE("triangle encoding matches its formula") {
  KMeansDict dict;
  dict.centers = Eigen::MatrixXd(2, 3);
  dict.centers << 0, 4, 0, 0, 0, 4;
  Eigen::VectorXd v(2);
  v << 1.0, 1.0;
  const Eigen::VectorXd code = kmeans_encode(dict, v);
  Eigen::VectorXd dist(3);
  for (int j = 0; j < 3; ++j) dist[j] = (v - dict.centers.col(j)).norm();
  const double mean = dist.mean();
  for (int j = 0; j < 3; ++j)
    CHECK(code[j] == doctest::Approx(std::max(0.0, mean - dist[j])).epsilon(1e-12));
}

}  // TEST_SUITE
