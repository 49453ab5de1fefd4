#pragma once

#include <Eigen/Core>
#include <vector>

#include "msfl/s3c.hpp"

namespace msfl {

// Exact posterior over all 2^N spike configurations, tractable for N <= 12.
// Configuration index c encodes h via its bits: h_i = (c >> i) & 1. The
// slab conditional for configuration c covers the active units in ascending
// index order.
struct PosteriorExact {
  Eigen::VectorXd weights;      // p(h | v), sums to 1
  Eigen::VectorXd log_weights;
  std::vector<Eigen::VectorXd> cond_mean;  // E[s_A | h, v]
  std::vector<Eigen::MatrixXd> cond_cov;   // Cov[s_A | h, v]
  Eigen::VectorXd h_marginal;   // E[h_i | v]
  Eigen::VectorXd hs_marginal;  // E[h_i s_i | v]
};

// Enumerates every spike configuration, scoring it by the closed-form
// Gaussian evidence p(v | h) with the slab integrated out. Throws
// ConfigError for N > 12.
PosteriorExact exact_posterior(const S3CParams& p, const Eigen::VectorXd& v);

}  // namespace msfl
