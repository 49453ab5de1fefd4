#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace msfl {

// Spike-and-slab coding model. Columns of W have unit norm; alpha holds the
// slab precisions, beta the visible precisions (all entries equal unless
// learned with diagonal_beta).
struct S3CParams {
  Eigen::MatrixXd W;      // D x N
  Eigen::VectorXd b;      // N spike biases
  Eigen::VectorXd mu;     // N slab means
  Eigen::VectorXd alpha;  // N slab precisions
  Eigen::VectorXd beta;   // D visible precisions

  int input_dim() const { return static_cast<int>(W.rows()); }
  int dict_size() const { return static_cast<int>(W.cols()); }
};

// Factorial posterior approximation: Q(h_j) = Bernoulli(hhat_j),
// Q(s_j | h_j=1) = N(shat_j, tau_j), Q(s_j | h_j=0) pinned at the prior.
struct VariationalState {
  Eigen::VectorXd hhat;
  Eigen::VectorXd shat;
  Eigen::VectorXd tau;
};

struct S3CLearnConfig {
  int dict_size = 64;
  int epochs = 10;
  int batch_size = 100;
  double damping = 0.9;       // retained fraction of the old params per minibatch
  int estep_sweeps = 50;
  double estep_tol = 1e-5;
  bool diagonal_beta = false;
  std::uint64_t seed = 0;
};

struct S3CLearnResult {
  S3CParams params;
  std::vector<double> free_energy_trace;  // mean post-E-step free energy per epoch
};

S3CParams s3c_init(int dim, int dict_size, std::uint64_t seed);

// Variational free energy of state st at input v: expected negative complete
// log-likelihood minus the entropy of Q. Upper-bounds -log p(v).
double free_energy(const S3CParams& p, const Eigen::VectorXd& v,
                   const VariationalState& st);

// Coordinate-descent mean-field inference. Every unit update is the exact
// minimizer of the free energy over that unit's block, so the free energy
// is non-increasing after every sweep. Warm-starts from *init when given;
// appends the post-sweep free energy to *fe_trace when given.
VariationalState e_step(const S3CParams& p, const Eigen::VectorXd& v,
                        int max_sweeps = 50, double tol = 1e-5,
                        const VariationalState* init = nullptr,
                        std::vector<double>* fe_trace = nullptr);

// Closed-form parameter update from a batch of inputs (columns of V) and
// their variational states. Columns of W are renormalized to unit norm with
// the compensating rescale of mu, alpha and the states, which leaves the
// free energy unchanged; the states are transformed in place so a follow-up
// e_step can warm-start from them.
S3CParams m_step(const S3CParams& p, const Eigen::MatrixXd& V,
                 std::vector<VariationalState>& states,
                 bool diagonal_beta = false);

// Minibatch EM with damped parameter updates. Columns of X are samples.
S3CLearnResult s3c_learn(const Eigen::MatrixXd& X, const S3CLearnConfig& cfg);

enum class S3CCode { Spike, SpikeSlab };

// Runs inference and reads out the code: spike marginals hhat by default,
// hhat .* shat in SpikeSlab mode.
Eigen::VectorXd s3c_encode(const S3CParams& p, const Eigen::VectorXd& v,
                           S3CCode mode = S3CCode::Spike,
                           int max_sweeps = 50, double tol = 1e-5);

double stable_sigmoid(double x);
double log1pexp(double x);

}  // namespace msfl
