#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "neucept/errors.hpp"

namespace neucept {

// Estimated second-order moments, shrunk toward the identity until
// positive definite.
struct MomentEstimate {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  double shrinkage_alpha = 0.0;
};

// Precomputed factors for the Gaussian conditional knockoff law
//   xt | x ~ N(x - cond_mean_mult (x - mu), cond_cov)
// with cond_mean_mult = diag(s) Sigma^-1 and
// cond_cov = 2 diag(s) - diag(s) Sigma^-1 diag(s).
// cond_cov_factor F satisfies F F^T = cond_cov (Cholesky when the
// conditional covariance is strictly PD, eigenvalue-clipped square root
// in the semidefinite case, e.g. s = 0).
struct KnockoffModel {
  MomentEstimate moments;
  Eigen::VectorXd s;
  Eigen::MatrixXd cond_mean_mult;
  Eigen::MatrixXd cond_cov_factor;
};

// n-1 denominator sample covariance
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x);

// sigma = (1-alpha) S + alpha I; alpha escalates in steps of 0.1 until
// the minimum eigenvalue reaches 1e-6.
MomentEstimate estimate_moments(const Eigen::MatrixXd& x, double alpha);

// Equicorrelated construction on a unit-diagonal covariance:
// s_j = min(2 lambda_min, 1), scaled down if the joint PSD check fails
// at machine precision.
Eigen::VectorXd solve_equi_s(const Eigen::MatrixXd& sigma);

KnockoffModel build_knockoff_model(const MomentEstimate& moments,
                                   const Eigen::VectorXd& s);

// Row-wise independent draws from the conditional law; row i uses the
// derived stream (seed, i), so results do not depend on scheduling.
Eigen::MatrixXd sample_knockoffs(const KnockoffModel& model,
                                 const Eigen::MatrixXd& x, std::uint64_t seed);

}  // namespace neucept
