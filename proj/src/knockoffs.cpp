#include "neucept/knockoffs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "neucept/rng.hpp"

namespace neucept {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
  Eigen::Index n = x.rows();
  if (n < 2) throw DataError("sample covariance needs >= 2 rows");
  Eigen::RowVectorXd mu = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mu;
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

MomentEstimate estimate_moments(const Eigen::MatrixXd& x, double alpha) {
  if (!x.allFinite()) throw DataError("non-finite input to moment estimation");
  if (x.rows() < 2) throw DataError("moment estimation needs >= 2 rows");
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0,1]");

  MomentEstimate m;
  m.mu = x.colwise().mean();
  Eigen::MatrixXd s = sample_covariance(x);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(s.rows(), s.cols());

  double a = alpha;
  for (;;) {
    m.sigma = (1.0 - a) * s + a * eye;
    m.sigma = 0.5 * (m.sigma + m.sigma.transpose().eval());
    if (min_eigenvalue(m.sigma) >= 1e-6 || a >= 1.0) break;
    a = std::min(1.0, a + 0.1);
  }
  if (min_eigenvalue(m.sigma) <= 0.0)
    throw NumericalError("covariance not positive definite even at full shrinkage");
  m.shrinkage_alpha = a;
  return m;
}

Eigen::VectorXd solve_equi_s(const Eigen::MatrixXd& sigma) {
  double lmin = min_eigenvalue(sigma);
  if (lmin <= 0.0) throw NumericalError("solve_equi_s: covariance not positive definite");
  Eigen::Index p = sigma.rows();
  double sval = std::min(2.0 * lmin, 1.0);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(p, sval);

  // joint covariance [[S, S-D],[S-D, S]] is PSD iff 2S - D is PSD;
  // back off at machine precision if the equality case lands negative
  for (int tries = 0; tries < 64; ++tries) {
    Eigen::MatrixXd check = 2.0 * sigma;
    check.diagonal() -= s;
    if (min_eigenvalue(check) >= -1e-10) break;
    s *= 1.0 - 1e-6;
  }
  return s;
}

KnockoffModel build_knockoff_model(const MomentEstimate& moments,
                                   const Eigen::VectorXd& s) {
  Eigen::Index p = moments.sigma.rows();
  if (s.size() != p) throw DataError("s dimension mismatch");
  if (s.minCoeff() < 0.0) throw NumericalError("negative knockoff diagonal");

  KnockoffModel model;
  model.moments = moments;
  model.s = s;

  Eigen::LLT<Eigen::MatrixXd> llt(moments.sigma);
  if (llt.info() != Eigen::Success)
    throw NumericalError("Cholesky of sigma failed: not positive definite");
  // diag(s) Sigma^-1 = (Sigma^-1 diag(s))^T; Sigma symmetric
  Eigen::MatrixXd sigma_inv_s = llt.solve(Eigen::MatrixXd(s.asDiagonal()));
  model.cond_mean_mult = sigma_inv_s.transpose();

  Eigen::MatrixXd cond_cov = -Eigen::MatrixXd(s.asDiagonal()) * sigma_inv_s;
  cond_cov.diagonal() += 2.0 * s;
  cond_cov = 0.5 * (cond_cov + cond_cov.transpose().eval());

  Eigen::LLT<Eigen::MatrixXd> cllt(cond_cov);
  if (cllt.info() == Eigen::Success) {
    model.cond_cov_factor = cllt.matrixL();
  } else {
    // semidefinite case (e.g. s = 0): eigenvalue-clipped square root
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cond_cov);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < -1e-8)
      throw NumericalError("conditional covariance not positive semidefinite");
    Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    model.cond_cov_factor = es.eigenvectors() * root.asDiagonal();
  }
  return model;
}

Eigen::MatrixXd sample_knockoffs(const KnockoffModel& model, const Eigen::MatrixXd& x,
                                 std::uint64_t seed) {
  Eigen::Index p = model.moments.mu.size();
  if (x.cols() != p) throw DataError("sample_knockoffs: dimension mismatch");

  Eigen::MatrixXd xt(x.rows(), p);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < p; ++j) z[j] = rng.gauss();
    Eigen::VectorXd centered = x.row(i).transpose() - model.moments.mu;
    xt.row(i) = (x.row(i).transpose() - model.cond_mean_mult * centered +
                 model.cond_cov_factor * z)
                    .transpose();
  }
  return xt;
}

}  // namespace neucept
