#include "neucept/selection.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "neucept/rng.hpp"

namespace neucept {

std::string to_string(Statistic s) {
  return s == Statistic::marginal_corr ? "marginal_corr" : "lasso_cd";
}

Statistic statistic_from_string(const std::string& s) {
  if (s == "marginal_corr" || s == "marginal") return Statistic::marginal_corr;
  if (s == "lasso_cd" || s == "lasso") return Statistic::lasso_cd;
  throw ConfigError("unknown statistic: " + s);
}

namespace {

double abs_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& yc, double y_norm) {
  double am = a.mean();
  Eigen::VectorXd ac = a.array() - am;
  double an = ac.norm();
  if (an < 1e-300) return 0.0;
  return std::abs(ac.dot(yc)) / (an * y_norm);
}

}  // namespace

KnockoffStatistics statistic_marginal(const Eigen::MatrixXd& x,
                                      const Eigen::MatrixXd& xt,
                                      const Eigen::VectorXd& y) {
  if (x.cols() != xt.cols() || x.rows() != xt.rows() || x.rows() != y.size())
    throw DataError("statistic_marginal: dimension mismatch");
  Eigen::VectorXd yc = y.array() - y.mean();
  double y_norm = yc.norm();
  if (y_norm < 1e-300) throw DataError("zero-variance response");

  Eigen::Index p = x.cols();
  KnockoffStatistics st;
  st.method = Statistic::marginal_corr;
  st.u.resize(p);
  st.u_tilde.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    st.u[j] = abs_corr(x.col(j), yc, y_norm);
    st.u_tilde[j] = abs_corr(xt.col(j), yc, y_norm);
  }
  st.w = st.u - st.u_tilde;
  return st;
}

KnockoffStatistics statistic_lasso(const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& xt,
                                   const Eigen::VectorXd& y,
                                   const LassoParams& params) {
  if (x.cols() != xt.cols() || x.rows() != xt.rows() || x.rows() != y.size())
    throw DataError("statistic_lasso: dimension mismatch");
  Eigen::VectorXd yc = y.array() - y.mean();
  if (yc.norm() < 1e-300) throw DataError("zero-variance response");

  Eigen::Index n = x.rows(), p = x.cols();
  Eigen::MatrixXd design(n, 2 * p);
  design.leftCols(p) = x;
  design.rightCols(p) = xt;

  double dn = static_cast<double>(n);
  Eigen::VectorXd col_norm_sq(2 * p);
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < 2 * p; ++j) {
    col_norm_sq[j] = design.col(j).squaredNorm() / dn;
    lambda_max = std::max(lambda_max, std::abs(design.col(j).dot(yc)) / dn);
  }
  double lambda = params.lambda_factor * lambda_max;

  // minimize (1/2n)||y - Xb||^2 + lambda ||b||_1 by cyclic coordinate descent
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(2 * p);
  Eigen::VectorXd resid = yc;
  bool converged = (lambda_max == 0.0);
  if (!converged) {
    for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
      double max_delta = 0.0;
      for (Eigen::Index j = 0; j < 2 * p; ++j) {
        if (col_norm_sq[j] < 1e-300) continue;  // dead column stays 0
        double old = beta[j];
        double g = design.col(j).dot(resid) / dn + col_norm_sq[j] * old;
        double bnew = 0.0;
        if (g > lambda)
          bnew = (g - lambda) / col_norm_sq[j];
        else if (g < -lambda)
          bnew = (g + lambda) / col_norm_sq[j];
        if (bnew != old) {
          resid -= design.col(j) * (bnew - old);
          beta[j] = bnew;
          max_delta = std::max(max_delta, std::abs(bnew - old));
        }
      }
      if (max_delta < params.tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      std::cerr << "statistic_lasso: coordinate descent did not converge in "
                << params.max_sweeps << " sweeps, returning best iterate\n";
  }

  KnockoffStatistics st;
  st.method = Statistic::lasso_cd;
  st.converged = converged;
  st.u = beta.head(p).cwiseAbs();
  st.u_tilde = beta.tail(p).cwiseAbs();
  st.w = st.u - st.u_tilde;
  return st;
}

double knockoff_threshold(const Eigen::VectorXd& w, double q) {
  if (q <= 0.0 || q >= 1.0) throw ConfigError("q must be in (0,1)");
  std::vector<double> candidates;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w[j] != 0.0) candidates.push_back(std::abs(w[j]));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  for (double t : candidates) {
    Eigen::Index pos = 0, neg = 0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      if (w[j] >= t) ++pos;
      if (w[j] <= -t) ++neg;
    }
    if (pos > 0 &&
        static_cast<double>(1 + neg) / static_cast<double>(pos) <= q)
      return t;
  }
  return std::numeric_limits<double>::infinity();
}

std::vector<int> select(const Eigen::VectorXd& w, double tau) {
  std::vector<int> out;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w[j] >= tau) out.push_back(static_cast<int>(j));
  return out;
}

std::vector<SelectionResult> neucept_discover(const ActivationTrace& trace,
                                              const std::vector<std::string>& layer_ids,
                                              const std::vector<double>& q_per_layer,
                                              const DiscoverParams& params,
                                              std::uint64_t seed) {
  if (params.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (q_per_layer.size() != 1 && q_per_layer.size() != layer_ids.size())
    throw ConfigError("q_per_layer must have 1 entry or one per layer");
  for (double q : q_per_layer)
    if (q <= 0.0 || q >= 1.0) throw ConfigError("q must be in (0,1)");

  std::vector<bool> mask = params.all_samples
                               ? std::vector<bool>(trace.class_mask.size(), true)
                               : trace.class_mask;

  std::vector<SelectionResult> out;
  for (std::size_t li = 0; li < layer_ids.size(); ++li) {
    double q = q_per_layer.size() == 1 ? q_per_layer[0] : q_per_layer[li];
    try {
      const LayerMatrix& lm = trace.layer(layer_ids[li]);
      StandardizedView sv = standardize(lm, mask);
      Eigen::VectorXd y = masked_vector(trace.response, mask);

      SelectionResult res;
      res.layer_id = layer_ids[li];
      res.q = q;
      res.frequency = Eigen::VectorXd::Zero(lm.data.cols());

      if (!sv.retained.empty()) {
        MomentEstimate mom = estimate_moments(sv.data, params.shrink_alpha);
        Eigen::VectorXd s = solve_equi_s(mom.sigma);
        KnockoffModel model = build_knockoff_model(mom, s);

        for (int r = 0; r < params.repetitions; ++r) {
          std::uint64_t rep_seed = derive_seed(seed, li, static_cast<std::uint64_t>(r));
          Eigen::MatrixXd xt = sample_knockoffs(model, sv.data, rep_seed);
          KnockoffStatistics st =
              params.statistic == Statistic::marginal_corr
                  ? statistic_marginal(sv.data, xt, y)
                  : statistic_lasso(sv.data, xt, y, params.lasso);
          double tau = knockoff_threshold(st.w, q);
          res.tau_per_rep.push_back(tau);
          for (int j : select(st.w, tau))
            res.frequency[sv.retained[static_cast<std::size_t>(j)]] += 1.0;
        }
        res.frequency /= static_cast<double>(params.repetitions);
      }
      for (Eigen::Index j = 0; j < res.frequency.size(); ++j)
        if (res.frequency[j] >= params.keep_fraction && res.frequency[j] > 0.0)
          res.selected.push_back(static_cast<int>(j));
      out.push_back(std::move(res));
    } catch (const std::exception& e) {
      std::cerr << "neucept_discover: layer " << layer_ids[li]
                << " failed and was skipped: " << e.what() << "\n";
    }
  }
  return out;
}

std::vector<int> baseline_activation_select(const ActivationTrace& trace,
                                            const std::string& layer_id, int k) {
  const LayerMatrix& lm = trace.layer(layer_id);
  if (k > lm.data.cols()) throw ConfigError("k exceeds neuron count");
  Eigen::MatrixXd rows = masked_rows(lm.data, trace.class_mask);
  Eigen::VectorXd means = rows.colwise().mean();

  std::vector<int> order(static_cast<std::size_t>(lm.data.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return means[a] > means[b]; });
  order.resize(static_cast<std::size_t>(std::max(k, 0)));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace neucept
