#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "neucept/knockoffs.hpp"
#include "neucept/trace.hpp"

namespace neucept {

enum class Statistic { marginal_corr, lasso_cd };

std::string to_string(Statistic s);
Statistic statistic_from_string(const std::string& s);

struct KnockoffStatistics {
  Eigen::VectorXd w;        // w = u - u_tilde
  Eigen::VectorXd u;        // importance of originals
  Eigen::VectorXd u_tilde;  // importance of knockoffs
  Statistic method = Statistic::marginal_corr;
  bool converged = true;    // lasso only
};

struct LassoParams {
  double lambda_factor = 0.25;  // lambda = factor * lambda_max
  int max_sweeps = 1000;
  double tol = 1e-7;  // max coefficient change per sweep
};

// U_j = |corr(x_j, y)|, Utilde_j = |corr(xt_j, y)|
KnockoffStatistics statistic_marginal(const Eigen::MatrixXd& x,
                                      const Eigen::MatrixXd& xt,
                                      const Eigen::VectorXd& y);

// Coordinate-descent lasso of y on [x, xt] at a single lambda;
// U_j = |beta_j|, Utilde_j = |beta_{j+p}|.
KnockoffStatistics statistic_lasso(const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& xt,
                                   const Eigen::VectorXd& y,
                                   const LassoParams& params = {});

// tau_q = min{t in {|W_j| : W_j != 0} : (1 + #{W_j <= -t}) / #{W_j >= t} <= q};
// +infinity when no candidate qualifies (empty selection).
double knockoff_threshold(const Eigen::VectorXd& w, double q);

// {j : W_j >= tau}
std::vector<int> select(const Eigen::VectorXd& w, double tau);

struct SelectionResult {
  std::string layer_id;
  double q = 0.1;
  std::vector<double> tau_per_rep;  // +inf entries mean empty repetition
  Eigen::VectorXd frequency;        // per original neuron, in [0,1]
  std::vector<int> selected;        // original indices, frequency >= keep_fraction
};

struct DiscoverParams {
  Statistic statistic = Statistic::marginal_corr;
  int repetitions = 50;        // knockoff runs per layer
  double keep_fraction = 0.5;  // aggregation threshold on frequency
  double shrink_alpha = 0.1;
  bool all_samples = false;    // default: class-masked rows only
  LassoParams lasso;
};

// Per-layer pairwise Markov-blanket estimation against the response.
// Layers are independent; a failing layer is reported on stderr and
// skipped. q_per_layer is either one value (broadcast) or one per layer.
std::vector<SelectionResult> neucept_discover(const ActivationTrace& trace,
                                              const std::vector<std::string>& layer_ids,
                                              const std::vector<double>& q_per_layer,
                                              const DiscoverParams& params,
                                              std::uint64_t seed);

// Top-k neurons by mean activation over class-masked samples, ties to
// the lower index.
std::vector<int> baseline_activation_select(const ActivationTrace& trace,
                                            const std::string& layer_id, int k);

}  // namespace neucept
