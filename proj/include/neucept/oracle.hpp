#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "neucept/errors.hpp"

namespace neucept {

// Small discrete instance for exhaustive reference computations.
// Feasibility bounds: alphabet sizes <= 16, variables <= 20.
struct DiscreteTable {
  Eigen::MatrixXi z;   // samples x variables
  std::vector<int> y;  // length = samples
};

// Plug-in mutual information I(z[:, subset]; y) in bits, from empirical
// joint counts. No bias correction.
double empirical_mi(const Eigen::MatrixXi& z, const std::vector<int>& subset,
                    const std::vector<int>& y);

// Exhaustive search over all subsets of size <= k; ties (within 1e-12)
// broken by the lexicographically smallest index sequence, so a constant
// y yields the empty set.
std::pair<std::vector<int>, double> discrete_cni(const DiscreteTable& table, int k);

// Per-column median split (>= median -> 1), the continuous-to-discrete
// bridge for oracle comparisons.
Eigen::MatrixXi binarize_at_median(const Eigen::MatrixXd& x);

}  // namespace neucept
