#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neucept/selection.hpp"
#include "neucept/trace.hpp"

namespace neucept {

enum class ClusterMethod { kmeans, gmm, agglomerative };

std::string to_string(ClusterMethod m);
ClusterMethod cluster_method_from_string(const std::string& s);

// Correlation-grouped critical neurons with group-mean representatives.
struct RepresentativeSet {
  std::vector<std::vector<int>> groups;  // partition of input column indices
  Eigen::MatrixXd v;                     // samples x |groups|, column = group mean
};

// Average-linkage hierarchical grouping under d(i,j) = 1 - |corr(x_i, x_j)|,
// cut to min(max_reps, columns) groups. Ties merge the lexicographically
// smallest cluster pair.
RepresentativeSet feature_agglomerate(const Eigen::MatrixXd& x, int max_reps);

struct MechanismAssignment {
  std::vector<int> c;  // cluster label per sample, in [0, k)
  Eigen::MatrixXd e;   // explained-representation per sample
  int k = 1;
  ClusterMethod method = ClusterMethod::kmeans;
  double fit_score = 0.0;  // inertia (kmeans/agglomerative) or log-likelihood (gmm)
};

// k-means++ seeding, Lloyd iterations to an assignment fixpoint.
// e = per-sample distances to the k centers; fit_score = inertia.
MechanismAssignment kmeans_cluster(const Eigen::MatrixXd& v, int k,
                                   std::uint64_t seed, int max_iter = 300);

// Diagonal-covariance EM initialized from a k-means run.
// e = posterior responsibilities; fit_score = final log-likelihood.
MechanismAssignment gmm_cluster(const Eigen::MatrixXd& v, int k,
                                std::uint64_t seed, int max_iter = 200,
                                double reg = 1e-6);

// Ward linkage, deterministic lowest-index tie rule. e = one-hot labels.
MechanismAssignment agglomerative_cluster(const Eigen::MatrixXd& v, int k);

MechanismAssignment cluster(const Eigen::MatrixXd& v, int k, ClusterMethod method,
                            std::uint64_t seed);

// Per-layer agglomeration of critical activations (skipped when limits
// is absent), concatenation across layers, then clustering.
MechanismAssignment neucept_learn(const ActivationTrace& trace,
                                  const std::vector<SelectionResult>& selection,
                                  const std::optional<std::vector<int>>& limits,
                                  int k, ClusterMethod method, std::uint64_t seed);

// Critical activations gathered for learning: class-masked rows of the
// selected columns, agglomerated per layer when limits is given.
Eigen::MatrixXd learning_matrix(const ActivationTrace& trace,
                                const std::vector<SelectionResult>& selection,
                                const std::optional<std::vector<int>>& limits);

}  // namespace neucept
