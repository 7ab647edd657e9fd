#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "neucept/mechanism.hpp"
#include "neucept/selection.hpp"
#include "neucept/synthetic.hpp"
#include "neucept/trace.hpp"

namespace neucept {

// Empirical conditional entropy H(y_prior | c) in bits.
double clusters_entropy(const std::vector<int>& c, const std::vector<int>& y_prior);

// Empirical entropy in bits.
double label_entropy(const std::vector<int>& y);

// Neurons feeding a clustering run, grouped by layer.
struct NeuronSet {
  std::vector<std::pair<std::string, std::vector<int>>> layers;

  static NeuronSet from_selection(const std::vector<SelectionResult>& sel);
};

struct CeCurve {
  std::vector<int> k_values;
  std::vector<double> ce_bits;
  ClusterMethod method = ClusterMethod::kmeans;
  std::string selector;
};

// CE against prior labels for each k. An empty neuron set degrades to a
// single cluster, i.e. CE = H(y_prior).
CeCurve ce_curve(const ActivationTrace& trace, const NeuronSet& neurons,
                 const std::vector<int>& k_range, ClusterMethod method,
                 std::uint64_t seed);

// CE_a(k) - CE_b(k) with discovery (selector "neucept") or the
// activation baseline (selector "activation") run independently per trace.
std::vector<double> ce_difference(const ActivationTrace& trace_a,
                                  const ActivationTrace& trace_b,
                                  const std::string& selector,
                                  const std::vector<std::string>& layer_ids,
                                  const std::vector<double>& q_per_layer,
                                  const DiscoverParams& dparams,
                                  const std::vector<int>& k_range,
                                  ClusterMethod method, std::uint64_t seed);

// Per-neuron additive ablation noise: base delta ~ U[0,1] from the seed
// alone (identical across score vectors, the method-fairness contract),
// weighted by 2^(-gamma * score), scaled so mean(noise) = level.
struct NoiseSchedule {
  Eigen::VectorXd base;    // delta
  Eigen::VectorXd scores;  // s in [0,1]
  double gamma = 0.0;
  double level = 0.0;
  Eigen::VectorXd noise;
};

NoiseSchedule noise_schedule(const Eigen::VectorXd& scores, double gamma,
                             double level, std::uint64_t seed);

// Mean |activation| over class-masked rows; converts a relative noise
// level into the absolute one consumed by noise_schedule.
double mean_abs_activation(const ActivationTrace& trace, const std::string& layer_id);

// Forward with the schedule applied at the named layer; accuracy of
// argmax predictions against the given labels.
double ablation_run(const SyntheticSpec& spec, const Eigen::MatrixXd& inputs,
                    const std::string& layer_id, const NoiseSchedule& schedule,
                    const std::vector<int>& labels);

}  // namespace neucept
