#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neucept/trace.hpp"

namespace neucept {

// Sparse critical-path layered network with a latent mechanism variable.
// layer_widths includes the final logit layer (width = posterior classes).
// Weights from non-critical neurons into critical neurons are exactly 0,
// so the output is reachable only through the designed critical sets.
struct SyntheticSpec {
  std::vector<int> layer_widths;
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: widths[l+1] x widths[l]
  std::vector<Eigen::VectorXd> biases;
  std::vector<std::vector<int>> critical_sets;  // per layer, sorted
  int k_true = 1;
  std::vector<int> coarse_of_latent;  // latent mechanism -> posterior label
  // per non-output layer: latent group -> critical neuron indices
  std::vector<std::vector<std::vector<int>>> groups_per_layer;
  std::uint64_t seed = 0;

  int n_layers() const { return static_cast<int>(layer_widths.size()); }
  int n_posterior() const { return layer_widths.back(); }
  std::string layer_id(int l) const { return "L" + std::to_string(l); }
};

struct LinearGaussianCase {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<int> support;  // sorted
};

// Rows ~ N(0, Sigma) with AR(1) correlation rho; y = x beta + N(0,1),
// beta = +-amplitude on a uniformly chosen support.
LinearGaussianCase linear_gaussian_case(int p, int support_size, double amplitude,
                                        double rho, int n, std::uint64_t seed);

// Routed critical-path network: each latent mechanism activates a
// distinct critical subpath (the PKT-analog construction).
// layer_widths here excludes the logit layer; a 2-logit output is
// appended with critical set {0, 1}.
SyntheticSpec generate_spec(const std::vector<int>& layer_widths,
                            const std::vector<int>& critical_widths, int k_true,
                            std::uint64_t seed);

struct Dataset {
  Eigen::MatrixXd inputs;
  std::vector<int> latent;            // ground-truth mechanism per sample
  std::vector<int> prior_labels;      // = latent (informative task)
  std::vector<int> posterior_labels;  // coarse grouping of latent
};

Dataset sample_dataset(const SyntheticSpec& spec, int n, bool balanced,
                       std::uint64_t seed);

// Forward pass: relu at hidden layers, linear logits. Optional additive
// noise is applied once, post-activation, at the named layer and
// propagates. Returns the full trace (response = class-0 logit,
// class_mask all true) and argmax predictions.
std::pair<ActivationTrace, std::vector<int>> forward(
    const SyntheticSpec& spec, const Eigen::MatrixXd& inputs,
    const std::optional<std::pair<std::string, Eigen::VectorXd>>& noise = {});

// Builds a trace with dataset labels attached.
ActivationTrace make_trace(const SyntheticSpec& spec, const Dataset& data);

// PKT-analog network (per-latent routing) and a normally-trained analog
// computing the same posterior label through shared coarse paths that
// ignore latent identity.
std::pair<SyntheticSpec, SyntheticSpec> prior_knowledge_pair(
    const std::vector<int>& layer_widths, const std::vector<int>& critical_widths,
    int k_true, std::uint64_t seed);

void save_spec(const SyntheticSpec& spec, const std::filesystem::path& file);
SyntheticSpec load_spec(const std::filesystem::path& file);

}  // namespace neucept
