#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "neucept/errors.hpp"

namespace neucept {

// One layer of recorded activations: rows = samples, cols = neurons.
struct LayerMatrix {
  std::string layer_id;
  Eigen::MatrixXd data;
};

// Per-sample activation record for one class-of-interest analysis.
// `response` is the pre-softmax logit of the class output neuron.
// Immutable after load; all operations on it are pure.
struct ActivationTrace {
  std::vector<LayerMatrix> layers;  // forward order, input layer first
  Eigen::VectorXd response;
  std::vector<int> prior_labels;      // empty = absent
  std::vector<int> posterior_labels;  // empty = absent
  std::vector<bool> class_mask;       // length = sample count

  Eigen::Index sample_count() const {
    return layers.empty() ? 0 : layers.front().data.rows();
  }

  int layer_index(const std::string& id) const;
  // throws DataError on unknown id
  const LayerMatrix& layer(const std::string& id) const;

  // throws DataError on any invariant violation
  void validate() const;
};

// Class-masked, centered and scaled view of one layer. Zero-variance
// columns are dropped; `retained` maps view columns back to original ones.
struct StandardizedView {
  Eigen::MatrixXd data;   // masked rows x retained cols
  Eigen::VectorXd means;  // per retained column
  Eigen::VectorXd stds;   // per retained column, n-1 denominator
  std::vector<int> dropped;
  std::vector<int> retained;
};

ActivationTrace load_trace(const std::filesystem::path& dir);
void save_trace(const ActivationTrace& trace, const std::filesystem::path& dir);

// Each CSV has a header row; one file per layer, forward order. Labels
// (one integer per line) become prior_labels. Response defaults to the
// first column of the last layer.
ActivationTrace import_csv(const std::vector<std::filesystem::path>& layer_files,
                           const std::optional<std::filesystem::path>& label_file);

StandardizedView standardize(const LayerMatrix& m, const std::vector<bool>& class_mask);

// rows of v where mask is true
Eigen::VectorXd masked_vector(const Eigen::VectorXd& v, const std::vector<bool>& mask);
Eigen::MatrixXd masked_rows(const Eigen::MatrixXd& m, const std::vector<bool>& mask);
std::vector<int> masked_labels(const std::vector<int>& v, const std::vector<bool>& mask);

}  // namespace neucept
