#include "neucept/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "neucept/rng.hpp"

namespace neucept {

double label_entropy(const std::vector<int>& y) {
  if (y.empty()) throw DataError("entropy of empty label vector");
  std::map<int, double> counts;
  for (int v : y) counts[v] += 1.0;
  double n = static_cast<double>(y.size());
  double h = 0.0;
  for (const auto& [v, c] : counts) {
    double p = c / n;
    h -= p * std::log2(p);
  }
  return h;
}

double clusters_entropy(const std::vector<int>& c, const std::vector<int>& y_prior) {
  if (c.size() != y_prior.size()) throw DataError("clusters_entropy: length mismatch");
  if (c.empty()) throw DataError("clusters_entropy: empty input");

  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> cluster_counts;
  for (std::size_t i = 0; i < c.size(); ++i) {
    joint[{c[i], y_prior[i]}] += 1.0;
    cluster_counts[c[i]] += 1.0;
  }
  double n = static_cast<double>(c.size());
  double ce = 0.0;
  for (const auto& [key, cnt] : joint) {
    double p_joint = cnt / n;
    double p_cond = cnt / cluster_counts[key.first];
    ce -= p_joint * std::log2(p_cond);  // 0 log 0 terms never appear in counts
  }
  return ce;
}

NeuronSet NeuronSet::from_selection(const std::vector<SelectionResult>& sel) {
  NeuronSet ns;
  for (const auto& s : sel) ns.layers.push_back({s.layer_id, s.selected});
  return ns;
}

CeCurve ce_curve(const ActivationTrace& trace, const NeuronSet& neurons,
                 const std::vector<int>& k_range, ClusterMethod method,
                 std::uint64_t seed) {
  if (k_range.empty()) throw ConfigError("k_range must be nonempty");
  if (trace.prior_labels.empty()) throw DataError("trace has no prior labels");

  std::vector<int> y = masked_labels(trace.prior_labels, trace.class_mask);

  // gather the named neurons' class-masked activations
  std::vector<Eigen::MatrixXd> parts;
  Eigen::Index total = 0;
  for (const auto& [layer_id, idx] : neurons.layers) {
    if (idx.empty()) continue;
    Eigen::MatrixXd rows = masked_rows(trace.layer(layer_id).data, trace.class_mask);
    Eigen::MatrixXd part(rows.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] < 0 || idx[j] >= rows.cols())
        throw DataError("neuron index out of range for layer " + layer_id);
      part.col(static_cast<Eigen::Index>(j)) = rows.col(idx[j]);
    }
    total += part.cols();
    parts.push_back(std::move(part));
  }

  CeCurve curve;
  curve.method = method;
  curve.k_values = k_range;

  if (total == 0) {
    // no information: everything lands in one cluster
    double h = label_entropy(y);
    curve.ce_bits.assign(k_range.size(), h);
    return curve;
  }

  Eigen::MatrixXd v(parts.front().rows(), total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p.cols()) = p;
    at += p.cols();
  }

  for (std::size_t i = 0; i < k_range.size(); ++i) {
    MechanismAssignment m =
        cluster(v, k_range[i], method, derive_seed(seed, 30, i));
    curve.ce_bits.push_back(clusters_entropy(m.c, y));
  }
  return curve;
}

std::vector<double> ce_difference(const ActivationTrace& trace_a,
                                  const ActivationTrace& trace_b,
                                  const std::string& selector,
                                  const std::vector<std::string>& layer_ids,
                                  const std::vector<double>& q_per_layer,
                                  const DiscoverParams& dparams,
                                  const std::vector<int>& k_range,
                                  ClusterMethod method, std::uint64_t seed) {
  auto select_neurons = [&](const ActivationTrace& t,
                            std::uint64_t s) -> NeuronSet {
    if (selector == "neucept") {
      return NeuronSet::from_selection(
          neucept_discover(t, layer_ids, q_per_layer, dparams, s));
    }
    if (selector == "activation") {
      NeuronSet ns;
      for (const auto& id : layer_ids) {
        int k = std::min<int>(10, static_cast<int>(t.layer(id).data.cols()));
        ns.layers.push_back({id, baseline_activation_select(t, id, k)});
      }
      return ns;
    }
    throw ConfigError("unknown selector: " + selector);
  };

  CeCurve a = ce_curve(trace_a, select_neurons(trace_a, derive_seed(seed, 40)),
                       k_range, method, derive_seed(seed, 41));
  CeCurve b = ce_curve(trace_b, select_neurons(trace_b, derive_seed(seed, 42)),
                       k_range, method, derive_seed(seed, 43));

  std::vector<double> diff(k_range.size());
  for (std::size_t i = 0; i < k_range.size(); ++i)
    diff[i] = a.ce_bits[i] - b.ce_bits[i];
  return diff;
}

NoiseSchedule noise_schedule(const Eigen::VectorXd& scores, double gamma,
                             double level, std::uint64_t seed) {
  if (level < 0.0) throw ConfigError("noise level must be >= 0");
  if (gamma < 0.0) throw ConfigError("gamma must be >= 0");
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (scores[i] < 0.0 || scores[i] > 1.0)
      throw ConfigError("scores must lie in [0,1]");

  NoiseSchedule sched;
  sched.scores = scores;
  sched.gamma = gamma;
  sched.level = level;

  // the base draw depends on the seed only, never on the scores:
  // competing score vectors see identical delta
  Rng rng = Rng::derive(seed, 50);
  sched.base.resize(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) sched.base[i] = rng.uniform();

  Eigen::VectorXd weighted =
      sched.base.array() * (-gamma * scores.array() * std::log(2.0)).exp();
  double mean = weighted.size() > 0 ? weighted.mean() : 0.0;
  if (level == 0.0 || mean <= 0.0)
    sched.noise = Eigen::VectorXd::Zero(scores.size());
  else
    sched.noise = weighted * (level / mean);
  return sched;
}

double mean_abs_activation(const ActivationTrace& trace, const std::string& layer_id) {
  Eigen::MatrixXd rows = masked_rows(trace.layer(layer_id).data, trace.class_mask);
  if (rows.size() == 0) throw DataError("no masked samples in layer " + layer_id);
  return rows.cwiseAbs().mean();
}

double ablation_run(const SyntheticSpec& spec, const Eigen::MatrixXd& inputs,
                    const std::string& layer_id, const NoiseSchedule& schedule,
                    const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != inputs.rows())
    throw DataError("ablation_run: label length mismatch");
  auto [trace, preds] =
      forward(spec, inputs, std::make_pair(layer_id, schedule.noise));
  (void)trace;
  double correct = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (preds[i] == labels[i]) correct += 1.0;
  return correct / static_cast<double>(labels.size());
}

}  // namespace neucept
