#include "neucept/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "neucept/rng.hpp"

namespace neucept {

using nlohmann::json;

LinearGaussianCase linear_gaussian_case(int p, int support_size, double amplitude,
                                        double rho, int n, std::uint64_t seed) {
  if (support_size > p) throw ConfigError("support_size exceeds p");
  if (rho < 0.0 || rho >= 1.0) throw ConfigError("rho must be in [0,1)");

  LinearGaussianCase out;
  out.x.resize(n, p);
  Rng xr = Rng::derive(seed, 1);
  double carry = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    double prev = 0.0;
    for (int j = 0; j < p; ++j) {
      double g = xr.gauss();
      double v = (j == 0) ? g : rho * prev + carry * g;
      out.x(i, j) = v;
      prev = v;
    }
  }

  // uniformly chosen support via partial Fisher-Yates
  Rng sr = Rng::derive(seed, 2);
  std::vector<int> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < support_size; ++j) {
    auto r = j + static_cast<int>(sr.below(static_cast<std::uint64_t>(p - j)));
    std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(r)]);
  }
  out.support.assign(idx.begin(), idx.begin() + support_size);
  std::sort(out.support.begin(), out.support.end());

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int j : out.support) beta[j] = sr.uniform() < 0.5 ? amplitude : -amplitude;

  Rng er = Rng::derive(seed, 3);
  out.y.resize(n);
  for (int i = 0; i < n; ++i) out.y[i] = out.x.row(i).dot(beta) + er.gauss();
  return out;
}

namespace {

constexpr double kSignalMean = 3.0;     // active critical input block mean
constexpr double kSignalSd = 0.5;       // critical input noise
constexpr double kDecoyShift = 0.4;     // weak latent-correlated decoy mean
constexpr double kDecoySd = 1.0;
constexpr double kDecoyBias = 0.5;      // keeps decoy chains alive through relu

enum class RoutingMode { pkt, normal };

// Round-robin partition of a critical set into k groups.
std::vector<std::vector<int>> partition_groups(const std::vector<int>& critical,
                                               int k) {
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < critical.size(); ++i)
    groups[i % static_cast<std::size_t>(k)].push_back(critical[i]);
  return groups;
}

SyntheticSpec build_spec(const std::vector<int>& hidden_widths,
                         const std::vector<int>& critical_widths, int k_true,
                         std::uint64_t seed, RoutingMode mode) {
  if (k_true < 1) throw ConfigError("k_true must be >= 1");
  if (hidden_widths.size() < 2)
    throw ConfigError("need at least an input and one hidden layer");
  if (critical_widths.size() != hidden_widths.size())
    throw ConfigError("critical_widths must match layer_widths");
  for (std::size_t l = 0; l < hidden_widths.size(); ++l) {
    if (critical_widths[l] > hidden_widths[l])
      throw ConfigError("critical width exceeds layer width at layer " +
                        std::to_string(l));
    if (critical_widths[l] < k_true)
      throw ConfigError("critical width below mechanism routing capacity at layer " +
                        std::to_string(l));
  }

  const int n_posterior = 2;
  SyntheticSpec spec;
  spec.seed = seed;
  spec.k_true = k_true;
  spec.layer_widths = hidden_widths;
  spec.layer_widths.push_back(n_posterior);
  int n_layers = spec.n_layers();

  spec.coarse_of_latent.resize(static_cast<std::size_t>(k_true));
  for (int g = 0; g < k_true; ++g)
    spec.coarse_of_latent[static_cast<std::size_t>(g)] =
        k_true == 1 ? 0 : (g * n_posterior) / k_true;

  for (std::size_t l = 0; l < hidden_widths.size(); ++l) {
    std::vector<int> crit(static_cast<std::size_t>(critical_widths[l]));
    std::iota(crit.begin(), crit.end(), 0);  // critical neurons lead each layer
    spec.critical_sets.push_back(crit);
    spec.groups_per_layer.push_back(partition_groups(crit, k_true));
  }
  spec.critical_sets.push_back({0, 1});  // both logits are critical

  Rng wr = Rng::derive(seed, 10, static_cast<std::uint64_t>(mode));
  for (int l = 0; l + 1 < n_layers; ++l) {
    int from = spec.layer_widths[static_cast<std::size_t>(l)];
    int to = spec.layer_widths[static_cast<std::size_t>(l + 1)];
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(to, from);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(to);
    const auto& src_groups = spec.groups_per_layer[static_cast<std::size_t>(l)];

    if (l + 2 == n_layers) {
      // output layer: +1/|group| from own-coarse groups, balanced negative
      // weight from the others, so every critical path reaches the logits
      for (int g = 0; g < k_true; ++g) {
        int coarse = spec.coarse_of_latent[static_cast<std::size_t>(g)];
        for (int j : src_groups[static_cast<std::size_t>(g)]) {
          double wpos = 1.0 / static_cast<double>(
                                  src_groups[static_cast<std::size_t>(g)].size());
          for (int m = 0; m < to; ++m)
            w(m, j) = (m == coarse)
                          ? wpos
                          : -wpos / static_cast<double>(n_posterior - 1);
        }
      }
    } else {
      const auto& dst_groups = spec.groups_per_layer[static_cast<std::size_t>(l + 1)];
      if (mode == RoutingMode::pkt) {
        // per-latent routing: group g feeds only group g
        for (int g = 0; g < k_true; ++g) {
          const auto& src = src_groups[static_cast<std::size_t>(g)];
          for (int c : dst_groups[static_cast<std::size_t>(g)])
            for (int j : src)
              w(c, j) = (0.5 + wr.uniform()) / static_cast<double>(src.size());
        }
      } else {
        // shared coarse path: equal weights over the whole coarse block,
        // so the activation is invariant to latent identity within a class
        for (int coarse = 0; coarse < n_posterior; ++coarse) {
          std::vector<int> block;
          for (int g = 0; g < k_true; ++g)
            if (spec.coarse_of_latent[static_cast<std::size_t>(g)] == coarse)
              block.insert(block.end(),
                           src_groups[static_cast<std::size_t>(g)].begin(),
                           src_groups[static_cast<std::size_t>(g)].end());
          for (int g = 0; g < k_true; ++g) {
            if (spec.coarse_of_latent[static_cast<std::size_t>(g)] != coarse)
              continue;
            for (int c : dst_groups[static_cast<std::size_t>(g)])
              for (int j : block) w(c, j) = 1.0 / static_cast<double>(block.size());
          }
        }
      }

      // decoy chain: each non-critical neuron follows one non-critical
      // neuron of the previous layer; no edge ever enters a critical neuron
      int src_crit = critical_widths[static_cast<std::size_t>(l)];
      int dst_crit = critical_widths[static_cast<std::size_t>(l + 1)];
      int src_decoys = from - src_crit;
      for (int c = dst_crit; c < to; ++c) {
        if (src_decoys > 0) {
          int j = src_crit + (c - dst_crit) % src_decoys;
          w(c, j) = 1.0;
        }
        b[c] = kDecoyBias;
      }
    }
    spec.weights.push_back(std::move(w));
    spec.biases.push_back(std::move(b));
  }
  return spec;
}

}  // namespace

SyntheticSpec generate_spec(const std::vector<int>& layer_widths,
                            const std::vector<int>& critical_widths, int k_true,
                            std::uint64_t seed) {
  return build_spec(layer_widths, critical_widths, k_true, seed, RoutingMode::pkt);
}

std::pair<SyntheticSpec, SyntheticSpec> prior_knowledge_pair(
    const std::vector<int>& layer_widths, const std::vector<int>& critical_widths,
    int k_true, std::uint64_t seed) {
  return {build_spec(layer_widths, critical_widths, k_true, seed, RoutingMode::pkt),
          build_spec(layer_widths, critical_widths, k_true, seed, RoutingMode::normal)};
}

Dataset sample_dataset(const SyntheticSpec& spec, int n, bool balanced,
                       std::uint64_t seed) {
  if (n < spec.k_true) throw ConfigError("n must be >= k_true");
  int width = spec.layer_widths.front();
  int crit = static_cast<int>(spec.critical_sets.front().size());
  const auto& groups = spec.groups_per_layer.front();

  Dataset d;
  d.inputs.resize(n, width);
  d.latent.resize(static_cast<std::size_t>(n));

  Rng lr = Rng::derive(seed, 20);
  if (balanced) {
    for (int i = 0; i < n; ++i)
      d.latent[static_cast<std::size_t>(i)] = i % spec.k_true;
    // Fisher-Yates so latent is not correlated with sample order
    for (int i = n - 1; i > 0; --i) {
      auto r = static_cast<int>(lr.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(d.latent[static_cast<std::size_t>(i)],
                d.latent[static_cast<std::size_t>(r)]);
    }
  } else {
    for (int i = 0; i < n; ++i)
      d.latent[static_cast<std::size_t>(i)] =
          static_cast<int>(lr.below(static_cast<std::uint64_t>(spec.k_true)));
  }

  std::vector<int> group_of(static_cast<std::size_t>(crit), 0);
  for (int g = 0; g < spec.k_true; ++g)
    for (int j : groups[static_cast<std::size_t>(g)])
      group_of[static_cast<std::size_t>(j)] = g;

  Rng xr = Rng::derive(seed, 21);
  for (int i = 0; i < n; ++i) {
    int c = d.latent[static_cast<std::size_t>(i)];
    for (int j = 0; j < width; ++j) {
      if (j < crit) {
        double mean = group_of[static_cast<std::size_t>(j)] == c ? kSignalMean : 0.0;
        d.inputs(i, j) = mean + kSignalSd * xr.gauss();
      } else {
        double mean = (j % spec.k_true) == c ? kDecoyShift : 0.0;
        d.inputs(i, j) = mean + kDecoySd * xr.gauss();
      }
    }
  }

  d.prior_labels = d.latent;
  d.posterior_labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    d.posterior_labels[static_cast<std::size_t>(i)] =
        spec.coarse_of_latent[static_cast<std::size_t>(
            d.latent[static_cast<std::size_t>(i)])];
  return d;
}

std::pair<ActivationTrace, std::vector<int>> forward(
    const SyntheticSpec& spec, const Eigen::MatrixXd& inputs,
    const std::optional<std::pair<std::string, Eigen::VectorXd>>& noise) {
  if (inputs.cols() != spec.layer_widths.front())
    throw DataError("forward: input width mismatch");
  int n_layers = spec.n_layers();

  ActivationTrace trace;
  Eigen::MatrixXd z = inputs;
  auto apply_noise = [&](int l, Eigen::MatrixXd& act) {
    if (noise && noise->first == spec.layer_id(l)) {
      if (noise->second.size() != act.cols())
        throw DataError("noise schedule dimension mismatch");
      act.rowwise() += noise->second.transpose();
    }
  };
  apply_noise(0, z);
  trace.layers.push_back({spec.layer_id(0), z});

  for (int l = 0; l + 1 < n_layers; ++l) {
    Eigen::MatrixXd pre =
        (z * spec.weights[static_cast<std::size_t>(l)].transpose()).rowwise() +
        spec.biases[static_cast<std::size_t>(l)].transpose();
    if (l + 2 < n_layers)
      z = pre.cwiseMax(0.0);  // relu at hidden layers
    else
      z = pre;  // linear logits
    apply_noise(l + 1, z);
    trace.layers.push_back({spec.layer_id(l + 1), z});
  }

  trace.response = z.col(0);  // class-of-interest output neuron o = 0
  trace.class_mask.assign(static_cast<std::size_t>(inputs.rows()), true);

  std::vector<int> predictions(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    int best = 0;
    for (Eigen::Index m = 1; m < z.cols(); ++m)
      if (z(i, m) > z(i, best)) best = static_cast<int>(m);
    predictions[static_cast<std::size_t>(i)] = best;
  }
  return {std::move(trace), std::move(predictions)};
}

ActivationTrace make_trace(const SyntheticSpec& spec, const Dataset& data) {
  auto [trace, preds] = forward(spec, data.inputs);
  trace.prior_labels = data.prior_labels;
  trace.posterior_labels = data.posterior_labels;
  return trace;
}

void save_spec(const SyntheticSpec& spec, const std::filesystem::path& file) {
  json j;
  j["layer_widths"] = spec.layer_widths;
  j["k_true"] = spec.k_true;
  j["seed"] = spec.seed;
  j["coarse_of_latent"] = spec.coarse_of_latent;
  j["critical_sets"] = spec.critical_sets;
  j["groups_per_layer"] = spec.groups_per_layer;
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (const auto& w : spec.weights) {
    json jm = json::array();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < w.cols(); ++c) row.push_back(w(i, c));
      jm.push_back(std::move(row));
    }
    j["weights"].push_back(std::move(jm));
  }
  for (const auto& b : spec.biases) {
    json row = json::array();
    for (Eigen::Index i = 0; i < b.size(); ++i) row.push_back(b[i]);
    j["biases"].push_back(std::move(row));
  }
  std::ofstream out(file);
  if (!out) throw DataError("unwritable path: " + file.string());
  out << j.dump(2) << "\n";
}

SyntheticSpec load_spec(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("missing file: " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("bad spec file " + file.string() + ": " + e.what());
  }
  SyntheticSpec spec;
  spec.layer_widths = j.at("layer_widths").get<std::vector<int>>();
  spec.k_true = j.at("k_true").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.coarse_of_latent = j.at("coarse_of_latent").get<std::vector<int>>();
  spec.critical_sets = j.at("critical_sets").get<std::vector<std::vector<int>>>();
  spec.groups_per_layer =
      j.at("groups_per_layer").get<std::vector<std::vector<std::vector<int>>>>();
  for (const auto& jm : j.at("weights")) {
    Eigen::MatrixXd w(jm.size(), jm.empty() ? 0 : jm[0].size());
    for (std::size_t i = 0; i < jm.size(); ++i)
      for (std::size_t c = 0; c < jm[i].size(); ++c)
        w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            jm[i][c].get<double>();
    spec.weights.push_back(std::move(w));
  }
  for (const auto& jb : j.at("biases")) {
    Eigen::VectorXd b(jb.size());
    for (std::size_t i = 0; i < jb.size(); ++i)
      b[static_cast<Eigen::Index>(i)] = jb[i].get<double>();
    spec.biases.push_back(std::move(b));
  }
  return spec;
}

}  // namespace neucept
