#include <Eigen/Dense>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "neucept/evaluation.hpp"
#include "neucept/mechanism.hpp"
#include "neucept/synthetic.hpp"

using namespace neucept;

TEST_CASE("linear gaussian case with rho=0 has uncorrelated columns") {
  int n = 2000, p = 8;
  LinearGaussianCase c = linear_gaussian_case(p, 3, 3.5, 0.0, n, 13);
  double bound = 5.0 / std::sqrt(static_cast<double>(n));
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b) {
      Eigen::VectorXd u = c.x.col(a).array() - c.x.col(a).mean();
      Eigen::VectorXd v = c.x.col(b).array() - c.x.col(b).mean();
      CHECK(std::abs(u.dot(v) / (u.norm() * v.norm())) < bound);
    }
  CHECK(c.support.size() == 3);
}

TEST_CASE("zero amplitude gives a null response") {
  int n = 3000;
  LinearGaussianCase c = linear_gaussian_case(10, 4, 0.0, 0.3, n, 17);
  for (int j = 0; j < 10; ++j) {
    Eigen::VectorXd u = c.x.col(j).array() - c.x.col(j).mean();
    Eigen::VectorXd v = c.y.array() - c.y.mean();
    CHECK(std::abs(u.dot(v) / (u.norm() * v.norm())) <
          5.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("spec validation names the offending field") {
  CHECK_THROWS_WITH_AS(generate_spec({8}, {4}, 2, 1),
                       doctest::Contains("hidden layer"), ConfigError);
  CHECK_THROWS_WITH_AS(generate_spec({8, 8}, {4}, 2, 1),
                       doctest::Contains("critical_widths"), ConfigError);
  CHECK_THROWS_WITH_AS(generate_spec({8, 8}, {4, 9}, 2, 1),
                       doctest::Contains("critical width"), ConfigError);
  CHECK_THROWS_WITH_AS(generate_spec({8, 8}, {4, 2}, 3, 1),
                       doctest::Contains("critical width"), ConfigError);
}

TEST_CASE("degenerate dense network: every neuron critical") {
  SyntheticSpec spec = generate_spec({6, 6}, {6, 6}, 2, 3);
  CHECK(spec.critical_sets[0] == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(spec.critical_sets[1] == std::vector<int>{0, 1, 2, 3, 4, 5});
  Dataset d = sample_dataset(spec, 50, true, 4);
  CHECK(d.inputs.rows() == 50);
}

TEST_CASE("single mechanism collapses everything to one class") {
  SyntheticSpec spec = generate_spec({6, 4}, {2, 2}, 1, 5);
  Dataset d = sample_dataset(spec, 30, true, 6);
  for (int v : d.latent) CHECK(v == 0);
  for (int v : d.posterior_labels) CHECK(v == 0);
}

TEST_CASE("single-sample dataset has valid shapes") {
  SyntheticSpec spec = generate_spec({6, 4}, {2, 2}, 1, 7);
  Dataset d = sample_dataset(spec, 1, false, 8);
  CHECK(d.inputs.rows() == 1);
  CHECK(d.latent.size() == 1);
  auto [trace, preds] = forward(spec, d.inputs);
  CHECK(trace.sample_count() == 1);
  CHECK(preds.size() == 1);
}

TEST_CASE("balanced sampling keeps latent frequencies near uniform") {
  SyntheticSpec spec = generate_spec({12, 8}, {4, 4}, 4, 9);
  int n = 1000;
  Dataset d = sample_dataset(spec, n, true, 10);
  std::vector<int> counts(4, 0);
  for (int v : d.latent) ++counts[static_cast<std::size_t>(v)];
  double bound = 3.0 / std::sqrt(static_cast<double>(n));
  for (int g = 0; g < 4; ++g)
    CHECK(std::abs(counts[static_cast<std::size_t>(g)] / static_cast<double>(n) - 0.25) <=
          bound);
}

TEST_CASE("forward with identity weights copies the input layer") {
  SyntheticSpec spec;
  spec.layer_widths = {3, 3, 2};
  spec.weights = {Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(2, 3)};
  spec.biases = {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)};
  spec.k_true = 1;
  spec.coarse_of_latent = {0};
  spec.critical_sets = {{0, 1, 2}, {0, 1, 2}, {0, 1}};
  spec.groups_per_layer = {{{0, 1, 2}}, {{0, 1, 2}}};

  Eigen::MatrixXd inputs(2, 3);
  inputs << 0.5, 1.0, 0.0, 2.0, 0.25, 3.0;  // nonnegative: relu is identity
  auto [trace, preds] = forward(spec, inputs);
  CHECK((trace.layer("L1").data - inputs).cwiseAbs().maxCoeff() == 0.0);

  // zero output weights: logits equal the biases for every input
  spec.biases[1] << -1.5, 2.5;
  auto [trace2, preds2] = forward(spec, inputs);
  for (int i = 0; i < 2; ++i) {
    CHECK(trace2.layer("L2").data(i, 0) == -1.5);
    CHECK(trace2.layer("L2").data(i, 1) == 2.5);
    CHECK(preds2[static_cast<std::size_t>(i)] == 1);
  }
}

TEST_CASE("zero noise reproduces the clean forward bit-exactly") {
  SyntheticSpec spec = generate_spec({10, 8}, {4, 4}, 2, 11);
  Dataset d = sample_dataset(spec, 64, true, 12);
  auto [clean, cp] = forward(spec, d.inputs);
  auto [noisy, np] = forward(
      spec, d.inputs, std::make_pair(std::string("L1"), Eigen::VectorXd::Zero(8)));
  for (std::size_t l = 0; l < clean.layers.size(); ++l)
    CHECK((clean.layers[l].data - noisy.layers[l].data).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cp == np);
}

TEST_CASE("identical seeds produce identical pairs") {
  auto [a1, n1] = prior_knowledge_pair({12, 10}, {4, 4}, 2, 21);
  auto [a2, n2] = prior_knowledge_pair({12, 10}, {4, 4}, 2, 21);
  for (std::size_t l = 0; l < a1.weights.size(); ++l) {
    CHECK((a1.weights[l] - a2.weights[l]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((n1.weights[l] - n2.weights[l]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("both pair members classify the posterior task accurately") {
  auto [pkt, normal] = prior_knowledge_pair({16, 12}, {8, 8}, 4, 23);
  for (const auto* spec : {&pkt, &normal}) {
    Dataset d = sample_dataset(*spec, 2000, true, 24);
    auto [trace, preds] = forward(*spec, d.inputs);
    double correct = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i)
      if (preds[i] == d.posterior_labels[i]) correct += 1.0;
    CHECK(correct / 2000.0 >= 0.95);
  }
}

TEST_CASE("mechanisms are recoverable from critical activations by clustering") {
  SyntheticSpec spec = generate_spec({16, 12}, {8, 8}, 4, 25);
  Dataset d = sample_dataset(spec, 600, true, 26);
  ActivationTrace trace = make_trace(spec, d);

  Eigen::MatrixXd v(600, 8);
  for (int j = 0; j < 8; ++j) v.col(j) = trace.layer("L1").data.col(j);
  MechanismAssignment m = cluster(v, 4, ClusterMethod::kmeans, 27);
  CHECK(clusters_entropy(m.c, d.latent) <= 0.3);
}

TEST_CASE("ce contrast between the pair members at k_true") {
  auto [pkt, normal] = prior_knowledge_pair({16, 12}, {8, 8}, 4, 29);
  Dataset dp = sample_dataset(pkt, 600, true, 30);
  Dataset dn = sample_dataset(normal, 600, true, 30);
  ActivationTrace tp = make_trace(pkt, dp);
  ActivationTrace tn = make_trace(normal, dn);

  auto crit_ce = [](const ActivationTrace& t, const Dataset& d) {
    Eigen::MatrixXd v(600, 8);
    for (int j = 0; j < 8; ++j) v.col(j) = t.layer("L1").data.col(j);
    return clusters_entropy(cluster(v, 4, ClusterMethod::kmeans, 31).c, d.prior_labels);
  };
  double h_prior = label_entropy(dp.prior_labels);      // 2 bits
  double h_post = label_entropy(dp.posterior_labels);   // 1 bit
  CHECK(crit_ce(tp, dp) <= 0.3);
  CHECK(crit_ce(tn, dn) >= h_prior - h_post - 0.3);
}

TEST_CASE("spec files round-trip") {
  SyntheticSpec spec = generate_spec({10, 8}, {4, 4}, 2, 33);
  auto file = std::filesystem::temp_directory_path() / "neucept_spec_rt.json";
  save_spec(spec, file);
  SyntheticSpec back = load_spec(file);
  CHECK(back.layer_widths == spec.layer_widths);
  CHECK(back.k_true == spec.k_true);
  CHECK(back.critical_sets == spec.critical_sets);
  for (std::size_t l = 0; l < spec.weights.size(); ++l)
    CHECK((back.weights[l] - spec.weights[l]).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(file);
}
