// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] is the path to the command-line binary (used by the
// determinism criterion).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "neucept/evaluation.hpp"
#include "neucept/io.hpp"
#include "neucept/knockoffs.hpp"
#include "neucept/mechanism.hpp"
#include "neucept/oracle.hpp"
#include "neucept/rng.hpp"
#include "neucept/selection.hpp"
#include "neucept/synthetic.hpp"
#include "neucept/trace.hpp"

namespace fs = std::filesystem;
using namespace neucept;

namespace {

int failures = 0;

void report(int num, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << num << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n" << std::flush;
  if (!ok) ++failures;
}

void run(int num, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    report(num, name, ok, detail);
  } catch (const std::exception& e) {
    report(num, name, false, std::string("exception: ") + e.what());
  }
}

struct TrialOutcome {
  double fdp = 0.0;
  double power = 0.0;
};

TrialOutcome knockoff_trial(int p, int support_size, double amplitude, double rho,
                            int n, Statistic stat, double q, std::uint64_t seed) {
  LinearGaussianCase c = linear_gaussian_case(p, support_size, amplitude, rho, n, seed);
  LayerMatrix lm{"x", c.x};
  StandardizedView sv = standardize(lm, std::vector<bool>(static_cast<std::size_t>(n), true));
  MomentEstimate mom = estimate_moments(sv.data, 0.1);
  Eigen::VectorXd s = solve_equi_s(mom.sigma);
  KnockoffModel model = build_knockoff_model(mom, s);
  Eigen::MatrixXd xt = sample_knockoffs(model, sv.data, derive_seed(seed, 1));
  KnockoffStatistics st = stat == Statistic::marginal_corr
                              ? statistic_marginal(sv.data, xt, c.y)
                              : statistic_lasso(sv.data, xt, c.y);
  double tau = knockoff_threshold(st.w, q);
  std::vector<int> sel;
  for (int j : select(st.w, tau)) sel.push_back(sv.retained[static_cast<std::size_t>(j)]);

  TrialOutcome out;
  int true_pos = 0;
  for (int j : sel)
    if (std::binary_search(c.support.begin(), c.support.end(), j)) ++true_pos;
  out.fdp = sel.empty() ? 0.0
                        : static_cast<double>(static_cast<int>(sel.size()) - true_pos) /
                              static_cast<double>(sel.size());
  out.power = support_size == 0
                  ? 1.0
                  : static_cast<double>(true_pos) / static_cast<double>(support_size);
  return out;
}

// Standard pair used by the synthetic acceptance checks.
constexpr int kN = 600;
const std::vector<int> kWidths{24, 16, 16};
const std::vector<int> kCritical{8, 8, 8};
constexpr int kTrue = 4;

struct PipelineRun {
  SyntheticSpec spec;
  Dataset data;
  ActivationTrace trace;
  std::vector<SelectionResult> selection;
};

PipelineRun discover_on(const SyntheticSpec& spec, std::uint64_t seed) {
  PipelineRun r;
  r.spec = spec;
  r.data = sample_dataset(spec, kN, true, derive_seed(seed, 2));
  r.trace = make_trace(spec, r.data);
  DiscoverParams params;  // defaults: marginal statistic, 50 repetitions
  r.selection = neucept_discover(r.trace, {"L1", "L2"}, {0.2}, params,
                                 derive_seed(seed, 3));
  return r;
}

int argmin_lowest_k(const CeCurve& curve) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.ce_bits.size(); ++i)
    if (curve.ce_bits[i] < curve.ce_bits[best] - 1e-12) best = i;
  return curve.k_values[best];
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";

  run(1, "fdr control on the linear-gaussian benchmark", [] {
    std::ostringstream detail;
    bool ok = true;
    for (Statistic stat : {Statistic::marginal_corr, Statistic::lasso_cd}) {
      double rho = stat == Statistic::marginal_corr ? 0.0 : 0.3;
      double fdr = 0.0, power = 0.0;
      int trials = 200;
      for (int t = 0; t < trials; ++t) {
        TrialOutcome o = knockoff_trial(200, 30, 3.5, rho, 500, stat, 0.2,
                                        static_cast<std::uint64_t>(1000 + t));
        fdr += o.fdp;
        power += o.power;
      }
      fdr /= trials;
      power /= trials;
      detail << to_string(stat) << ": fdr=" << fdr << " power=" << power << "  ";
      ok = ok && fdr <= 0.25 && power >= 0.5;
    }
    return std::make_pair(ok, detail.str());
  });

  run(2, "null safety with an independent response", [] {
    double fdr = 0.0;
    int trials = 200;
    for (int t = 0; t < trials; ++t) {
      TrialOutcome o = knockoff_trial(50, 0, 0.0, 0.3, 200, Statistic::marginal_corr,
                                      0.2, static_cast<std::uint64_t>(2000 + t));
      fdr += o.fdp;
    }
    fdr /= trials;
    std::ostringstream d;
    d << "fdr=" << fdr;
    return std::make_pair(fdr <= 0.25, d.str());
  });

  run(3, "threshold hand cases and monotonicity in q", [] {
    Eigen::VectorXd w1(4);
    w1 << 3, 2, -1, 0.5;
    bool ok = knockoff_threshold(w1, 0.5) == 2.0 &&
              select(w1, 2.0) == std::vector<int>{0, 1};
    Eigen::VectorXd w2(3);
    w2 << 1, 2, 3;
    ok = ok && knockoff_threshold(w2, 0.5) == 1.0 &&
         select(w2, 1.0) == std::vector<int>{0, 1, 2};

    Rng rng(3003);
    for (int trial = 0; trial < 1000 && ok; ++trial) {
      Eigen::VectorXd w(25);
      for (int j = 0; j < 25; ++j) w[j] = rng.gauss();
      double prev = std::numeric_limits<double>::infinity();
      for (double q : {0.02, 0.05, 0.1, 0.2, 0.4, 0.8}) {
        double tau = knockoff_threshold(w, q);
        if (tau > prev) ok = false;
        prev = tau;
      }
    }
    return std::make_pair(ok, std::string());
  });

  run(4, "flip-sign antisymmetry of both statistics", [] {
    bool ok = true;
    for (Statistic stat : {Statistic::marginal_corr, Statistic::lasso_cd}) {
      double tol = stat == Statistic::marginal_corr ? 0.0 : 1e-6;
      for (int trial = 0; trial < 100 && ok; ++trial) {
        Rng rng(static_cast<std::uint64_t>(4000 + trial));
        int n = 100, p = 8;
        Eigen::MatrixXd x(n, p), xt(n, p);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < p; ++j) {
            x(i, j) = rng.gauss();
            xt(i, j) = rng.gauss();
          }
          y[i] = rng.gauss() + 0.5 * x(i, 0);
        }
        auto compute = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
          return stat == Statistic::marginal_corr ? statistic_marginal(a, b, y)
                                                  : statistic_lasso(a, b, y);
        };
        Eigen::VectorXd base = compute(x, xt).w;
        int j = trial % p;
        Eigen::MatrixXd xs = x, xts = xt;
        xs.col(j).swap(xts.col(j));
        Eigen::VectorXd swapped = compute(xs, xts).w;
        if (std::abs(swapped[j] + base[j]) > tol) ok = false;
        for (int m = 0; m < p; ++m)
          if (m != j && std::abs(swapped[m] - base[m]) > tol) ok = false;
      }
    }
    return std::make_pair(ok, std::string());
  });

  run(5, "non-critical neurons carry no prediction", [] {
    SyntheticSpec spec = generate_spec(kWidths, kCritical, kTrue, 5005);
    Dataset d = sample_dataset(spec, 1000, true, 5006);
    auto [trace, clean] = forward(spec, d.inputs);

    SyntheticSpec zeroed = spec;
    // silence non-critical inputs by removing their outgoing weights
    for (int j = 0; j < zeroed.layer_widths[0]; ++j)
      if (!std::binary_search(zeroed.critical_sets[0].begin(),
                              zeroed.critical_sets[0].end(), j))
        zeroed.weights[0].col(j).setZero();
    // silence non-critical hidden neurons entirely
    for (int l = 1; l + 1 < zeroed.n_layers(); ++l) {
      for (int j = 0; j < zeroed.layer_widths[static_cast<std::size_t>(l)]; ++j) {
        const auto& crit = zeroed.critical_sets[static_cast<std::size_t>(l)];
        if (std::binary_search(crit.begin(), crit.end(), j)) continue;
        zeroed.weights[static_cast<std::size_t>(l - 1)].row(j).setZero();
        zeroed.biases[static_cast<std::size_t>(l - 1)][j] = 0.0;
      }
    }
    auto [ztrace, zeroed_preds] = forward(zeroed, d.inputs);
    return std::make_pair(clean == zeroed_preds, std::string());
  });

  run(6, "ce-vs-k curve bottoms out at the true mechanism count", [] {
    int good = 0;
    double worst_ce4 = 0.0;
    for (int s = 0; s < 10; ++s) {
      auto [pkt, normal] =
          prior_knowledge_pair(kWidths, kCritical, kTrue, static_cast<std::uint64_t>(6000 + s));
      PipelineRun r = discover_on(pkt, static_cast<std::uint64_t>(6100 + s));
      CeCurve curve = ce_curve(r.trace, NeuronSet::from_selection(r.selection),
                               {2, 3, 4, 5, 6, 7, 8}, ClusterMethod::kmeans,
                               static_cast<std::uint64_t>(6200 + s));
      double ce4 = curve.ce_bits[2];
      worst_ce4 = std::max(worst_ce4, ce4);
      if (argmin_lowest_k(curve) == kTrue && ce4 <= 0.3) ++good;
    }
    std::ostringstream d;
    d << good << "/10 seeds, worst ce(4)=" << worst_ce4;
    return std::make_pair(good >= 8, d.str());
  });

  run(7, "pkt/normal ce contrast and decoy control", [] {
    double diff_sum = 0.0;
    double decoy_rate_sum = 0.0;
    for (int s = 0; s < 10; ++s) {
      auto [pkt, normal] =
          prior_knowledge_pair(kWidths, kCritical, kTrue, static_cast<std::uint64_t>(7000 + s));
      PipelineRun rp = discover_on(pkt, static_cast<std::uint64_t>(7100 + s));
      PipelineRun rn = discover_on(normal, static_cast<std::uint64_t>(7200 + s));
      auto ce4 = [s](const PipelineRun& r) {
        return ce_curve(r.trace, NeuronSet::from_selection(r.selection), {kTrue},
                        ClusterMethod::kmeans, static_cast<std::uint64_t>(7300 + s))
            .ce_bits[0];
      };
      diff_sum += ce4(rn) - ce4(rp);

      int selected = 0, decoys = 0;
      for (std::size_t l = 0; l < rn.selection.size(); ++l) {
        const auto& crit = rn.spec.critical_sets[l + 1];  // hidden layers start at L1
        for (int j : rn.selection[l].selected) {
          ++selected;
          if (!std::binary_search(crit.begin(), crit.end(), j)) ++decoys;
        }
      }
      decoy_rate_sum += selected == 0 ? 0.0
                                      : static_cast<double>(decoys) /
                                            static_cast<double>(selected);
    }
    double diff = diff_sum / 10.0;
    double decoy_rate = decoy_rate_sum / 10.0;
    std::ostringstream d;
    d << "mean ce diff=" << diff << " decoy rate=" << decoy_rate;
    return std::make_pair(diff >= 0.5 && decoy_rate <= 0.25, d.str());
  });

  run(8, "protected ablation dominates random protection", [] {
    SyntheticSpec spec = generate_spec(kWidths, kCritical, kTrue, 8001);
    PipelineRun r = discover_on(spec, 8002);
    const std::string layer = "L1";
    Eigen::Index width = r.trace.layer(layer).data.cols();
    double unit = mean_abs_activation(r.trace, layer);

    Eigen::VectorXd selected_scores = Eigen::VectorXd::Zero(width);
    int protect = 0;
    for (const auto& sel : r.selection)
      if (sel.layer_id == layer)
        for (int j : sel.selected) {
          selected_scores[j] = 1.0;
          ++protect;
        }

    auto [ct, clean_preds] = forward(spec, r.data.inputs);
    double clean_acc = 0.0;
    for (std::size_t i = 0; i < clean_preds.size(); ++i)
      if (clean_preds[i] == r.data.posterior_labels[i]) clean_acc += 1.0;
    clean_acc /= static_cast<double>(clean_preds.size());

    NoiseSchedule zero =
        noise_schedule(selected_scores, 20.0, 0.0, 12345);
    bool clean_exact =
        ablation_run(spec, r.data.inputs, layer, zero, r.data.posterior_labels) ==
        clean_acc;

    int wins = 0;
    for (int s = 0; s < 20; ++s) {
      std::uint64_t noise_seed = derive_seed(8100, static_cast<std::uint64_t>(s));
      Eigen::VectorXd random_scores = Eigen::VectorXd::Zero(width);
      Rng rr = Rng::derive(8200, static_cast<std::uint64_t>(s));
      std::vector<int> idx(static_cast<std::size_t>(width));
      std::iota(idx.begin(), idx.end(), 0);
      for (int j = 0; j < protect && j < width; ++j) {
        auto x = j + static_cast<int>(rr.below(static_cast<std::uint64_t>(width - j)));
        std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(x)]);
        random_scores[idx[static_cast<std::size_t>(j)]] = 1.0;
      }
      bool win = true;
      for (double level : {2.0, 6.0, 12.0}) {
        NoiseSchedule a = noise_schedule(selected_scores, 20.0, level * unit, noise_seed);
        NoiseSchedule b = noise_schedule(random_scores, 20.0, level * unit, noise_seed);
        double acc_a = ablation_run(spec, r.data.inputs, layer, a, r.data.posterior_labels);
        double acc_b = ablation_run(spec, r.data.inputs, layer, b, r.data.posterior_labels);
        if (acc_a < acc_b) win = false;
      }
      if (win) ++wins;
    }
    std::ostringstream d;
    d << wins << "/20 seeds, clean exact=" << (clean_exact ? "yes" : "no");
    return std::make_pair(wins >= 18 && clean_exact, d.str());
  });

  run(9, "selection matches the exhaustive information oracle", [] {
    // exact xor instance
    DiscreteTable xt;
    xt.z.resize(4, 2);
    xt.z << 0, 0, 0, 1, 1, 0, 1, 1;
    xt.y = {0, 1, 1, 0};
    auto [subset, mi] = discrete_cni(xt, 2);
    bool ok = subset == std::vector<int>{0, 1} && std::abs(mi - 1.0) < 1e-12;

    // monotonicity of the plug-in estimator
    for (int trial = 0; trial < 100 && ok; ++trial) {
      Rng rng(static_cast<std::uint64_t>(9000 + trial));
      Eigen::MatrixXi z(50, 4);
      std::vector<int> y;
      for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 4; ++j) z(i, j) = static_cast<int>(rng.below(2));
        y.push_back(static_cast<int>(rng.below(2)));
      }
      if (empirical_mi(z, {0, 2, 3}, y) < empirical_mi(z, {0, 3}, y) - 1e-12) ok = false;
    }

    // knockoff selection vs exhaustive search at matched cardinality
    double ratio_sum = 0.0;
    for (int s = 0; s < 10; ++s) {
      // 6 critical neurons: the knockoff+ offset needs >= ceil(1/q)
      // positives before anything can be selected at q = 0.2
      SyntheticSpec spec = generate_spec({12, 10}, {6, 6}, 2, static_cast<std::uint64_t>(9100 + s));
      Dataset d = sample_dataset(spec, 500, true, static_cast<std::uint64_t>(9200 + s));
      ActivationTrace trace = make_trace(spec, d);
      DiscoverParams params;
      auto sel = neucept_discover(trace, {"L1"}, {0.2}, params,
                                  static_cast<std::uint64_t>(9300 + s));
      if (sel.empty() || sel[0].selected.empty()) continue;  // counts as ratio 0
      DiscreteTable table;
      table.z = binarize_at_median(trace.layer("L1").data);
      table.y = d.prior_labels;
      double mi_sel = empirical_mi(table.z, sel[0].selected, table.y);
      auto [best, mi_best] =
          discrete_cni(table, static_cast<int>(sel[0].selected.size()));
      ratio_sum += mi_best <= 0.0 ? 1.0 : mi_sel / mi_best;
    }
    double ratio = ratio_sum / 10.0;
    std::ostringstream det;
    det << "mean mi ratio=" << ratio;
    return std::make_pair(ok && ratio >= 0.9, det.str());
  });

  run(10, "clustering contracts and ce extremes", [] {
    Rng rng(10001);
    Eigen::MatrixXd v(150, 3);
    for (int i = 0; i < 150; ++i)
      for (int j = 0; j < 3; ++j)
        v(i, j) = rng.gauss() + (i % 3) * 2.0;

    bool ok = true;
    double prev_inertia = std::numeric_limits<double>::infinity();
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iters : {1, 2, 3, 5, 10, 50}) {
      double inertia = kmeans_cluster(v, 3, 7, iters).fit_score;
      if (inertia > prev_inertia + 1e-8) ok = false;
      prev_inertia = inertia;
      double ll = gmm_cluster(v, 3, 7, iters).fit_score;
      if (ll < prev_ll - 1e-8) ok = false;
      prev_ll = ll;
    }

    std::vector<int> y{0, 0, 1, 1, 2, 2};
    ok = ok && clusters_entropy({4, 4, 7, 7, 9, 9}, y) == 0.0;
    ok = ok && std::abs(clusters_entropy(std::vector<int>(6, 1), y) -
                        label_entropy(y)) < 1e-12;
    return std::make_pair(ok, std::string());
  });

  run(11, "end-to-end pipeline is byte-deterministic", [&cli] {
    if (cli.empty())
      return std::make_pair(false, std::string("no cli path given"));
    fs::path base = fs::temp_directory_path() / "neucept_determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    std::string quoted = "\"" + cli + "\"";
    for (const char* tag : {"a", "b"}) {
      std::string cmd = quoted + " pipeline --out " + (base / tag).string() +
                        " >/dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0)
        return std::make_pair(false, std::string("pipeline run failed"));
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
      if (!entry.is_regular_file()) continue;
      fs::path rel = fs::relative(entry.path(), base / "a");
      if (read_file(entry.path()) != read_file(base / "b" / rel))
        return std::make_pair(false, "differs: " + rel.string());
      ++compared;
    }
    fs::remove_all(base);
    std::ostringstream d;
    d << compared << " files identical";
    return std::make_pair(compared > 0, d.str());
  });

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT")
            << "\n";
  return failures == 0 ? 0 : 1;
}
