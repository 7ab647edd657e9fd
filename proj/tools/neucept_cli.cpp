// Command-line front end: orchestrates synth -> discover -> learn ->
// evaluate from a config file, emitting machine-readable JSON/CSV.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "neucept/evaluation.hpp"
#include "neucept/io.hpp"
#include "neucept/mechanism.hpp"
#include "neucept/oracle.hpp"
#include "neucept/rng.hpp"
#include "neucept/selection.hpp"
#include "neucept/synthetic.hpp"
#include "neucept/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace neucept;

namespace {

json load_config(const std::string& path, const std::string& section) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("missing config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  if (j.contains(section)) return j[section];
  return json::object();
}

// flags override config; config overrides the built-in default
template <typename T>
void resolve(const CLI::Option* opt, T& value, const json& cfg, const std::string& key) {
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.contains(key)) value = cfg[key].get<T>();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split_list(s)) out.push_back(std::stod(t));
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split_list(s)) out.push_back(std::stoi(t));
  return out;
}

// "2:8" or "2,3,5"
std::vector<int> parse_k_range(const std::string& s) {
  auto colon = s.find(':');
  if (colon != std::string::npos) {
    int lo = std::stoi(s.substr(0, colon));
    int hi = std::stoi(s.substr(colon + 1));
    if (hi < lo) throw ConfigError("bad k range: " + s);
    std::vector<int> out;
    for (int k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  }
  return parse_ints(s);
}

std::vector<std::string> default_hidden_layers(const ActivationTrace& trace) {
  std::vector<std::string> ids;
  for (std::size_t l = 1; l + 1 < trace.layers.size(); ++l)
    ids.push_back(trace.layers[l].layer_id);
  if (ids.empty() && trace.layers.size() > 1)
    ids.push_back(trace.layers[trace.layers.size() - 2].layer_id);
  return ids;
}

struct SynthOptions {
  std::vector<int> layer_widths{24, 16, 16};
  std::vector<int> critical_widths{8, 8, 8};
  int k_true = 4;
  int n = 600;
  bool balanced = true;
  bool pair = true;
  std::uint64_t seed = 1;
  std::string out = "synth_out";
};

void run_synth(const SynthOptions& o) {
  for (int w : o.layer_widths)
    if (w < 1) throw ConfigError("layer_widths entries must be positive");
  fs::create_directories(o.out);

  auto emit = [&](const SyntheticSpec& spec, const fs::path& dir) {
    Dataset data = sample_dataset(spec, o.n, o.balanced, derive_seed(o.seed, 100));
    ActivationTrace trace = make_trace(spec, data);
    save_trace(trace, dir);
    save_spec(spec, dir / "spec.json");
  };

  if (o.pair) {
    auto [pkt, normal] =
        prior_knowledge_pair(o.layer_widths, o.critical_widths, o.k_true, o.seed);
    emit(pkt, fs::path(o.out) / "pkt");
    emit(normal, fs::path(o.out) / "normal");
    std::cout << "wrote " << o.out << "/pkt and " << o.out << "/normal\n";
  } else {
    SyntheticSpec spec =
        generate_spec(o.layer_widths, o.critical_widths, o.k_true, o.seed);
    emit(spec, o.out);
    std::cout << "wrote " << o.out << "\n";
  }
}

struct DiscoverOptions {
  std::string trace;
  std::vector<std::string> layers;  // empty = all hidden layers
  std::vector<double> q{0.2};
  std::string statistic = "marginal_corr";
  int repetitions = 50;  // knockoff runs per layer
  double keep_fraction = 0.5;
  bool all_samples = false;
  std::uint64_t seed = 1;
  std::string out = "selection.json";
};

std::vector<SelectionResult> run_discover(const DiscoverOptions& o) {
  ActivationTrace trace = load_trace(o.trace);
  std::vector<std::string> layers =
      o.layers.empty() ? default_hidden_layers(trace) : o.layers;
  for (const auto& id : layers)
    if (trace.layer_index(id) < 0) throw ConfigError("unknown layer id: " + id);

  DiscoverParams params;
  params.statistic = statistic_from_string(o.statistic);
  params.repetitions = o.repetitions;
  params.keep_fraction = o.keep_fraction;
  params.all_samples = o.all_samples;

  auto results = neucept_discover(trace, layers, o.q, params, o.seed);
  json j = selection_to_json(results);
  j["seed"] = o.seed;
  j["statistic"] = o.statistic;
  j["repetitions"] = o.repetitions;
  j["keep_fraction"] = o.keep_fraction;
  atomic_write(o.out, j.dump(2) + "\n");
  std::cout << "wrote " << o.out << "\n";
  return results;
}

struct LearnOptions {
  std::string trace;
  std::string selection;
  int k = 4;
  std::string method = "kmeans";
  std::vector<int> limits;  // empty = skip agglomeration
  std::uint64_t seed = 1;
  std::string out = "mechanism.json";
};

void run_learn(const LearnOptions& o) {
  ActivationTrace trace = load_trace(o.trace);
  auto selection = selection_from_json(json::parse(read_file(o.selection)));
  std::optional<std::vector<int>> limits;
  if (!o.limits.empty()) limits = o.limits;
  MechanismAssignment m = neucept_learn(
      trace, selection, limits, o.k, cluster_method_from_string(o.method), o.seed);
  atomic_write(o.out, mechanism_to_json(m).dump(2) + "\n");
  std::cout << "wrote " << o.out << "\n";
}

struct CeCurveOptions {
  std::string trace;
  std::string selection;
  std::string k_range = "2:8";
  std::string method = "kmeans";
  std::uint64_t seed = 1;
  std::string out = "ce_curve.csv";
};

void run_ce_curve(const CeCurveOptions& o) {
  ActivationTrace trace = load_trace(o.trace);
  auto selection = selection_from_json(json::parse(read_file(o.selection)));
  CeCurve curve =
      ce_curve(trace, NeuronSet::from_selection(selection), parse_k_range(o.k_range),
               cluster_method_from_string(o.method), o.seed);
  std::ostringstream csv;
  csv << "method,k,ce_bits\n";
  for (std::size_t i = 0; i < curve.k_values.size(); ++i)
    csv << o.method << "," << curve.k_values[i] << ","
        << format_double(curve.ce_bits[i]) << "\n";
  atomic_write(o.out, csv.str());
  std::cout << "wrote " << o.out << "\n";
}

struct CeDiffOptions {
  std::string trace_a;
  std::string trace_b;
  std::string selector = "neucept";
  std::vector<std::string> layers;
  std::vector<double> q{0.2};
  std::string statistic = "marginal_corr";
  int repetitions = 20;
  std::string k_range = "2:8";
  std::string method = "kmeans";
  std::uint64_t seed = 1;
  std::string out = "ce_diff.csv";
};

void run_ce_diff(const CeDiffOptions& o) {
  ActivationTrace a = load_trace(o.trace_a);
  ActivationTrace b = load_trace(o.trace_b);
  std::vector<std::string> layers =
      o.layers.empty() ? default_hidden_layers(a) : o.layers;
  DiscoverParams params;
  params.statistic = statistic_from_string(o.statistic);
  params.repetitions = o.repetitions;
  auto ks = parse_k_range(o.k_range);
  auto diff = ce_difference(a, b, o.selector, layers, o.q, params, ks,
                            cluster_method_from_string(o.method), o.seed);
  std::ostringstream csv;
  csv << "selector,method,k,ce_diff_bits\n";
  for (std::size_t i = 0; i < ks.size(); ++i)
    csv << o.selector << "," << o.method << "," << ks[i] << ","
        << format_double(diff[i]) << "\n";
  atomic_write(o.out, csv.str());
  std::cout << "wrote " << o.out << "\n";
}

struct AblateOptions {
  std::string spec;
  std::string trace;
  std::string layer;
  std::string selection;
  std::vector<double> gammas{0.0, 20.0};
  std::vector<double> levels{0.0, 0.5, 1.0, 2.0};
  int seeds = 5;
  std::uint64_t seed = 1;
  std::string out = "ablation.csv";
};

void run_ablate(const AblateOptions& o) {
  SyntheticSpec spec = load_spec(o.spec);
  ActivationTrace trace = load_trace(o.trace);
  if (trace.posterior_labels.empty())
    throw DataError("ablation needs posterior labels in the trace");
  std::string layer = o.layer.empty() ? spec.layer_id(1) : o.layer;
  const Eigen::MatrixXd& inputs = trace.layers.front().data;
  Eigen::Index width = trace.layer(layer).data.cols();

  auto selection = selection_from_json(json::parse(read_file(o.selection)));
  Eigen::VectorXd selected_scores = Eigen::VectorXd::Zero(width);
  int protect_count = 0;
  for (const auto& sel : selection) {
    if (sel.layer_id != layer) continue;
    for (int jdx : sel.selected) {
      selected_scores[jdx] = 1.0;
      ++protect_count;
    }
  }

  double unit = mean_abs_activation(trace, layer);
  std::ostringstream csv;
  csv << "scheme,gamma,level,seed,accuracy\n";
  for (int s = 0; s < o.seeds; ++s) {
    std::uint64_t noise_seed = derive_seed(o.seed, 200, static_cast<std::uint64_t>(s));
    // equal-size random protection drawn from the layer
    Eigen::VectorXd random_scores = Eigen::VectorXd::Zero(width);
    Rng rr = Rng::derive(o.seed, 201, static_cast<std::uint64_t>(s));
    std::vector<int> idx(static_cast<std::size_t>(width));
    std::iota(idx.begin(), idx.end(), 0);
    for (int j = 0; j < protect_count && j < width; ++j) {
      auto r = j + static_cast<int>(rr.below(static_cast<std::uint64_t>(width - j)));
      std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(r)]);
      random_scores[idx[static_cast<std::size_t>(j)]] = 1.0;
    }
    for (double gamma : o.gammas) {
      for (double level : o.levels) {
        for (const auto& [scheme, scores] :
             {std::pair<std::string, Eigen::VectorXd>{"selected", selected_scores},
              {"random", random_scores},
              {"none", Eigen::VectorXd::Zero(width)}}) {
          NoiseSchedule sched = noise_schedule(scores, gamma, level * unit, noise_seed);
          double acc = ablation_run(spec, inputs, layer, sched, trace.posterior_labels);
          csv << scheme << "," << format_double(gamma) << "," << format_double(level)
              << "," << s << "," << format_double(acc) << "\n";
        }
      }
    }
  }
  atomic_write(o.out, csv.str());
  std::cout << "wrote " << o.out << "\n";
}

struct OracleOptions {
  std::string trace;
  std::string layer;
  int k = 3;
  std::string labels = "prior";
  std::string out = "oracle.json";
};

void run_oracle(const OracleOptions& o) {
  ActivationTrace trace = load_trace(o.trace);
  const LayerMatrix& lm = trace.layer(o.layer);
  if (lm.data.cols() > 20)
    throw ConfigError("oracle layer has more than 20 neurons; pick a smaller layer");
  const auto& labels =
      o.labels == "posterior" ? trace.posterior_labels : trace.prior_labels;
  if (labels.empty()) throw DataError("trace lacks " + o.labels + " labels");

  DiscreteTable table;
  table.z = binarize_at_median(masked_rows(lm.data, trace.class_mask));
  table.y = masked_labels(labels, trace.class_mask);
  auto [subset, mi] = discrete_cni(table, o.k);

  std::vector<int> all(static_cast<std::size_t>(lm.data.cols()));
  std::iota(all.begin(), all.end(), 0);
  json j;
  j["layer_id"] = o.layer;
  j["k"] = o.k;
  j["best_subset"] = subset;
  j["best_mi_bits"] = mi;
  j["full_set_mi_bits"] = empirical_mi(table.z, all, table.y);
  atomic_write(o.out, j.dump(2) + "\n");
  std::cout << "wrote " << o.out << "\n";
}

struct PipelineOptions {
  std::string config;
  std::string out = "pipeline_out";
};

void run_pipeline(const PipelineOptions& p) {
  fs::create_directories(p.out);

  SynthOptions so;
  json cfg = load_config(p.config, "synth");
  if (cfg.contains("layer_widths")) so.layer_widths = cfg["layer_widths"].get<std::vector<int>>();
  if (cfg.contains("critical_widths")) so.critical_widths = cfg["critical_widths"].get<std::vector<int>>();
  if (cfg.contains("k_true")) so.k_true = cfg["k_true"].get<int>();
  if (cfg.contains("n")) so.n = cfg["n"].get<int>();
  if (cfg.contains("seed")) so.seed = cfg["seed"].get<std::uint64_t>();
  so.pair = true;
  so.out = (fs::path(p.out) / "synth").string();
  run_synth(so);

  DiscoverOptions dopt;
  cfg = load_config(p.config, "discover");
  dopt.trace = (fs::path(so.out) / "pkt").string();
  if (cfg.contains("q")) dopt.q = cfg["q"].get<std::vector<double>>();
  if (cfg.contains("statistic")) dopt.statistic = cfg["statistic"].get<std::string>();
  if (cfg.contains("repetitions")) dopt.repetitions = cfg["repetitions"].get<int>();
  if (cfg.contains("keep_fraction")) dopt.keep_fraction = cfg["keep_fraction"].get<double>();
  if (cfg.contains("seed")) dopt.seed = cfg["seed"].get<std::uint64_t>();
  dopt.out = (fs::path(p.out) / "selection.json").string();
  run_discover(dopt);

  LearnOptions lopt;
  cfg = load_config(p.config, "learn");
  lopt.trace = dopt.trace;
  lopt.selection = dopt.out;
  lopt.k = so.k_true;
  if (cfg.contains("k")) lopt.k = cfg["k"].get<int>();
  if (cfg.contains("method")) lopt.method = cfg["method"].get<std::string>();
  if (cfg.contains("limits")) lopt.limits = cfg["limits"].get<std::vector<int>>();
  if (cfg.contains("seed")) lopt.seed = cfg["seed"].get<std::uint64_t>();
  lopt.out = (fs::path(p.out) / "mechanism.json").string();
  run_learn(lopt);

  CeCurveOptions copt;
  cfg = load_config(p.config, "evaluate");
  copt.trace = dopt.trace;
  copt.selection = dopt.out;
  if (cfg.contains("k_range")) copt.k_range = cfg["k_range"].get<std::string>();
  if (cfg.contains("method")) copt.method = cfg["method"].get<std::string>();
  if (cfg.contains("seed")) copt.seed = cfg["seed"].get<std::uint64_t>();
  copt.out = (fs::path(p.out) / "ce_curve.csv").string();
  run_ce_curve(copt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NeuCEPT: critical-neuron discovery and mechanism learning"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override it");

  // synth
  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "generate a synthetic testbed");
  std::string so_widths, so_crit;
  auto* o_widths = synth->add_option("--layer-widths", so_widths, "comma list, input first");
  auto* o_crit = synth->add_option("--critical-widths", so_crit, "comma list");
  auto* o_ktrue = synth->add_option("--k-true", so.k_true, "latent mechanism count");
  auto* o_n = synth->add_option("--n", so.n, "sample count");
  auto* o_pair = synth->add_flag("--pair,!--single", so.pair, "emit pkt+normal pair");
  auto* o_sseed = synth->add_option("--seed", so.seed);
  auto* o_sout = synth->add_option("--out", so.out, "output directory");

  // discover
  DiscoverOptions dopt;
  auto* discover = app.add_subcommand("discover", "run NeuCEPT-discovery");
  std::string d_layers, d_q;
  auto* o_dtrace = discover->add_option("--trace", dopt.trace, "trace directory")->required();
  auto* o_dlayers = discover->add_option("--layers", d_layers, "comma list of layer ids");
  auto* o_dq = discover->add_option("--q", d_q, "nominal FDR, one value or per layer");
  auto* o_dstat = discover->add_option("--statistic", dopt.statistic, "marginal_corr|lasso_cd");
  auto* o_dreps = discover->add_option("--repetitions", dopt.repetitions);
  auto* o_dkeep = discover->add_option("--keep-fraction", dopt.keep_fraction);
  auto* o_dall = discover->add_flag("--all-samples", dopt.all_samples, "ignore class mask");
  auto* o_dseed = discover->add_option("--seed", dopt.seed);
  auto* o_dout = discover->add_option("--out", dopt.out);

  // learn
  LearnOptions lopt;
  auto* learn = app.add_subcommand("learn", "run NeuCEPT-learning");
  std::string l_limits;
  auto* o_ltrace = learn->add_option("--trace", lopt.trace)->required();
  auto* o_lsel = learn->add_option("--selection", lopt.selection)->required();
  auto* o_lk = learn->add_option("--k", lopt.k, "cluster count");
  auto* o_lmethod = learn->add_option("--method", lopt.method, "kmeans|gmm|agglomerative");
  auto* o_llimits = learn->add_option("--limits", l_limits, "per-layer representative caps");
  auto* o_lseed = learn->add_option("--seed", lopt.seed);
  auto* o_lout = learn->add_option("--out", lopt.out);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "CE curves, CE differences, ablation");
  evaluate->require_subcommand(1);

  CeCurveOptions copt;
  auto* cecurve = evaluate->add_subcommand("ce-curve");
  auto* o_ctrace = cecurve->add_option("--trace", copt.trace)->required();
  auto* o_csel = cecurve->add_option("--selection", copt.selection)->required();
  auto* o_ck = cecurve->add_option("--k-range", copt.k_range, "lo:hi or comma list");
  auto* o_cmethod = cecurve->add_option("--method", copt.method);
  auto* o_cseed = cecurve->add_option("--seed", copt.seed);
  auto* o_cout = cecurve->add_option("--out", copt.out);

  CeDiffOptions fopt;
  auto* cediff = evaluate->add_subcommand("ce-diff");
  std::string f_layers, f_q;
  auto* o_fa = cediff->add_option("--trace-a", fopt.trace_a)->required();
  auto* o_fb = cediff->add_option("--trace-b", fopt.trace_b)->required();
  auto* o_fsel = cediff->add_option("--selector", fopt.selector, "neucept|activation");
  auto* o_flayers = cediff->add_option("--layers", f_layers);
  auto* o_fq = cediff->add_option("--q", f_q);
  auto* o_fstat = cediff->add_option("--statistic", fopt.statistic);
  auto* o_freps = cediff->add_option("--repetitions", fopt.repetitions);
  auto* o_fk = cediff->add_option("--k-range", fopt.k_range);
  auto* o_fmethod = cediff->add_option("--method", fopt.method);
  auto* o_fseed = cediff->add_option("--seed", fopt.seed);
  auto* o_fout = cediff->add_option("--out", fopt.out);

  AblateOptions aopt;
  auto* ablate = evaluate->add_subcommand("ablate");
  std::string a_gammas, a_levels;
  auto* o_aspec = ablate->add_option("--spec", aopt.spec)->required();
  auto* o_atrace = ablate->add_option("--trace", aopt.trace)->required();
  auto* o_alayer = ablate->add_option("--layer", aopt.layer);
  auto* o_asel = ablate->add_option("--selection", aopt.selection)->required();
  auto* o_agammas = ablate->add_option("--gammas", a_gammas);
  auto* o_alevels = ablate->add_option("--levels", a_levels, "relative noise levels");
  auto* o_aseeds = ablate->add_option("--seeds", aopt.seeds, "noise draws per cell");
  auto* o_aseed = ablate->add_option("--seed", aopt.seed);
  auto* o_aout = ablate->add_option("--out", aopt.out);

  // oracle
  OracleOptions oopt;
  auto* oracle = app.add_subcommand("oracle", "exhaustive DISCRETE-CNI on a tiny layer");
  auto* o_otrace = oracle->add_option("--trace", oopt.trace)->required();
  auto* o_olayer = oracle->add_option("--layer", oopt.layer)->required();
  auto* o_ok = oracle->add_option("--k", oopt.k, "cardinality bound");
  auto* o_olabels = oracle->add_option("--labels", oopt.labels, "prior|posterior");
  auto* o_oout = oracle->add_option("--out", oopt.out);

  // pipeline
  PipelineOptions popt;
  auto* pipeline =
      app.add_subcommand("pipeline", "synth -> discover -> learn -> evaluate");
  auto* o_pout = pipeline->add_option("--out", popt.out);

  try {
    app.parse(argc, argv);

    if (*synth) {
      json cfg = load_config(config_path, "synth");
      if (o_widths->count() > 0) so.layer_widths = parse_ints(so_widths);
      else if (cfg.contains("layer_widths")) so.layer_widths = cfg["layer_widths"].get<std::vector<int>>();
      if (o_crit->count() > 0) so.critical_widths = parse_ints(so_crit);
      else if (cfg.contains("critical_widths")) so.critical_widths = cfg["critical_widths"].get<std::vector<int>>();
      resolve(o_ktrue, so.k_true, cfg, "k_true");
      resolve(o_n, so.n, cfg, "n");
      resolve(o_pair, so.pair, cfg, "pair");
      resolve(o_sseed, so.seed, cfg, "seed");
      resolve(o_sout, so.out, cfg, "out");
      run_synth(so);
    } else if (*discover) {
      json cfg = load_config(config_path, "discover");
      (void)o_dtrace;
      if (o_dlayers->count() > 0) dopt.layers = split_list(d_layers);
      else if (cfg.contains("layers")) dopt.layers = cfg["layers"].get<std::vector<std::string>>();
      if (o_dq->count() > 0) dopt.q = parse_doubles(d_q);
      else if (cfg.contains("q")) dopt.q = cfg["q"].get<std::vector<double>>();
      resolve(o_dstat, dopt.statistic, cfg, "statistic");
      resolve(o_dreps, dopt.repetitions, cfg, "repetitions");
      resolve(o_dkeep, dopt.keep_fraction, cfg, "keep_fraction");
      resolve(o_dall, dopt.all_samples, cfg, "all_samples");
      resolve(o_dseed, dopt.seed, cfg, "seed");
      resolve(o_dout, dopt.out, cfg, "out");
      run_discover(dopt);
    } else if (*learn) {
      json cfg = load_config(config_path, "learn");
      (void)o_ltrace;
      (void)o_lsel;
      resolve(o_lk, lopt.k, cfg, "k");
      resolve(o_lmethod, lopt.method, cfg, "method");
      if (o_llimits->count() > 0) lopt.limits = parse_ints(l_limits);
      else if (cfg.contains("limits")) lopt.limits = cfg["limits"].get<std::vector<int>>();
      resolve(o_lseed, lopt.seed, cfg, "seed");
      resolve(o_lout, lopt.out, cfg, "out");
      run_learn(lopt);
    } else if (*cecurve) {
      json cfg = load_config(config_path, "evaluate");
      (void)o_ctrace;
      (void)o_csel;
      resolve(o_ck, copt.k_range, cfg, "k_range");
      resolve(o_cmethod, copt.method, cfg, "method");
      resolve(o_cseed, copt.seed, cfg, "seed");
      resolve(o_cout, copt.out, cfg, "out");
      run_ce_curve(copt);
    } else if (*cediff) {
      json cfg = load_config(config_path, "evaluate");
      (void)o_fa;
      (void)o_fb;
      resolve(o_fsel, fopt.selector, cfg, "selector");
      if (o_flayers->count() > 0) fopt.layers = split_list(f_layers);
      else if (cfg.contains("layers")) fopt.layers = cfg["layers"].get<std::vector<std::string>>();
      if (o_fq->count() > 0) fopt.q = parse_doubles(f_q);
      else if (cfg.contains("q")) fopt.q = cfg["q"].get<std::vector<double>>();
      resolve(o_fstat, fopt.statistic, cfg, "statistic");
      resolve(o_freps, fopt.repetitions, cfg, "repetitions");
      resolve(o_fk, fopt.k_range, cfg, "k_range");
      resolve(o_fmethod, fopt.method, cfg, "method");
      resolve(o_fseed, fopt.seed, cfg, "seed");
      resolve(o_fout, fopt.out, cfg, "out");
      run_ce_diff(fopt);
    } else if (*ablate) {
      json cfg = load_config(config_path, "evaluate");
      (void)o_aspec;
      (void)o_atrace;
      (void)o_asel;
      resolve(o_alayer, aopt.layer, cfg, "layer");
      if (o_agammas->count() > 0) aopt.gammas = parse_doubles(a_gammas);
      else if (cfg.contains("gammas")) aopt.gammas = cfg["gammas"].get<std::vector<double>>();
      if (o_alevels->count() > 0) aopt.levels = parse_doubles(a_levels);
      else if (cfg.contains("levels")) aopt.levels = cfg["levels"].get<std::vector<double>>();
      resolve(o_aseeds, aopt.seeds, cfg, "seeds");
      resolve(o_aseed, aopt.seed, cfg, "seed");
      resolve(o_aout, aopt.out, cfg, "out");
      run_ablate(aopt);
    } else if (*oracle) {
      json cfg = load_config(config_path, "oracle");
      (void)o_otrace;
      (void)o_olayer;
      resolve(o_ok, oopt.k, cfg, "k");
      resolve(o_olabels, oopt.labels, cfg, "labels");
      resolve(o_oout, oopt.out, cfg, "out");
      run_oracle(oopt);
    } else if (*pipeline) {
      (void)o_pout;
      popt.config = config_path;
      run_pipeline(popt);
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
