#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neucept/evaluation.hpp"
#include "neucept/knockoffs.hpp"
#include "neucept/mechanism.hpp"
#include "neucept/oracle.hpp"
#include "neucept/rng.hpp"
#include "neucept/selection.hpp"
#include "neucept/synthetic.hpp"
#include "neucept/trace.hpp"

namespace py = pybind11;
using namespace neucept;

namespace {

// One-call knockoff generation from raw activations.
Eigen::MatrixXd knockoffs_for(const Eigen::MatrixXd& x, double shrink_alpha,
                              std::uint64_t seed) {
  MomentEstimate mom = estimate_moments(x, shrink_alpha);
  Eigen::VectorXd s = solve_equi_s(mom.sigma);
  KnockoffModel model = build_knockoff_model(mom, s);
  return sample_knockoffs(model, x, seed);
}

Eigen::VectorXd statistic_w(const std::string& statistic, const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& xt, const Eigen::VectorXd& y) {
  return statistic_from_string(statistic) == Statistic::marginal_corr
             ? statistic_marginal(x, xt, y).w
             : statistic_lasso(x, xt, y).w;
}

py::dict discover_arrays(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                         double q, const std::string& statistic, int repetitions,
                         double keep_fraction, std::uint64_t seed) {
  ActivationTrace trace;
  trace.layers.push_back({"L0", z});
  trace.response = y;
  trace.class_mask.assign(static_cast<std::size_t>(z.rows()), true);

  DiscoverParams params;
  params.statistic = statistic_from_string(statistic);
  params.repetitions = repetitions;
  params.keep_fraction = keep_fraction;
  auto results = neucept_discover(trace, {"L0"}, {q}, params, seed);
  py::dict out;
  out["selected"] = results.at(0).selected;
  out["frequency"] = results.at(0).frequency;
  return out;
}

py::dict cluster_arrays(const Eigen::MatrixXd& v, int k, const std::string& method,
                        std::uint64_t seed) {
  MechanismAssignment m = cluster(v, k, cluster_method_from_string(method), seed);
  py::dict out;
  out["labels"] = m.c;
  out["explained"] = m.e;
  out["fit_score"] = m.fit_score;
  return out;
}

py::dict linear_case(int p, int support_size, double amplitude, double rho, int n,
                     std::uint64_t seed) {
  LinearGaussianCase c = linear_gaussian_case(p, support_size, amplitude, rho, n, seed);
  py::dict out;
  out["x"] = c.x;
  out["y"] = c.y;
  out["support"] = c.support;
  return out;
}

py::dict synth_trace(const std::vector<int>& layer_widths,
                     const std::vector<int>& critical_widths, int k_true, int n,
                     bool pkt, std::uint64_t seed) {
  SyntheticSpec spec =
      pkt ? generate_spec(layer_widths, critical_widths, k_true, seed)
          : prior_knowledge_pair(layer_widths, critical_widths, k_true, seed).second;
  Dataset d = sample_dataset(spec, n, true, derive_seed(seed, 100));
  ActivationTrace trace = make_trace(spec, d);
  py::dict out;
  for (const auto& lm : trace.layers) out[lm.layer_id.c_str()] = lm.data;
  out["response"] = trace.response;
  out["prior_labels"] = trace.prior_labels;
  out["posterior_labels"] = trace.posterior_labels;
  out["critical_sets"] = spec.critical_sets;
  return out;
}

std::pair<std::vector<int>, double> cni(const Eigen::MatrixXi& z,
                                        const std::vector<int>& y, int k) {
  DiscreteTable table;
  table.z = z;
  table.y = y;
  return discrete_cni(table, k);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "critical-neuron discovery and mechanism clustering primitives";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("sample_covariance", &sample_covariance, py::arg("x"),
        "n-1 denominator sample covariance");
  m.def("solve_equi_s", &solve_equi_s, py::arg("sigma"),
        "equicorrelated knockoff diagonal");
  m.def("knockoffs", &knockoffs_for, py::arg("x"), py::arg("shrink_alpha") = 0.1,
        py::arg("seed") = 0, "second-order Gaussian knockoff copy of x");
  m.def("statistic", &statistic_w, py::arg("statistic"), py::arg("x"), py::arg("xt"),
        py::arg("y"), "knockoff statistics W = U - U~");
  m.def("knockoff_threshold", &knockoff_threshold, py::arg("w"), py::arg("q"));
  m.def("select",
        static_cast<std::vector<int> (*)(const Eigen::VectorXd&, double)>(
            &neucept::select),
        py::arg("w"), py::arg("tau"));
  m.def("discover", &discover_arrays, py::arg("z"), py::arg("y"), py::arg("q") = 0.2,
        py::arg("statistic") = "marginal_corr", py::arg("repetitions") = 50,
        py::arg("keep_fraction") = 0.5, py::arg("seed") = 0,
        "repeated knockoff selection with frequency aggregation");
  m.def("cluster", &cluster_arrays, py::arg("v"), py::arg("k"),
        py::arg("method") = "kmeans", py::arg("seed") = 0);
  m.def("clusters_entropy", &clusters_entropy, py::arg("c"), py::arg("y_prior"),
        "H(y_prior | C) in bits");
  m.def("label_entropy", &label_entropy, py::arg("y"));
  m.def("empirical_mi", &empirical_mi, py::arg("z"), py::arg("subset"), py::arg("y"),
        "plug-in mutual information in bits");
  m.def("discrete_cni", &cni, py::arg("z"), py::arg("y"), py::arg("k"),
        "exhaustive most-informative subset of size <= k");
  m.def("binarize_at_median", &binarize_at_median, py::arg("x"));
  m.def("linear_gaussian_case", &linear_case, py::arg("p"), py::arg("support_size"),
        py::arg("amplitude"), py::arg("rho"), py::arg("n"), py::arg("seed"));
  m.def("synth_trace", &synth_trace, py::arg("layer_widths"),
        py::arg("critical_widths"), py::arg("k_true"), py::arg("n"),
        py::arg("pkt") = true, py::arg("seed") = 0,
        "activation trace of a synthetic critical-path network");
}
