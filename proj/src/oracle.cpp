#include "neucept/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace neucept {

double empirical_mi(const Eigen::MatrixXi& z, const std::vector<int>& subset,
                    const std::vector<int>& y) {
  if (static_cast<Eigen::Index>(y.size()) != z.rows())
    throw DataError("empirical_mi: length mismatch");
  if (y.empty()) throw DataError("empirical_mi: empty table");
  for (int j : subset)
    if (j < 0 || j >= z.cols()) throw DataError("empirical_mi: column out of range");

  // joint pattern counts keyed by the subset's realization
  std::map<std::vector<int>, double> pz;
  std::map<int, double> py;
  std::map<std::pair<std::vector<int>, int>, double> pzy;
  std::vector<int> key(subset.size());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (std::size_t s = 0; s < subset.size(); ++s) key[s] = z(i, subset[s]);
    pz[key] += 1.0;
    py[y[static_cast<std::size_t>(i)]] += 1.0;
    pzy[{key, y[static_cast<std::size_t>(i)]}] += 1.0;
  }
  double n = static_cast<double>(y.size());
  double mi = 0.0;
  for (const auto& [k, cnt] : pzy) {
    double pj = cnt / n;
    mi += pj * std::log2(pj * n * n / (pz[k.first] * py[k.second]));
  }
  return std::max(mi, 0.0);
}

std::pair<std::vector<int>, double> discrete_cni(const DiscreteTable& table, int k) {
  Eigen::Index p = table.z.cols();
  if (p > 20) throw ConfigError("discrete_cni: more than 20 variables");
  if (table.z.size() > 0 &&
      (table.z.maxCoeff() - table.z.minCoeff() >= 16))
    throw ConfigError("discrete_cni: alphabet size exceeds 16");
  if (k < 0) throw ConfigError("discrete_cni: k must be >= 0");
  k = std::min<int>(k, static_cast<int>(p));

  std::vector<int> best_subset;  // empty set scores 0 bits
  double best_mi = 0.0;
  constexpr double kTol = 1e-12;

  // enumerate sizes 1..k; lexicographic tie rule across all candidates
  std::vector<int> combo;
  auto consider = [&](const std::vector<int>& s) {
    double mi = empirical_mi(table.z, s, table.y);
    if (mi > best_mi + kTol ||
        (std::abs(mi - best_mi) <= kTol &&
         std::lexicographical_compare(s.begin(), s.end(), best_subset.begin(),
                                      best_subset.end()))) {
      best_mi = mi;
      best_subset = s;
    }
  };
  for (int size = 1; size <= k; ++size) {
    combo.assign(static_cast<std::size_t>(size), 0);
    for (int i = 0; i < size; ++i) combo[static_cast<std::size_t>(i)] = i;
    for (;;) {
      consider(combo);
      // next combination
      int i = size - 1;
      while (i >= 0 &&
             combo[static_cast<std::size_t>(i)] == static_cast<int>(p) - size + i)
        --i;
      if (i < 0) break;
      ++combo[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j)
        combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return {best_subset, best_mi};
}

Eigen::MatrixXi binarize_at_median(const Eigen::MatrixXd& x) {
  Eigen::MatrixXi out(x.rows(), x.cols());
  std::vector<double> col(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      col[static_cast<std::size_t>(i)] = x(i, j);
    std::vector<double> sorted = col;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    double median = sorted[sorted.size() / 2];
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      out(i, j) = col[static_cast<std::size_t>(i)] >= median ? 1 : 0;
  }
  return out;
}

}  // namespace neucept
