#include "neucept/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "neucept/rng.hpp"

namespace neucept {

std::string to_string(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::kmeans: return "kmeans";
    case ClusterMethod::gmm: return "gmm";
    case ClusterMethod::agglomerative: return "agglomerative";
  }
  return "kmeans";
}

ClusterMethod cluster_method_from_string(const std::string& s) {
  if (s == "kmeans") return ClusterMethod::kmeans;
  if (s == "gmm") return ClusterMethod::gmm;
  if (s == "agglomerative") return ClusterMethod::agglomerative;
  throw ConfigError("unknown clustering method: " + s);
}

namespace {

// Generic bottom-up merging with Lance-Williams updates and the
// lexicographic tie rule shared by both agglomeration routines.
// dist is modified in place; returns the surviving cluster members,
// ordered by smallest member index.
std::vector<std::vector<int>> agglomerate(
    Eigen::MatrixXd& dist, int target,
    const std::function<double(int i, int j, int k, const std::vector<int>& sizes,
                               const Eigen::MatrixXd& d)>& update) {
  int n = static_cast<int>(dist.rows());
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  std::vector<int> sizes(static_cast<std::size_t>(n), 1);
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};

  int active = n;
  while (active > target) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!alive[static_cast<std::size_t>(j)]) continue;
        if (dist(i, j) < best) {
          best = dist(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    // merge bj into bi (bi < bj keeps the lowest-index representative)
    for (int k = 0; k < n; ++k) {
      if (!alive[static_cast<std::size_t>(k)] || k == bi || k == bj) continue;
      double d = update(bi, bj, k, sizes, dist);
      dist(bi, k) = d;
      dist(k, bi) = d;
    }
    auto& mi = members[static_cast<std::size_t>(bi)];
    auto& mj = members[static_cast<std::size_t>(bj)];
    mi.insert(mi.end(), mj.begin(), mj.end());
    sizes[static_cast<std::size_t>(bi)] += sizes[static_cast<std::size_t>(bj)];
    alive[static_cast<std::size_t>(bj)] = false;
    --active;
  }

  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    if (!alive[static_cast<std::size_t>(i)]) continue;
    auto m = members[static_cast<std::size_t>(i)];
    std::sort(m.begin(), m.end());
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace

RepresentativeSet feature_agglomerate(const Eigen::MatrixXd& x, int max_reps) {
  if (max_reps < 1) throw ConfigError("max_reps must be >= 1");
  int p = static_cast<int>(x.cols());
  int target = std::min(max_reps, p);

  // d(i,j) = 1 - |corr(x_i, x_j)|; constant columns get correlation 0
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::VectorXd norms(p);
  for (int j = 0; j < p; ++j) norms[j] = centered.col(j).norm();
  Eigen::MatrixXd dist(p, p);
  for (int i = 0; i < p; ++i) {
    dist(i, i) = 0.0;
    for (int j = i + 1; j < p; ++j) {
      double c = 0.0;
      if (norms[i] > 1e-300 && norms[j] > 1e-300)
        c = std::abs(centered.col(i).dot(centered.col(j))) / (norms[i] * norms[j]);
      dist(i, j) = dist(j, i) = 1.0 - c;
    }
  }

  auto average_linkage = [](int i, int j, int k, const std::vector<int>& sizes,
                            const Eigen::MatrixXd& d) {
    double ni = sizes[static_cast<std::size_t>(i)];
    double nj = sizes[static_cast<std::size_t>(j)];
    return (ni * d(i, k) + nj * d(j, k)) / (ni + nj);
  };

  RepresentativeSet rs;
  rs.groups = agglomerate(dist, target, average_linkage);
  rs.v.resize(x.rows(), static_cast<Eigen::Index>(rs.groups.size()));
  for (std::size_t g = 0; g < rs.groups.size(); ++g) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.rows());
    for (int j : rs.groups[g]) mean += x.col(j);
    rs.v.col(static_cast<Eigen::Index>(g)) =
        mean / static_cast<double>(rs.groups[g].size());
  }
  return rs;
}

MechanismAssignment kmeans_cluster(const Eigen::MatrixXd& v, int k,
                                   std::uint64_t seed, int max_iter) {
  Eigen::Index n = v.rows();
  if (k < 1 || k > n) throw ConfigError("kmeans: k must be in [1, samples]");

  Rng rng = Rng::derive(seed, 0x6b6d);  // 'km'
  Eigen::MatrixXd centers(k, v.cols());

  // k-means++ seeding
  Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centers.row(0) = v.row(first);
  Eigen::VectorXd d2 = (v.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = v.row(pick);
    d2 = d2.cwiseMin((v.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  Eigen::MatrixXd dists(n, k);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (int c = 0; c < k; ++c)
      dists.col(c) = (v.rowwise() - centers.row(c)).rowwise().squaredNorm();
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      for (int c = 1; c < k; ++c)
        if (dists(i, c) < dists(i, best)) best = c;
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, v.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += v.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
      } else {
        // empty cluster: seize the point farthest from its center
        Eigen::Index far = 0;
        double fd = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          double d = dists(i, labels[static_cast<std::size_t>(i)]);
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        centers.row(c) = v.row(far);
        labels[static_cast<std::size_t>(far)] = c;
      }
    }
  }

  MechanismAssignment m;
  m.method = ClusterMethod::kmeans;
  m.k = k;
  m.c = labels;
  for (int c = 0; c < k; ++c)
    dists.col(c) = (v.rowwise() - centers.row(c)).rowwise().squaredNorm();
  m.e = dists.cwiseSqrt();
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    inertia += dists(i, labels[static_cast<std::size_t>(i)]);
  m.fit_score = inertia;
  return m;
}

MechanismAssignment gmm_cluster(const Eigen::MatrixXd& v, int k,
                                std::uint64_t seed, int max_iter, double reg) {
  Eigen::Index n = v.rows(), d = v.cols();
  if (k < 1 || k > n) throw ConfigError("gmm: k must be in [1, samples]");

  MechanismAssignment init = kmeans_cluster(v, k, seed);
  Eigen::MatrixXd means(k, d);
  Eigen::MatrixXd vars(k, d);
  Eigen::VectorXd weights(k);
  {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(k, d);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      int c = init.c[static_cast<std::size_t>(i)];
      sums.row(c) += v.row(i);
      sq.row(c) += v.row(i).array().square().matrix();
      counts[c] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      double cnt = std::max(counts[c], 1.0);
      means.row(c) = sums.row(c) / cnt;
      vars.row(c) = (sq.row(c) / cnt - means.row(c).array().square().matrix());
      vars.row(c) = vars.row(c).cwiseMax(0.0);
      vars.row(c).array() += reg;
      weights[c] = std::max(counts[c], 1.0) / static_cast<double>(n);
    }
    weights /= weights.sum();
  }

  const double log2pi = std::log(2.0 * 3.14159265358979323846);
  Eigen::MatrixXd logresp(n, k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  double ll = prev_ll;

  for (int iter = 0; iter < max_iter; ++iter) {
    // E-step
    for (int c = 0; c < k; ++c) {
      double logdet = vars.row(c).array().log().sum();
      double lw = std::log(weights[c]);
      for (Eigen::Index i = 0; i < n; ++i) {
        double maha =
            ((v.row(i) - means.row(c)).array().square() / vars.row(c).array()).sum();
        logresp(i, c) = lw - 0.5 * (static_cast<double>(d) * log2pi + logdet + maha);
      }
    }
    ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double mx = logresp.row(i).maxCoeff();
      double lse = mx + std::log((logresp.row(i).array() - mx).exp().sum());
      ll += lse;
      logresp.row(i) = (logresp.row(i).array() - lse).exp();
    }
    if (!std::isfinite(ll)) throw NumericalError("gmm: degenerate likelihood");
    if (iter > 0 && ll - prev_ll < 1e-10 * (1.0 + std::abs(ll))) break;
    prev_ll = ll;

    // M-step (logresp now holds responsibilities)
    Eigen::VectorXd nk = logresp.colwise().sum();
    for (int c = 0; c < k; ++c) {
      double denom = std::max(nk[c], 1e-300);
      means.row(c) = (logresp.col(c).transpose() * v) / denom;
      Eigen::RowVectorXd sq = Eigen::RowVectorXd::Zero(d);
      for (Eigen::Index i = 0; i < n; ++i)
        sq += logresp(i, c) * (v.row(i) - means.row(c)).array().square().matrix();
      vars.row(c) = (sq / denom).cwiseMax(0.0);
      vars.row(c).array() += reg;
      weights[c] = denom / static_cast<double>(n);
    }
    weights /= weights.sum();
  }

  MechanismAssignment m;
  m.method = ClusterMethod::gmm;
  m.k = k;
  m.e = logresp;  // responsibilities from the last E-step
  m.fit_score = ll;
  m.c.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 1; c < k; ++c)
      if (logresp(i, c) > logresp(i, best)) best = c;
    m.c[static_cast<std::size_t>(i)] = best;
  }
  return m;
}

MechanismAssignment agglomerative_cluster(const Eigen::MatrixXd& v, int k) {
  Eigen::Index n = v.rows();
  if (k < 1 || k > n) throw ConfigError("agglomerative: k must be in [1, samples]");

  Eigen::MatrixXd dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // Ward merge cost for singletons is half the squared distance
      double d = 0.5 * (v.row(i) - v.row(j)).squaredNorm();
      dist(i, j) = dist(j, i) = d;
    }
  }

  auto ward = [](int i, int j, int kk, const std::vector<int>& sizes,
                 const Eigen::MatrixXd& d) {
    double ni = sizes[static_cast<std::size_t>(i)];
    double nj = sizes[static_cast<std::size_t>(j)];
    double nk = sizes[static_cast<std::size_t>(kk)];
    double tot = ni + nj + nk;
    return ((ni + nk) * d(i, kk) + (nj + nk) * d(j, kk) - nk * d(i, j)) / tot;
  };

  auto groups = agglomerate(dist, k, ward);

  MechanismAssignment m;
  m.method = ClusterMethod::agglomerative;
  m.k = k;
  m.c.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i : groups[g]) m.c[static_cast<std::size_t>(i)] = static_cast<int>(g);
  m.e = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) m.e(i, m.c[static_cast<std::size_t>(i)]) = 1.0;

  // within-cluster sum of squares, for parity with kmeans fit_score
  double inertia = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(v.cols());
    for (int i : groups[g]) mean += v.row(i);
    mean /= static_cast<double>(groups[g].size());
    for (int i : groups[g]) inertia += (v.row(i) - mean).squaredNorm();
  }
  m.fit_score = inertia;
  return m;
}

MechanismAssignment cluster(const Eigen::MatrixXd& v, int k, ClusterMethod method,
                            std::uint64_t seed) {
  switch (method) {
    case ClusterMethod::kmeans: return kmeans_cluster(v, k, seed);
    case ClusterMethod::gmm: return gmm_cluster(v, k, seed);
    case ClusterMethod::agglomerative: return agglomerative_cluster(v, k);
  }
  throw ConfigError("unknown clustering method");
}

Eigen::MatrixXd learning_matrix(const ActivationTrace& trace,
                                const std::vector<SelectionResult>& selection,
                                const std::optional<std::vector<int>>& limits) {
  if (limits && limits->size() != selection.size())
    throw ConfigError("limits must have one entry per selected layer");

  std::vector<Eigen::MatrixXd> parts;
  Eigen::Index total_cols = 0;
  for (std::size_t l = 0; l < selection.size(); ++l) {
    const auto& sel = selection[l];
    if (sel.selected.empty()) continue;
    const LayerMatrix& lm = trace.layer(sel.layer_id);
    Eigen::MatrixXd rows = masked_rows(lm.data, trace.class_mask);
    Eigen::MatrixXd crit(rows.rows(), static_cast<Eigen::Index>(sel.selected.size()));
    for (std::size_t j = 0; j < sel.selected.size(); ++j)
      crit.col(static_cast<Eigen::Index>(j)) = rows.col(sel.selected[j]);
    if (limits) crit = feature_agglomerate(crit, (*limits)[l]).v;
    total_cols += crit.cols();
    parts.push_back(std::move(crit));
  }
  if (parts.empty()) throw DataError("empty critical set at every layer");

  Eigen::MatrixXd v(parts.front().rows(), total_cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return v;
}

MechanismAssignment neucept_learn(const ActivationTrace& trace,
                                  const std::vector<SelectionResult>& selection,
                                  const std::optional<std::vector<int>>& limits,
                                  int k, ClusterMethod method, std::uint64_t seed) {
  if (selection.empty()) throw ConfigError("selection must be nonempty");
  Eigen::MatrixXd v = learning_matrix(trace, selection, limits);
  return cluster(v, k, method, seed);
}

}  // namespace neucept
