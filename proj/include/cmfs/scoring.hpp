#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cmfs/dataset.hpp"
#include "cmfs/linalg.hpp"
#include "cmfs/stats.hpp"

namespace cmfs {

enum class Method { ConfidenceMachine, Pearson, LaplacianScore, Pca };

inline constexpr std::array<Method, 4> kAllMethods = {
    Method::ConfidenceMachine, Method::Pearson, Method::LaplacianScore, Method::Pca};

constexpr std::string_view method_token(Method m) {
  switch (m) {
    case Method::ConfidenceMachine: return "cm";
    case Method::Pearson: return "pearson";
    case Method::LaplacianScore: return "laplacian";
    case Method::Pca: return "pca";
  }
  return "?";
}

inline std::optional<Method> method_from_token(std::string_view token) {
  for (Method m : kAllMethods)
    if (method_token(m) == token) return m;
  return std::nullopt;
}

/// Per-feature scores. The relevance/redundancy/nonconformity/p_value block
/// is populated by the confidence-machine ranker, baseline_score by the
/// other three.
struct FeatureScoreRecord {
  std::size_t feature_index = 0;
  std::string feature_name;
  double relevance = 0.0;       // Pl
  double redundancy = 0.0;      // Ps
  double nonconformity = 0.0;   // alpha
  double p_value = 0.0;
  double baseline_score = 0.0;
  bool degenerate = false;
};

/// Records in feature-index order plus the rank permutation, best first.
struct FeatureRanking {
  Method method = Method::ConfidenceMachine;
  std::vector<FeatureScoreRecord> records;
  std::vector<std::size_t> order;
};

/// Relevance Pl_i = |pearson(feature i, label)|; undefined correlations
/// contribute 0.
inline std::vector<double> relevance_scores(const std::vector<PearsonResult>& corr_with_label) {
  std::vector<double> pl(corr_with_label.size());
  for (std::size_t i = 0; i < pl.size(); ++i)
    pl[i] = corr_with_label[i].defined ? std::abs(corr_with_label[i].value) : 0.0;
  return pl;
}

/// Redundancy Ps_i = sum over j != i of |corr(i,j)|, undefined entries as 0.
inline std::vector<double> redundancy_scores(const CorrelationMatrix& corr) {
  const std::size_t d = corr.size();
  std::vector<double> ps(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (j != i && corr.defined(i, j)) ps[i] += std::abs(corr.values(i, j));
  return ps;
}

/// Nonconformity alpha_i = Pl_i / max(Ps_i, 1e-12).
inline std::vector<double> nonconformity_scores(std::span<const double> pl,
                                                std::span<const double> ps) {
  if (pl.size() != ps.size()) throw std::invalid_argument("nonconformity_scores: length mismatch");
  std::vector<double> alpha(pl.size());
  for (std::size_t i = 0; i < pl.size(); ++i) alpha[i] = pl[i] / std::max(ps[i], 1e-12);
  return alpha;
}

/// p_k = #{i : alpha_i > alpha_k} / n. Computed from one sorted copy; ties
/// share a p-value.
inline std::vector<double> conformal_p_values(std::span<const double> alpha) {
  if (alpha.empty()) throw std::invalid_argument("conformal_p_values: empty input");
  const std::size_t n = alpha.size();
  std::vector<double> sorted(alpha.begin(), alpha.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> p(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto greater = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), alpha[k]);
    p[k] = static_cast<double>(greater) / static_cast<double>(n);
  }
  return p;
}

namespace detail {

/// Rank permutation: non-degenerate before degenerate, then by key in the
/// requested direction, ties by ascending feature index.
inline std::vector<std::size_t> build_order(std::span<const double> keys,
                                            const std::vector<bool>& degenerate, bool descending) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (degenerate[a] != degenerate[b]) return !degenerate[a];
    if (keys[a] != keys[b]) return descending ? keys[a] > keys[b] : keys[a] < keys[b];
    return a < b;
  });
  return order;
}

inline FeatureRanking assemble(const Dataset& data, Method method, std::span<const double> keys,
                               const std::vector<bool>& degenerate, bool descending) {
  FeatureRanking ranking;
  ranking.method = method;
  ranking.records.resize(data.n_features());
  for (std::size_t i = 0; i < data.n_features(); ++i) {
    auto& rec = ranking.records[i];
    rec.feature_index = i;
    rec.feature_name = data.feature_names[i];
    rec.baseline_score = keys[i];
    rec.degenerate = degenerate[i];
  }
  ranking.order = build_order(keys, degenerate, descending);
  return ranking;
}

}  // namespace detail

/// The confidence-machine pipeline: correlations -> relevance -> redundancy
/// -> nonconformity -> conformal p-values, ranked by alpha descending
/// (equivalently p ascending), degenerate features last.
inline FeatureRanking rank_confidence_machine(const Dataset& data) {
  const CorrelationMatrix corr = correlation_matrix(data);
  const std::vector<PearsonResult> with_label = label_correlations(data);
  const std::vector<double> pl = relevance_scores(with_label);
  const std::vector<double> ps = redundancy_scores(corr);
  const std::vector<double> alpha = nonconformity_scores(pl, ps);
  const std::vector<double> p = conformal_p_values(alpha);

  const std::size_t d = data.n_features();
  std::vector<bool> degenerate(d);
  for (std::size_t i = 0; i < d; ++i) degenerate[i] = !with_label[i].defined;

  FeatureRanking ranking;
  ranking.method = Method::ConfidenceMachine;
  ranking.records.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    auto& rec = ranking.records[i];
    rec.feature_index = i;
    rec.feature_name = data.feature_names[i];
    rec.relevance = pl[i];
    rec.redundancy = ps[i];
    rec.nonconformity = degenerate[i] ? 0.0 : alpha[i];
    rec.p_value = p[i];
    rec.degenerate = degenerate[i];
  }
  std::vector<double> keys(d);
  for (std::size_t i = 0; i < d; ++i) keys[i] = ranking.records[i].nonconformity;
  ranking.order = detail::build_order(keys, degenerate, /*descending=*/true);
  return ranking;
}

/// Baseline: |pearson(feature, label)|, largest first.
inline FeatureRanking rank_pearson(const Dataset& data) {
  const std::vector<PearsonResult> with_label = label_correlations(data);
  const std::vector<double> scores = relevance_scores(with_label);
  std::vector<bool> degenerate(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) degenerate[i] = !with_label[i].defined;
  return detail::assemble(data, Method::Pearson, scores, degenerate, /*descending=*/true);
}

struct LaplacianOptions {
  int k_neighbors = 5;
  double bandwidth = 0.0;  // <= 0 selects the mean of the nonzero kNN squared distances
};

/// Heat-kernel weights over the either-is-neighbor kNN graph.
struct NeighborGraph {
  Matrix weights;
  double bandwidth = 0.0;  // the resolved value
};

inline NeighborGraph knn_heat_graph(const Matrix& sq_distances, int k_neighbors, double bandwidth = 0.0) {
  const std::size_t n = sq_distances.rows();
  if (k_neighbors < 1 || static_cast<std::size_t>(k_neighbors) >= n)
    throw std::invalid_argument("knn_heat_graph: need 1 <= k_neighbors < n_samples");
  const auto k = static_cast<std::size_t>(k_neighbors);

  std::vector<std::vector<std::size_t>> neighbors(n);
  std::vector<double> knn_sq;
  knn_sq.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> idx;
    idx.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) idx.push_back(j);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (sq_distances(i, a) != sq_distances(i, b)) return sq_distances(i, a) < sq_distances(i, b);
      return a < b;
    });
    idx.resize(k);
    for (std::size_t j : idx) knn_sq.push_back(sq_distances(i, j));
    neighbors[i] = std::move(idx);
  }

  double t = bandwidth;
  if (t <= 0.0) {
    long double sum = 0.0L;
    std::size_t count = 0;
    for (double v : knn_sq)
      if (v > 0.0) {
        sum += v;
        ++count;
      }
    t = count > 0 ? static_cast<double>(sum / count) : 1.0;
  }

  NeighborGraph graph;
  graph.bandwidth = t;
  graph.weights = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : neighbors[i])
      graph.weights(i, j) = graph.weights(j, i) = std::exp(-sq_distances(i, j) / t);
  return graph;
}

/// Laplacian score per feature: variance along the neighborhood graph over
/// degree-weighted variance, smaller is better. Constant features and zero
/// denominators are degenerate and sort last.
inline FeatureRanking rank_laplacian(const Dataset& data, const LaplacianOptions& options = {}) {
  const std::size_t n = data.n_samples();
  const std::size_t d = data.n_features();
  const NeighborGraph graph = knn_heat_graph(pairwise_sq_distances(data), options.k_neighbors,
                                             options.bandwidth);

  std::vector<double> degree(n, 0.0);
  long double degree_total = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    long double row = 0.0L;
    for (std::size_t j = 0; j < n; ++j) row += graph.weights(i, j);
    degree[i] = static_cast<double>(row);
    degree_total += row;
  }

  std::vector<double> scores(d, 0.0);
  std::vector<bool> degenerate(d, false);
  for (std::size_t r = 0; r < d; ++r) {
    const std::vector<double> f = data.features.column(r);
    const bool constant = std::all_of(f.begin(), f.end(), [&](double v) { return v == f[0]; });
    if (constant || degree_total <= 0.0L) {
      degenerate[r] = true;
      continue;
    }
    long double weighted_sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) weighted_sum += static_cast<long double>(f[i]) * degree[i];
    const double shift = static_cast<double>(weighted_sum / degree_total);

    // f~ L f~ via the edge form 1/2 sum W_ij (fi - fj)^2; f~ D f~ directly
    long double numerator = 0.0L, denominator = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const long double fi = f[i] - shift;
      denominator += fi * fi * degree[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        const long double diff = static_cast<long double>(f[i]) - f[j];
        numerator += graph.weights(i, j) * diff * diff;
      }
    }
    if (denominator <= 0.0L) {
      degenerate[r] = true;
      continue;
    }
    scores[r] = static_cast<double>(numerator / denominator);
  }
  return detail::assemble(data, Method::LaplacianScore, scores, degenerate, /*descending=*/false);
}

/// Baseline: magnitude of each feature's loading on the top principal
/// component of the feature correlation matrix, largest first.
inline FeatureRanking rank_pca(const Dataset& data) {
  const CorrelationMatrix corr = correlation_matrix(data);
  const std::size_t d = corr.size();
  Matrix a = corr.values;           // undefined entries already hold 0
  std::vector<bool> degenerate(d);
  for (std::size_t i = 0; i < d; ++i) {
    degenerate[i] = !corr.defined(i, i);
    a(i, i) = 1.0;                  // restore unit diagonal for degenerate features
  }
  const EigenDecomposition eig = eigen_symmetric(a);
  std::vector<double> scores(d);
  for (std::size_t i = 0; i < d; ++i) scores[i] = std::abs(eig.eigenvectors(i, 0));
  return detail::assemble(data, Method::Pca, scores, degenerate, /*descending=*/true);
}

inline FeatureRanking rank_features(const Dataset& data, Method method,
                                    const LaplacianOptions& laplacian = {}) {
  switch (method) {
    case Method::ConfidenceMachine: return rank_confidence_machine(data);
    case Method::Pearson: return rank_pearson(data);
    case Method::LaplacianScore: return rank_laplacian(data, laplacian);
    case Method::Pca: return rank_pca(data);
  }
  throw std::invalid_argument("rank_features: unknown method");
}

/// First m entries of the rank order.
inline std::vector<std::size_t> select_top(const FeatureRanking& ranking, std::size_t m) {
  if (m < 1 || m > ranking.order.size())
    throw std::invalid_argument("select_top: m must be in [1, n_features]");
  return {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(m)};
}

}  // namespace cmfs
