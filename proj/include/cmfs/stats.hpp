#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "cmfs/dataset.hpp"
#include "cmfs/matrix.hpp"

namespace cmfs {

/// A correlation that may be undefined (zero variance on either side).
struct PearsonResult {
  double value = 0.0;
  bool defined = false;
};

/// Pearson correlation, population normalization, single-pass sums in long
/// double. Undefined (not 0) when either input has zero variance.
inline PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 observations");
  const std::size_t n = x.size();

  long double sx = 0.0L, sy = 0.0L, sxx = 0.0L, syy = 0.0L, sxy = 0.0L;
  bool x_const = true, y_const = true;
  for (std::size_t i = 0; i < n; ++i) {
    const long double xi = x[i], yi = y[i];
    x_const = x_const && x[i] == x[0];
    y_const = y_const && y[i] == y[0];
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    syy += yi * yi;
    sxy += xi * yi;
  }
  const long double mx = sx / n, my = sy / n;
  const long double var_x = sxx / n - mx * mx;
  const long double var_y = syy / n - my * my;
  if (x_const || y_const || var_x <= 0.0L || var_y <= 0.0L) return {0.0, false};
  const long double cov = sxy / n - mx * my;
  return {static_cast<double>(cov / (std::sqrt(var_x) * std::sqrt(var_y))), true};
}

/// Symmetric feature-feature correlation table. `defined` is false where
/// either column is degenerate; those entries hold 0 but carry no meaning.
struct CorrelationMatrix {
  Matrix values;
  std::vector<bool> defined_mask;  // row-major d x d

  std::size_t size() const { return values.rows(); }
  bool defined(std::size_t i, std::size_t j) const { return defined_mask[i * size() + j]; }
};

/// Pairwise correlations between feature columns. Entry (i,j) equals
/// pearson(column i, column j); the diagonal is exactly 1 for non-degenerate
/// features; symmetry is exact by construction.
inline CorrelationMatrix correlation_matrix(const Dataset& data) {
  const std::size_t d = data.n_features();
  if (data.n_samples() < 2) throw std::invalid_argument("correlation_matrix: need at least 2 samples");
  std::vector<std::vector<double>> cols(d);
  for (std::size_t j = 0; j < d; ++j) cols[j] = data.features.column(j);

  CorrelationMatrix corr;
  corr.values = Matrix(d, d);
  corr.defined_mask.assign(d * d, false);
  std::vector<bool> degenerate(d);
  for (std::size_t j = 0; j < d; ++j) {
    degenerate[j] = !pearson(cols[j], cols[j]).defined;
    if (!degenerate[j]) {
      corr.values(j, j) = 1.0;
      corr.defined_mask[j * d + j] = true;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (degenerate[i] || degenerate[j]) continue;
      const PearsonResult r = pearson(cols[i], cols[j]);
      corr.values(i, j) = corr.values(j, i) = r.value;
      corr.defined_mask[i * d + j] = corr.defined_mask[j * d + i] = r.defined;
    }
  }
  return corr;
}

/// Correlation of each feature column with the integer-coded label vector.
inline std::vector<PearsonResult> label_correlations(const Dataset& data) {
  const std::vector<double> label = data.labels_as_doubles();
  std::vector<PearsonResult> out(data.n_features());
  for (std::size_t j = 0; j < data.n_features(); ++j)
    out[j] = pearson(data.features.column(j), label);
  return out;
}

}  // namespace cmfs
