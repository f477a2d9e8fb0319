#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmfs/dataset.hpp"
#include "cmfs/error.hpp"
#include "cmfs/matrix.hpp"

namespace cmfs {

/// Eigenvalues sorted descending; eigenvector column k belongs to
/// eigenvalue k, sign-fixed so each column's largest-magnitude entry is
/// positive.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) sum += static_cast<long double>(a(i, j)) * a(i, j);
  return static_cast<double>(std::sqrt(sum));
}

inline double frobenius_norm(const Matrix& a) {
  long double sum = 0.0L;
  for (double v : a.data()) sum += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(sum));
}

}  // namespace detail

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Converges when
/// the off-diagonal Frobenius norm drops below 1e-12 * ||A||_F, capped at
/// 100 sweeps. Input must be symmetric within 1e-10.
inline EigenDecomposition eigen_symmetric(const Matrix& input) {
  const std::size_t d = input.rows();
  if (d == 0 || input.cols() != d) throw std::invalid_argument("eigen_symmetric: matrix must be square and non-empty");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (std::abs(input(i, j) - input(j, i)) > 1e-10)
        throw std::invalid_argument("eigen_symmetric: matrix not symmetric within 1e-10");

  Matrix a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
  Matrix v = Matrix::identity(d);

  const double threshold = 1e-12 * detail::frobenius_norm(a);
  constexpr int kMaxSweeps = 100;
  double off = detail::off_diagonal_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps && off > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p), aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = a(p, i) = aip - s * (aiq + tau * aip);
          a(i, q) = a(q, i) = aiq + s * (aip - tau * aiq);
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
    off = detail::off_diagonal_norm(a);
  }
  if (off > threshold)
    throw NumericError("eigen_symmetric: no convergence after 100 sweeps, off-diagonal norm " +
                       std::to_string(off));

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition out;
  out.eigenvalues.resize(d);
  out.eigenvectors = Matrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = a(src, src);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < d; ++i)
      if (std::abs(v(i, src)) > std::abs(v(peak, src))) peak = i;
    const double sign = v(peak, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < d; ++i) out.eigenvectors(i, k) = sign * v(i, src);
  }
  return out;
}

/// Squared Euclidean distances between rows. Diagonal exactly 0, symmetric
/// by construction.
inline Matrix pairwise_sq_distances(const Matrix& rows) {
  const std::size_t n = rows.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      long double sum = 0.0L;
      for (std::size_t k = 0; k < rows.cols(); ++k) {
        const long double diff = static_cast<long double>(rows(i, k)) - rows(j, k);
        sum += diff * diff;
      }
      out(i, j) = out(j, i) = static_cast<double>(sum);
    }
  }
  return out;
}

inline Matrix pairwise_sq_distances(const Dataset& data) { return pairwise_sq_distances(data.features); }

}  // namespace cmfs
