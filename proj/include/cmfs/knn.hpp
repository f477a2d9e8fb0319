#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "cmfs/dataset.hpp"
#include "cmfs/matrix.hpp"

namespace cmfs {

/// k-nearest-neighbor majority vote with Euclidean distance. Distance ties
/// break by ascending training-row index; vote ties go to the label of the
/// nearest neighbor holding a tied label.
inline std::vector<int> knn_predict(const Dataset& train, const Matrix& queries, int k) {
  if (train.n_samples() == 0) throw std::invalid_argument("knn_predict: empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > train.n_samples())
    throw std::invalid_argument("knn_predict: need 1 <= k <= train size");
  if (queries.cols() != train.n_features())
    throw std::invalid_argument("knn_predict: feature count mismatch");

  const std::size_t n = train.n_samples();
  const auto kk = static_cast<std::size_t>(k);
  std::vector<int> predictions(queries.rows());
  std::vector<std::pair<double, std::size_t>> dist(n);

  for (std::size_t q = 0; q < queries.rows(); ++q) {
    const auto query = queries.row(q);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = train.features.row(i);
      long double sum = 0.0L;
      for (std::size_t j = 0; j < row.size(); ++j) {
        const long double diff = static_cast<long double>(row[j]) - query[j];
        sum += diff * diff;
      }
      dist[i] = {static_cast<double>(sum), i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());

    std::vector<int> votes(train.n_classes(), 0);
    for (std::size_t i = 0; i < kk; ++i) ++votes[static_cast<std::size_t>(train.labels[dist[i].second])];
    const int best = *std::max_element(votes.begin(), votes.end());
    int predicted = -1;
    for (std::size_t i = 0; i < kk; ++i) {
      const int label = train.labels[dist[i].second];
      if (votes[static_cast<std::size_t>(label)] == best) {
        predicted = label;
        break;
      }
    }
    predictions[q] = predicted;
  }
  return predictions;
}

/// Fraction of exact matches.
inline double accuracy(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == actual[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace cmfs
