#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmfs/dataset.hpp"
#include "cmfs/error.hpp"
#include "cmfs/knn.hpp"
#include "cmfs/scoring.hpp"

namespace cmfs {

/// Protocol knobs: repeated stratified splits, per-split ranking, feature
/// count sweep, kNN accuracy.
struct ExperimentConfig {
  int repetitions = 5;
  double train_fraction = 0.5;
  std::uint32_t base_seed = 1;
  int k_neighbors = 5;               // classifier neighborhood
  double sweep_max_fraction = 0.8;
  double lowdim_fraction = 0.4;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  LaplacianOptions laplacian{};      // ranker neighborhood, independent of k_neighbors

  void validate() const {
    if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
      throw std::invalid_argument("config: train_fraction must be in (0,1)");
    if (!(lowdim_fraction > 0.0 && lowdim_fraction <= sweep_max_fraction && sweep_max_fraction <= 1.0))
      throw std::invalid_argument("config: need 0 < lowdim_fraction <= sweep_max_fraction <= 1");
    if (k_neighbors < 1) throw std::invalid_argument("config: k_neighbors must be >= 1");
    if (methods.empty()) throw std::invalid_argument("config: no methods selected");
  }
};

/// floor(fraction * d), but at least 1.
inline std::size_t scaled_feature_count(double fraction, std::size_t d) {
  const auto scaled = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(d)));
  return std::max<std::size_t>(1, scaled);
}

/// Feature-column subset in the given order.
inline Dataset project_features(const Dataset& data, std::span<const std::size_t> columns) {
  Dataset out;
  out.class_names = data.class_names;
  out.labels = data.labels;
  out.features = Matrix(data.n_samples(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.feature_names.push_back(data.feature_names[columns[c]]);
    for (std::size_t i = 0; i < data.n_samples(); ++i)
      out.features(i, c) = data.features(i, columns[c]);
  }
  return out;
}

/// One split worth of work: everything downstream of the seed. Rankings and
/// standardization statistics come from the training half only.
struct RepetitionResult {
  std::uint32_t seed = 0;
  SplitPair split;
  Standardizer scaler;
  std::vector<FeatureRanking> rankings;             // parallel to config.methods
  std::vector<std::vector<double>> accuracies;      // [method][feature_count_index]
};

inline RepetitionResult run_repetition(const Dataset& data, const ExperimentConfig& config,
                                       int repetition) {
  RepetitionResult result;
  result.seed = config.base_seed + static_cast<std::uint32_t>(repetition);
  result.split = stratified_split(data, config.train_fraction, result.seed);

  const std::size_t train_n = result.split.train.n_samples();
  if (train_n < 2 || result.split.test.n_samples() < 1)
    throw DataError("evaluation: degenerate split (train=" + std::to_string(train_n) + ", test=" +
                    std::to_string(result.split.test.n_samples()) + ") at seed " +
                    std::to_string(result.seed));
  if (static_cast<std::size_t>(config.k_neighbors) > train_n)
    throw DataError("evaluation: k_neighbors=" + std::to_string(config.k_neighbors) +
                    " exceeds training size " + std::to_string(train_n));

  auto [train_std, scaler] = standardize(result.split.train);
  result.scaler = scaler;
  const Dataset test_std = scaler.apply(result.split.test);

  const std::size_t sweep_max = scaled_feature_count(config.sweep_max_fraction, data.n_features());
  for (const Method method : config.methods) {
    FeatureRanking ranking = rank_features(train_std, method, config.laplacian);
    std::vector<double> per_count;
    per_count.reserve(sweep_max);
    for (std::size_t m = 1; m <= sweep_max; ++m) {
      const std::vector<std::size_t> selected = select_top(ranking, m);
      const Dataset train_sel = project_features(train_std, selected);
      const Dataset test_sel = project_features(test_std, selected);
      const std::vector<int> predicted = knn_predict(train_sel, test_sel.features, config.k_neighbors);
      per_count.push_back(accuracy(predicted, test_sel.labels));
    }
    result.rankings.push_back(std::move(ranking));
    result.accuracies.push_back(std::move(per_count));
  }
  return result;
}

/// Mean accuracies per method and feature count, plus the low-dimension
/// aggregate, assembled in repetition order.
struct EvaluationReport {
  ExperimentConfig config;
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  std::string dataset_hash;
  std::vector<std::uint32_t> seeds;
  std::vector<std::size_t> feature_counts;                    // 1..sweep_max
  std::size_t lowdim_max_count = 0;
  std::vector<std::vector<std::vector<double>>> accuracies;   // [method][count][repetition]
  std::vector<std::vector<double>> mean_accuracies;           // [method][count]
  std::vector<double> low_dim_mean;                           // [method]
  std::vector<std::vector<std::vector<std::size_t>>> orders;  // [method][repetition] rank order
};

/// Unweighted mean of the cross-repetition mean accuracies over feature
/// counts 1..lowdim_max_count, for the method at the given position.
inline double mean_accuracy_low_dim(const EvaluationReport& report, std::size_t method_index) {
  if (method_index >= report.mean_accuracies.size())
    throw std::invalid_argument("mean_accuracy_low_dim: method index out of range");
  long double sum = 0.0L;
  std::size_t covered = 0;
  for (std::size_t m = 1; m <= report.lowdim_max_count; ++m) {
    const auto it = std::find(report.feature_counts.begin(), report.feature_counts.end(), m);
    if (it == report.feature_counts.end())
      throw std::invalid_argument("mean_accuracy_low_dim: report missing feature count " +
                                  std::to_string(m));
    sum += report.mean_accuracies[method_index][static_cast<std::size_t>(
        it - report.feature_counts.begin())];
    ++covered;
  }
  return static_cast<double>(sum / covered);
}

inline EvaluationReport run_sweep(const Dataset& data, const ExperimentConfig& config) {
  config.validate();
  if (data.n_features() == 0) throw DataError("evaluation: dataset has no features");

  EvaluationReport report;
  report.config = config;
  report.n_samples = data.n_samples();
  report.n_features = data.n_features();
  report.dataset_hash = fingerprint(data);

  const std::size_t sweep_max = scaled_feature_count(config.sweep_max_fraction, data.n_features());
  report.lowdim_max_count = scaled_feature_count(config.lowdim_fraction, data.n_features());
  for (std::size_t m = 1; m <= sweep_max; ++m) report.feature_counts.push_back(m);

  const std::size_t n_methods = config.methods.size();
  report.accuracies.assign(n_methods, std::vector<std::vector<double>>(sweep_max));
  report.orders.assign(n_methods, {});

  for (int rep = 0; rep < config.repetitions; ++rep) {
    const RepetitionResult result = run_repetition(data, config, rep);
    report.seeds.push_back(result.seed);
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      for (std::size_t ci = 0; ci < sweep_max; ++ci)
        report.accuracies[mi][ci].push_back(result.accuracies[mi][ci]);
      report.orders[mi].push_back(result.rankings[mi].order);
    }
  }

  report.mean_accuracies.assign(n_methods, std::vector<double>(sweep_max, 0.0));
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    for (std::size_t ci = 0; ci < sweep_max; ++ci) {
      const auto& reps = report.accuracies[mi][ci];
      const long double sum = std::accumulate(reps.begin(), reps.end(), 0.0L);
      report.mean_accuracies[mi][ci] = static_cast<double>(sum / reps.size());
    }
    report.low_dim_mean.push_back(0.0);
  }
  for (std::size_t mi = 0; mi < n_methods; ++mi)
    report.low_dim_mean[mi] = mean_accuracy_low_dim(report, mi);
  return report;
}

}  // namespace cmfs
