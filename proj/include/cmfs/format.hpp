#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cmfs/eval.hpp"
#include "cmfs/scoring.hpp"
#include "cmfs/version.hpp"

namespace cmfs {

enum class OutputFormat { Table, Delimited, Json };

inline std::optional<OutputFormat> format_from_token(std::string_view token) {
  if (token == "table") return OutputFormat::Table;
  if (token == "delimited") return OutputFormat::Delimited;
  if (token == "json" || token == "structured") return OutputFormat::Json;
  return std::nullopt;
}

/// Fixed 6-decimal rendering for tables.
inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Shortest round-trip rendering for machine-readable output.
inline std::string full_precision(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

/// Identity of one run, echoed at the top of every output.
struct RunMeta {
  std::string command;
  std::string dataset_name;  // empty for multi-dataset commands
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string hash;
  std::vector<std::pair<std::string, std::string>> config;  // ordered key=value
};

inline std::string meta_comment_block(const RunMeta& meta) {
  std::ostringstream out;
  out << "# cmfs " << kVersion << "\n";
  out << "# command: " << meta.command << "\n";
  if (!meta.dataset_name.empty())
    out << "# dataset: " << meta.dataset_name << " rows=" << meta.rows << " cols=" << meta.cols
        << " hash=" << meta.hash << "\n";
  out << "# config:";
  for (const auto& [key, value] : meta.config) out << ' ' << key << '=' << value;
  out << "\n";
  return out.str();
}

inline nlohmann::ordered_json meta_json(const RunMeta& meta) {
  nlohmann::ordered_json j;
  j["tool"] = "cmfs";
  j["version"] = kVersion;
  j["command"] = meta.command;
  if (!meta.dataset_name.empty()) {
    j["dataset"] = {{"name", meta.dataset_name}, {"rows", meta.rows}, {"cols", meta.cols}, {"hash", meta.hash}};
  }
  nlohmann::ordered_json config;
  for (const auto& [key, value] : meta.config) config[key] = value;
  j["config"] = config;
  return j;
}

/// Standard ordered key=value echo of an ExperimentConfig.
inline std::vector<std::pair<std::string, std::string>> config_pairs(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.emplace_back("repetitions", std::to_string(config.repetitions));
  pairs.emplace_back("train_fraction", fixed6(config.train_fraction));
  pairs.emplace_back("base_seed", std::to_string(config.base_seed));
  pairs.emplace_back("k", std::to_string(config.k_neighbors));
  pairs.emplace_back("sweep_max_fraction", fixed6(config.sweep_max_fraction));
  pairs.emplace_back("lowdim_fraction", fixed6(config.lowdim_fraction));
  pairs.emplace_back("laplacian_k", std::to_string(config.laplacian.k_neighbors));
  std::string methods;
  for (const Method m : config.methods) {
    if (!methods.empty()) methods += ',';
    methods += method_token(m);
  }
  pairs.emplace_back("methods", methods);
  pairs.emplace_back("classifier", "knn");
  return pairs;
}

namespace detail {

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::size_t name_width(const std::vector<FeatureScoreRecord>& records) {
  std::size_t w = 4;  // "name"
  for (const auto& rec : records) w = std::max(w, rec.feature_name.size());
  return w;
}

}  // namespace detail

// ---------------------------------------------------------------- rank

inline std::string rank_to_table(const FeatureRanking& ranking, const RunMeta& meta) {
  const bool cm = ranking.method == Method::ConfidenceMachine;
  const std::size_t w = detail::name_width(ranking.records);
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << detail::pad("rank", 5) << detail::pad("index", 6) << detail::pad("name", w + 2);
  if (cm)
    out << detail::pad("relevance", 11) << detail::pad("redundancy", 12)
        << detail::pad("nonconformity", 15) << detail::pad("p_value", 9);
  else
    out << detail::pad("score", 10);
  out << "degenerate\n";
  for (std::size_t r = 0; r < ranking.order.size(); ++r) {
    const auto& rec = ranking.records[ranking.order[r]];
    out << detail::pad(std::to_string(r + 1), 5) << detail::pad(std::to_string(rec.feature_index), 6)
        << detail::pad(rec.feature_name, w + 2);
    if (cm)
      out << detail::pad(fixed6(rec.relevance), 11) << detail::pad(fixed6(rec.redundancy), 12)
          << detail::pad(fixed6(rec.nonconformity), 15) << detail::pad(fixed6(rec.p_value), 9);
    else
      out << detail::pad(fixed6(rec.baseline_score), 10);
    out << (rec.degenerate ? "yes" : "no") << "\n";
  }
  return out.str();
}

inline std::string rank_to_delimited(const FeatureRanking& ranking, const RunMeta& meta) {
  const bool cm = ranking.method == Method::ConfidenceMachine;
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << "rank\tindex\tname\t"
      << (cm ? "relevance\tredundancy\tnonconformity\tp_value" : "score") << "\tdegenerate\n";
  for (std::size_t r = 0; r < ranking.order.size(); ++r) {
    const auto& rec = ranking.records[ranking.order[r]];
    out << (r + 1) << '\t' << rec.feature_index << '\t' << rec.feature_name << '\t';
    if (cm)
      out << full_precision(rec.relevance) << '\t' << full_precision(rec.redundancy) << '\t'
          << full_precision(rec.nonconformity) << '\t' << full_precision(rec.p_value);
    else
      out << full_precision(rec.baseline_score);
    out << '\t' << (rec.degenerate ? "yes" : "no") << "\n";
  }
  return out.str();
}

inline std::string rank_to_json(const FeatureRanking& ranking, const RunMeta& meta) {
  const bool cm = ranking.method == Method::ConfidenceMachine;
  nlohmann::ordered_json j = meta_json(meta);
  j["method"] = std::string(method_token(ranking.method));
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < ranking.order.size(); ++r) {
    const auto& rec = ranking.records[ranking.order[r]];
    nlohmann::ordered_json row;
    row["rank"] = r + 1;
    row["index"] = rec.feature_index;
    row["name"] = rec.feature_name;
    if (cm) {
      row["relevance"] = rec.relevance;
      row["redundancy"] = rec.redundancy;
      row["nonconformity"] = rec.nonconformity;
      row["p_value"] = rec.p_value;
    } else {
      row["score"] = rec.baseline_score;
    }
    row["degenerate"] = rec.degenerate;
    rows.push_back(row);
  }
  j["features"] = rows;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- select

inline std::string select_to_table(const FeatureRanking& ranking, std::span<const std::size_t> chosen,
                                   const RunMeta& meta) {
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << detail::pad("rank", 5) << detail::pad("index", 6) << "name\n";
  for (std::size_t r = 0; r < chosen.size(); ++r)
    out << detail::pad(std::to_string(r + 1), 5) << detail::pad(std::to_string(chosen[r]), 6)
        << ranking.records[chosen[r]].feature_name << "\n";
  return out.str();
}

inline std::string select_to_delimited(const FeatureRanking& ranking,
                                       std::span<const std::size_t> chosen, const RunMeta& meta) {
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << "rank\tindex\tname\n";
  for (std::size_t r = 0; r < chosen.size(); ++r)
    out << (r + 1) << '\t' << chosen[r] << '\t' << ranking.records[chosen[r]].feature_name << "\n";
  return out.str();
}

inline std::string select_to_json(const FeatureRanking& ranking, std::span<const std::size_t> chosen,
                                  const RunMeta& meta) {
  nlohmann::ordered_json j = meta_json(meta);
  j["method"] = std::string(method_token(ranking.method));
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < chosen.size(); ++r)
    rows.push_back({{"rank", r + 1}, {"index", chosen[r]}, {"name", ranking.records[chosen[r]].feature_name}});
  j["selected"] = rows;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- evaluate

inline std::string report_to_table(const EvaluationReport& report, const RunMeta& meta) {
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << "# seeds:";
  for (const auto seed : report.seeds) out << ' ' << seed;
  out << "\n";
  out << detail::pad("method", 11) << detail::pad("m", 4) << "mean_accuracy\n";
  for (std::size_t mi = 0; mi < report.config.methods.size(); ++mi)
    for (std::size_t ci = 0; ci < report.feature_counts.size(); ++ci)
      out << detail::pad(std::string(method_token(report.config.methods[mi])), 11)
          << detail::pad(std::to_string(report.feature_counts[ci]), 4)
          << fixed6(report.mean_accuracies[mi][ci]) << "\n";
  out << "# mean accuracy in low dimension (m = 1.." << report.lowdim_max_count << ")\n";
  for (std::size_t mi = 0; mi < report.config.methods.size(); ++mi)
    out << detail::pad(std::string(method_token(report.config.methods[mi])), 11)
        << fixed6(report.low_dim_mean[mi]) << "\n";
  return out.str();
}

/// Long form: one row per method x feature_count x repetition.
inline std::string report_to_delimited(const EvaluationReport& report, const RunMeta& meta) {
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << "method\tfeature_count\trepetition\tseed\taccuracy\n";
  for (std::size_t mi = 0; mi < report.config.methods.size(); ++mi)
    for (std::size_t ci = 0; ci < report.feature_counts.size(); ++ci)
      for (std::size_t rep = 0; rep < report.seeds.size(); ++rep)
        out << method_token(report.config.methods[mi]) << '\t' << report.feature_counts[ci] << '\t'
            << rep << '\t' << report.seeds[rep] << '\t'
            << full_precision(report.accuracies[mi][ci][rep]) << "\n";
  return out.str();
}

inline std::string report_to_json(const EvaluationReport& report, const RunMeta& meta) {
  nlohmann::ordered_json j = meta_json(meta);
  j["seeds"] = report.seeds;
  j["feature_counts"] = report.feature_counts;
  j["lowdim_max_count"] = report.lowdim_max_count;
  nlohmann::ordered_json methods = nlohmann::ordered_json::array();
  for (std::size_t mi = 0; mi < report.config.methods.size(); ++mi) {
    nlohmann::ordered_json entry;
    entry["method"] = std::string(method_token(report.config.methods[mi]));
    entry["mean_accuracies"] = report.mean_accuracies[mi];
    entry["accuracies"] = report.accuracies[mi];
    entry["low_dim_mean"] = report.low_dim_mean[mi];
    entry["rank_orders"] = report.orders[mi];
    methods.push_back(entry);
  }
  j["methods"] = methods;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- viz

/// Scatter records for the 2-D case study: per test sample, the values of
/// the two top-ranked features plus the class name.
struct VizData {
  std::string feature_x;
  std::string feature_y;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::string> class_names;  // per sample
};

inline std::string viz_to_table(const VizData& viz, const RunMeta& meta) {
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << "# features: " << viz.feature_x << " | " << viz.feature_y << "\n";
  const std::size_t w = std::max<std::size_t>(12, std::max(viz.feature_x.size(), viz.feature_y.size()) + 2);
  out << detail::pad(viz.feature_x, w) << detail::pad(viz.feature_y, w) << "class\n";
  for (std::size_t i = 0; i < viz.x.size(); ++i)
    out << detail::pad(fixed6(viz.x[i]), w) << detail::pad(fixed6(viz.y[i]), w) << viz.class_names[i]
        << "\n";
  return out.str();
}

inline std::string viz_to_delimited(const VizData& viz, const RunMeta& meta) {
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << "# features: " << viz.feature_x << " | " << viz.feature_y << "\n";
  out << viz.feature_x << '\t' << viz.feature_y << "\tclass\n";
  for (std::size_t i = 0; i < viz.x.size(); ++i)
    out << full_precision(viz.x[i]) << '\t' << full_precision(viz.y[i]) << '\t' << viz.class_names[i]
        << "\n";
  return out.str();
}

inline std::string viz_to_json(const VizData& viz, const RunMeta& meta) {
  nlohmann::ordered_json j = meta_json(meta);
  j["features"] = {viz.feature_x, viz.feature_y};
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < viz.x.size(); ++i)
    points.push_back({{"x", viz.x[i]}, {"y", viz.y[i]}, {"class", viz.class_names[i]}});
  j["points"] = points;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- bench

struct BenchEntry {
  std::string dataset_name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string hash;
  std::vector<double> low_dim_pct;  // parallel to methods
  std::size_t best_method = 0;
};

struct BenchFailure {
  std::string dataset_name;
  std::string message;
};

struct BenchReport {
  std::vector<Method> methods;
  std::vector<BenchEntry> entries;
  std::vector<BenchFailure> failures;
};

inline std::string bench_to_table(const BenchReport& bench, const RunMeta& meta) {
  std::ostringstream out;
  out << meta_comment_block(meta);
  for (const auto& entry : bench.entries)
    out << "# dataset: " << entry.dataset_name << " rows=" << entry.rows << " cols=" << entry.cols
        << " hash=" << entry.hash << "\n";
  std::size_t w = 7;
  for (const auto& entry : bench.entries) w = std::max(w, entry.dataset_name.size());
  out << detail::pad("dataset", w + 2) << detail::pad("method", 11) << detail::pad("lowdim_pct", 12)
      << "best\n";
  for (const auto& entry : bench.entries)
    for (std::size_t mi = 0; mi < bench.methods.size(); ++mi)
      out << detail::pad(entry.dataset_name, w + 2)
          << detail::pad(std::string(method_token(bench.methods[mi])), 11)
          << detail::pad(fixed6(entry.low_dim_pct[mi]), 12) << (mi == entry.best_method ? "*" : "-")
          << "\n";
  for (const auto& failure : bench.failures)
    out << "# error: " << failure.dataset_name << ": " << failure.message << "\n";
  return out.str();
}

inline std::string bench_to_delimited(const BenchReport& bench, const RunMeta& meta) {
  std::ostringstream out;
  out << meta_comment_block(meta);
  out << "dataset\tmethod\tlowdim_accuracy_pct\tbest\n";
  for (const auto& entry : bench.entries)
    for (std::size_t mi = 0; mi < bench.methods.size(); ++mi)
      out << entry.dataset_name << '\t' << method_token(bench.methods[mi]) << '\t'
          << full_precision(entry.low_dim_pct[mi]) << '\t' << (mi == entry.best_method ? 1 : 0)
          << "\n";
  for (const auto& failure : bench.failures)
    out << "# error: " << failure.dataset_name << ": " << failure.message << "\n";
  return out.str();
}

inline std::string bench_to_json(const BenchReport& bench, const RunMeta& meta) {
  nlohmann::ordered_json j = meta_json(meta);
  nlohmann::ordered_json datasets = nlohmann::ordered_json::array();
  for (const auto& entry : bench.entries) {
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (std::size_t mi = 0; mi < bench.methods.size(); ++mi)
      results.push_back({{"method", std::string(method_token(bench.methods[mi]))},
                         {"low_dim_pct", entry.low_dim_pct[mi]},
                         {"best", mi == entry.best_method}});
    datasets.push_back({{"name", entry.dataset_name},
                        {"rows", entry.rows},
                        {"cols", entry.cols},
                        {"hash", entry.hash},
                        {"results", results}});
  }
  j["datasets"] = datasets;
  nlohmann::ordered_json errors = nlohmann::ordered_json::array();
  for (const auto& failure : bench.failures)
    errors.push_back({{"dataset", failure.dataset_name}, {"message", failure.message}});
  j["errors"] = errors;
  return j.dump(2) + "\n";
}

}  // namespace cmfs
