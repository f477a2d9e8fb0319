#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cmfs/error.hpp"
#include "cmfs/matrix.hpp"
#include "cmfs/rng.hpp"

namespace cmfs {

struct DelimitedOptions {
  char delimiter = '\0';          // '\0' = auto: tab if the first line has one, else comma
  bool has_header = true;
  std::string label_column = "0"; // column name, or 0-based column index when numeric
};

/// Numeric feature matrix with integer-encoded labels. Immutable by
/// convention once built; all operations on it return new values.
struct Dataset {
  Matrix features;                         // n_samples x n_features
  std::vector<std::string> feature_names;  // length n_features
  std::vector<int> labels;                 // length n_samples, codes in [0, n_classes)
  std::vector<std::string> class_names;    // indexed by label code

  std::size_t n_samples() const { return features.rows(); }
  std::size_t n_features() const { return features.cols(); }
  std::size_t n_classes() const { return class_names.size(); }

  /// Row subset in the given order. Keeps the parent label dictionary, so
  /// split halves stay code-compatible even when a class lands in one half.
  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.class_names = class_names;
    out.features = Matrix(rows.size(), n_features());
    out.labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto src = features.row(rows[r]);
      std::copy(src.begin(), src.end(), out.features.row(r).begin());
      out.labels.push_back(labels[rows[r]]);
    }
    return out;
  }

  std::vector<double> labels_as_doubles() const {
    std::vector<double> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = static_cast<double>(labels[i]);
    return out;
  }

  /// Enforces the construction invariants; throws DataError on violation.
  void validate() const {
    if (labels.size() != n_samples())
      throw DataError("dataset: label count does not match sample count");
    if (feature_names.size() != n_features())
      throw DataError("dataset: feature name count does not match feature count");
    std::set<std::string> seen;
    for (const auto& name : feature_names) {
      if (name.empty()) throw DataError("dataset: empty feature name");
      if (!seen.insert(name).second) throw DataError("dataset: duplicate feature name '" + name + "'");
    }
    std::vector<bool> present(n_classes(), false);
    for (int code : labels) {
      if (code < 0 || static_cast<std::size_t>(code) >= n_classes())
        throw DataError("dataset: label code out of range");
      present[static_cast<std::size_t>(code)] = true;
    }
    if (!std::all_of(present.begin(), present.end(), [](bool b) { return b; }))
      throw DataError("dataset: some class has no instances");
    for (double v : features.data())
      if (!std::isfinite(v)) throw DataError("dataset: non-finite feature value");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_fields(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == delim) {
      out.emplace_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline bool parse_double(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace detail

/// Parses delimited text into a Dataset. Labels are integer-encoded in
/// first-appearance order of the class strings; column order is preserved.
/// Errors name the offending 1-based row and column.
inline Dataset parse_delimited(std::istream& in, const DelimitedOptions& options,
                               const std::string& source = "<stream>") {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (detail::trim(line).empty()) continue;
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw DataError(source + ": empty input");

  const char delim = options.delimiter != '\0'
                         ? options.delimiter
                         : (lines.front().find('\t') != std::string::npos ? '\t' : ',');

  std::vector<std::string> header;
  std::size_t first_data_line = 0;
  if (options.has_header) {
    header = detail::split_fields(lines.front(), delim);
    first_data_line = 1;
    if (lines.size() == 1) throw DataError(source + ": no data rows");
  }
  const std::size_t n_columns = options.has_header
                                    ? header.size()
                                    : detail::split_fields(lines.front(), delim).size();
  if (n_columns < 2) throw DataError(source + ": need at least one feature column and a label column");

  // resolve label column: numeric spec is a 0-based index, otherwise a header name
  std::size_t label_col = 0;
  {
    const std::string& spec = options.label_column;
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), idx);
    if (ec == std::errc{} && ptr == spec.data() + spec.size()) {
      if (idx >= n_columns)
        throw DataError(source + ": label column index " + spec + " out of range (have " +
                        std::to_string(n_columns) + " columns)");
      label_col = idx;
    } else {
      auto it = std::find(header.begin(), header.end(), spec);
      if (it == header.end()) throw DataError(source + ": label column '" + spec + "' not found in header");
      label_col = static_cast<std::size_t>(it - header.begin());
    }
  }

  Dataset data;
  for (std::size_t c = 0; c < n_columns; ++c) {
    if (c == label_col) continue;
    data.feature_names.push_back(options.has_header ? header[c] : "f" + std::to_string(c));
  }

  const std::size_t n_rows = lines.size() - first_data_line;
  data.features = Matrix(n_rows, n_columns - 1);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const std::size_t file_row = first_data_line + r + 1;  // 1-based for messages
    auto fields = detail::split_fields(lines[first_data_line + r], delim);
    if (fields.size() != n_columns)
      throw DataError(source + ": row " + std::to_string(file_row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " + std::to_string(n_columns));
    std::size_t feat = 0;
    for (std::size_t c = 0; c < n_columns; ++c) {
      if (c == label_col) {
        const std::string& cls = fields[c];
        if (cls.empty())
          throw DataError(source + ": row " + std::to_string(file_row) + " column " +
                          std::to_string(c + 1) + ": empty label");
        auto it = std::find(data.class_names.begin(), data.class_names.end(), cls);
        if (it == data.class_names.end()) {
          data.labels.push_back(static_cast<int>(data.class_names.size()));
          data.class_names.push_back(cls);
        } else {
          data.labels.push_back(static_cast<int>(it - data.class_names.begin()));
        }
      } else {
        double v;
        if (!detail::parse_double(fields[c], v))
          throw DataError(source + ": row " + std::to_string(file_row) + " column " +
                          std::to_string(c + 1) + ": cannot parse '" + fields[c] + "' as a number");
        data.features(r, feat++) = v;
      }
    }
  }

  if (data.class_names.size() < 2)
    throw DataError(source + ": label column is constant (single class '" + data.class_names.front() + "')");
  data.validate();
  return data;
}

inline Dataset load_delimited(const std::string& path, const DelimitedOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  return parse_delimited(in, options, path);
}

/// Per-feature centering/scaling record. Fit on one dataset (usually a
/// training split), applicable to any dataset with the same columns.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;              // population std; 0 for degenerate columns
  std::vector<bool> degenerate;          // true where the fitted column was constant

  Dataset apply(const Dataset& data) const {
    if (data.n_features() != means.size())
      throw std::invalid_argument("standardizer: feature count mismatch");
    Dataset out = data;
    for (std::size_t j = 0; j < means.size(); ++j) {
      for (std::size_t i = 0; i < out.n_samples(); ++i) {
        out.features(i, j) = degenerate[j] ? 0.0 : (out.features(i, j) - means[j]) / stds[j];
      }
    }
    return out;
  }

  Dataset invert(const Dataset& data) const {
    if (data.n_features() != means.size())
      throw std::invalid_argument("standardizer: feature count mismatch");
    Dataset out = data;
    for (std::size_t j = 0; j < means.size(); ++j) {
      for (std::size_t i = 0; i < out.n_samples(); ++i) {
        out.features(i, j) = degenerate[j] ? means[j] : out.features(i, j) * stds[j] + means[j];
      }
    }
    return out;
  }
};

/// Centers each feature to mean 0 and scales to population std 1.
/// Constant columns pass through as all-zero and are flagged degenerate.
inline std::pair<Dataset, Standardizer> standardize(const Dataset& data) {
  const std::size_t n = data.n_samples();
  if (n < 2) throw std::invalid_argument("standardize: need at least 2 samples");
  const std::size_t d = data.n_features();
  Standardizer scaler;
  scaler.means.resize(d);
  scaler.stds.resize(d);
  scaler.degenerate.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    long double sum = 0.0L, sumsq = 0.0L;
    bool constant = true;
    const double first = data.features(0, j);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = data.features(i, j);
      constant = constant && v == first;
      sum += v;
      sumsq += static_cast<long double>(v) * v;
    }
    const long double mean = sum / n;
    const long double var = sumsq / n - mean * mean;
    scaler.means[j] = static_cast<double>(mean);
    scaler.degenerate[j] = constant || var <= 0.0L;
    scaler.stds[j] = scaler.degenerate[j] ? 0.0 : static_cast<double>(std::sqrt(var));
  }
  return {scaler.apply(data), scaler};
}

/// Disjoint train/test row partition with per-class allocation.
struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint32_t seed = 0;
  std::vector<std::size_t> train_indices;  // source row indices, ascending
  std::vector<std::size_t> test_indices;
};

namespace detail {

// Per-class train counts: floor(fraction*m_c) plus largest-remainder extras up
// to a total of round(fraction*n). This reproduces a size-89 training half on
// the 59/71/48 class layout at fraction 0.5, which plain per-class rounding
// cannot (it gives 88 or 90). Counts are then clamped so every class with at
// least 2 instances keeps a row in each half.
inline std::vector<std::size_t> stratified_counts(const std::vector<std::size_t>& class_sizes,
                                                  double fraction) {
  const std::size_t k = class_sizes.size();
  const std::size_t total = std::accumulate(class_sizes.begin(), class_sizes.end(), std::size_t{0});
  const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));

  std::vector<std::size_t> counts(k);
  std::vector<double> remainders(k);
  std::size_t allocated = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = fraction * static_cast<double>(class_sizes[c]);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    remainders[c] = exact - std::floor(exact);
    allocated += counts[c];
  }
  std::vector<std::size_t> by_remainder(k);
  std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; i < k && allocated < target; ++i) {
    ++counts[by_remainder[i]];
    ++allocated;
  }

  auto lo = [&](std::size_t c) { return class_sizes[c] >= 2 ? std::size_t{1} : std::size_t{0}; };
  auto hi = [&](std::size_t c) { return class_sizes[c] >= 2 ? class_sizes[c] - 1 : class_sizes[c]; };
  for (std::size_t c = 0; c < k; ++c) counts[c] = std::clamp(counts[c], lo(c), hi(c));

  // clamping may have shifted the total; rebalance where slack exists
  std::size_t sum = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  for (std::size_t i = 0; sum < target && i < k; ++i) {
    const std::size_t c = by_remainder[i];
    if (counts[c] < hi(c)) { ++counts[c]; ++sum; }
  }
  for (std::size_t i = k; sum > target && i > 0; --i) {
    const std::size_t c = by_remainder[i - 1];
    if (counts[c] > lo(c)) { --counts[c]; --sum; }
  }
  return counts;
}

}  // namespace detail

/// Seeded stratified partition. Same (data, fraction, seed) gives the same
/// split on every platform.
inline SplitPair stratified_split(const Dataset& data, double train_fraction, std::uint32_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("stratified_split: train_fraction must be in (0,1)");
  const std::size_t k = data.n_classes();

  std::vector<std::vector<std::size_t>> class_rows(k);
  for (std::size_t i = 0; i < data.n_samples(); ++i)
    class_rows[static_cast<std::size_t>(data.labels[i])].push_back(i);
  std::vector<std::size_t> class_sizes(k);
  for (std::size_t c = 0; c < k; ++c) class_sizes[c] = class_rows[c].size();

  const auto counts = detail::stratified_counts(class_sizes, train_fraction);

  std::mt19937 gen(seed);
  SplitPair split;
  split.seed = seed;
  for (std::size_t c = 0; c < k; ++c) {
    shuffle_in_place(class_rows[c], gen);
    for (std::size_t i = 0; i < class_rows[c].size(); ++i) {
      (i < counts[c] ? split.train_indices : split.test_indices).push_back(class_rows[c][i]);
    }
  }
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  split.train = data.subset(split.train_indices);
  split.test = data.subset(split.test_indices);
  return split;
}

/// FNV-1a 64 over the dataset's canonical bytes: dimensions, names, label
/// codes, and the IEEE-754 bit patterns of every feature value.
inline std::string fingerprint(const Dataset& data) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void* bytes, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_u64 = [&](std::uint64_t v) { mix(&v, sizeof v); };
  mix_u64(data.n_samples());
  mix_u64(data.n_features());
  for (const auto& name : data.feature_names) mix(name.data(), name.size() + 1);
  for (const auto& name : data.class_names) mix(name.data(), name.size() + 1);
  for (int code : data.labels) mix_u64(static_cast<std::uint64_t>(code));
  for (double v : data.features.data()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    mix_u64(bits);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cmfs
