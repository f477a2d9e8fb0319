#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <cmfs/dataset.hpp>

#include "oracle_helpers.hpp"

namespace {

cmfs::Dataset parse(const std::string& text, cmfs::DelimitedOptions options = {}) {
  std::istringstream in(text);
  return cmfs::parse_delimited(in, options, "<test>");
}

}  // namespace

TEST_CASE("comma input with a header is parsed column by column") {
  const auto data = parse("class,a,b\npos,1.5,2\nneg,3,4.25\npos,5,6\n");
  REQUIRE(data.n_samples() == 3);
  REQUIRE(data.n_features() == 2);
  CHECK(data.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(data.class_names == std::vector<std::string>{"pos", "neg"});
  CHECK(data.labels == std::vector<int>{0, 1, 0});
  CHECK(data.features(0, 0) == 1.5);
  CHECK(data.features(1, 1) == 4.25);
}

TEST_CASE("tab delimiter is detected from the first line") {
  const auto data = parse("class\ta\tb\nx\t1\t2\ny\t3\t4\n");
  REQUIRE(data.n_features() == 2);
  CHECK(data.features(1, 0) == 3.0);
}

TEST_CASE("label column can be picked by header name or index") {
  cmfs::DelimitedOptions by_name;
  by_name.label_column = "mid";
  const auto named = parse("a,mid,b\n1,x,2\n3,y,4\n", by_name);
  CHECK(named.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(named.class_names == std::vector<std::string>{"x", "y"});

  cmfs::DelimitedOptions by_index;
  by_index.label_column = "2";
  const auto indexed = parse("a,b,cls\n1,2,x\n3,4,y\n", by_index);
  CHECK(indexed.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(indexed.features(1, 1) == 4.0);
}

TEST_CASE("headerless input gets synthetic column names") {
  cmfs::DelimitedOptions options;
  options.has_header = false;
  const auto data = parse("x,1,2\ny,3,4\n", options);
  CHECK(data.feature_names == std::vector<std::string>{"f1", "f2"});
  CHECK(data.n_samples() == 2);
}

TEST_CASE("blank lines are skipped") {
  const auto data = parse("class,a\n\npos,1\n\n\nneg,2\n");
  CHECK(data.n_samples() == 2);
}

TEST_CASE("labels are encoded in order of first appearance") {
  const auto data = parse("class,a\nB,1\nA,2\nB,3\nC,4\n");
  CHECK(data.class_names == std::vector<std::string>{"B", "A", "C"});
  CHECK(data.labels == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("malformed input is rejected with the offending location") {
  CHECK_THROWS_AS(parse(""), cmfs::DataError);
  CHECK_THROWS_AS(parse("class,a\n"), cmfs::DataError);
  CHECK_THROWS_WITH(parse("class,a\npos,1\nneg,2,9\n"),
                    Catch::Matchers::ContainsSubstring("row 3"));
  CHECK_THROWS_WITH(parse("class,a\npos,oops\n"), Catch::Matchers::ContainsSubstring("column 2"));
  CHECK_THROWS_WITH(parse("class,a\npos,nan\n"), Catch::Matchers::ContainsSubstring("row 2"));
  CHECK_THROWS_AS(parse("class,a\npos,1\npos,2\n"), cmfs::DataError);  // single class
  cmfs::DelimitedOptions bad_label;
  bad_label.label_column = "missing";
  CHECK_THROWS_WITH(parse("a,b\n1,2\n", bad_label), Catch::Matchers::ContainsSubstring("missing"));
}

TEST_CASE("subset keeps the parent label dictionary") {
  const auto data = parse("class,a\nx,1\ny,2\nz,3\n");
  const std::vector<std::size_t> rows{2};
  const auto sub = data.subset(rows);
  REQUIRE(sub.n_samples() == 1);
  CHECK(sub.labels == std::vector<int>{2});
  CHECK(sub.class_names == data.class_names);
}

TEST_CASE("standardize centers and scales by population moments") {
  const auto data = oracle::dataset_from_columns({{1.0, 2.0, 3.0, 4.0}}, {0, 1, 0, 1});
  const auto [scaled, scaler] = cmfs::standardize(data);
  CHECK(scaler.means[0] == 2.5);
  CHECK_THAT(scaler.stds[0], Catch::Matchers::WithinAbs(std::sqrt(1.25), 1e-15));
  double mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < 4; ++i) mean += scaled.features(i, 0);
  mean /= 4;
  for (std::size_t i = 0; i < 4; ++i)
    var += scaled.features(i, 0) * scaled.features(i, 0);
  var /= 4;
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(0.0, 1e-15));
  CHECK_THAT(var, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("constant columns standardize to zero and are flagged") {
  const auto data = oracle::dataset_from_columns({{7.0, 7.0, 7.0}, {1.0, 2.0, 3.0}}, {0, 1, 0});
  const auto [scaled, scaler] = cmfs::standardize(data);
  CHECK(scaler.degenerate == std::vector<bool>{true, false});
  for (std::size_t i = 0; i < 3; ++i) CHECK(scaled.features(i, 0) == 0.0);
}

TEST_CASE("a fitted standardizer carries its statistics to other data") {
  const auto train = oracle::dataset_from_columns({{0.0, 10.0}}, {0, 1});
  const auto [_, scaler] = cmfs::standardize(train);
  const auto other = oracle::dataset_from_columns({{5.0, 15.0}}, {0, 1});
  const auto mapped = scaler.apply(other);
  CHECK(mapped.features(0, 0) == 0.0);   // (5-5)/5
  CHECK(mapped.features(1, 0) == 2.0);   // (15-5)/5
  const auto back = scaler.invert(mapped);
  CHECK(back.features(0, 0) == 5.0);
  CHECK(back.features(1, 0) == 15.0);
}

TEST_CASE("stratified split partitions rows without overlap") {
  std::mt19937 gen(42);
  const auto data = oracle::random_dataset(gen, 37, 3, 3);
  const auto split = cmfs::stratified_split(data, 0.6, 9);
  std::set<std::size_t> seen(split.train_indices.begin(), split.train_indices.end());
  for (auto i : split.test_indices) CHECK(seen.insert(i).second);
  CHECK(seen.size() == 37);
  CHECK(split.train.n_samples() + split.test.n_samples() == 37);
}

TEST_CASE("per-class train counts stay within one row of the exact share") {
  std::mt19937 gen(7);
  for (const double fraction : {0.3, 0.5, 0.75}) {
    const auto data = oracle::random_dataset(gen, 53, 2, 4);
    const auto split = cmfs::stratified_split(data, fraction, 11);
    std::vector<std::size_t> per_class_total(4, 0), per_class_train(4, 0);
    for (int code : data.labels) ++per_class_total[static_cast<std::size_t>(code)];
    for (auto i : split.train_indices) ++per_class_train[static_cast<std::size_t>(data.labels[i])];
    for (std::size_t c = 0; c < 4; ++c) {
      const double exact = fraction * static_cast<double>(per_class_total[c]);
      CHECK(per_class_train[c] >= static_cast<std::size_t>(std::floor(exact)) - 0);
      CHECK(per_class_train[c] <= static_cast<std::size_t>(std::ceil(exact)));
      CHECK(per_class_train[c] >= 1);
      CHECK(per_class_train[c] <= per_class_total[c] - 1);
    }
    const auto target = static_cast<std::size_t>(std::llround(fraction * 53.0));
    CHECK(split.train.n_samples() == target);
  }
}

TEST_CASE("the 59/71/48 class layout splits into an 89-row training half") {
  std::vector<int> labels;
  for (int i = 0; i < 59; ++i) labels.push_back(0);
  for (int i = 0; i < 71; ++i) labels.push_back(1);
  for (int i = 0; i < 48; ++i) labels.push_back(2);
  std::vector<double> col(labels.size());
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto& v : col) v = dist(gen);
  const auto data = oracle::dataset_from_columns({col}, labels);
  const auto split = cmfs::stratified_split(data, 0.5, 1);
  CHECK(split.train.n_samples() == 89);
  CHECK(split.test.n_samples() == 89);
}

TEST_CASE("splits are reproducible per seed and differ across seeds") {
  std::mt19937 gen(5);
  const auto data = oracle::random_dataset(gen, 40, 2, 2);
  const auto a = cmfs::stratified_split(data, 0.5, 7);
  const auto b = cmfs::stratified_split(data, 0.5, 7);
  CHECK(a.train_indices == b.train_indices);
  CHECK(a.test_indices == b.test_indices);
  const auto c = cmfs::stratified_split(data, 0.5, 8);
  CHECK(a.train_indices != c.train_indices);
}

TEST_CASE("single-instance classes land in exactly one half") {
  const auto data = oracle::dataset_from_columns({{1.0, 2.0, 3.0, 4.0, 5.0}}, {0, 0, 0, 0, 1});
  const auto split = cmfs::stratified_split(data, 0.5, 2);
  std::size_t train_hits = 0;
  for (auto i : split.train_indices)
    if (data.labels[i] == 1) ++train_hits;
  std::size_t test_hits = 0;
  for (auto i : split.test_indices)
    if (data.labels[i] == 1) ++test_hits;
  CHECK(train_hits + test_hits == 1);
}

TEST_CASE("extreme fractions keep both halves populated for 2+ instance classes") {
  std::mt19937 gen(6);
  const auto data = oracle::random_dataset(gen, 20, 2, 2);
  for (const double fraction : {0.05, 0.95}) {
    const auto split = cmfs::stratified_split(data, fraction, 3);
    std::vector<std::size_t> train_c(2, 0), test_c(2, 0);
    for (auto i : split.train_indices) ++train_c[static_cast<std::size_t>(data.labels[i])];
    for (auto i : split.test_indices) ++test_c[static_cast<std::size_t>(data.labels[i])];
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(train_c[c] >= 1);
      CHECK(test_c[c] >= 1);
    }
  }
}

TEST_CASE("invalid split fractions are rejected") {
  std::mt19937 gen(1);
  const auto data = oracle::random_dataset(gen, 10, 2, 2);
  CHECK_THROWS_AS(cmfs::stratified_split(data, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(cmfs::stratified_split(data, 1.0, 1), std::invalid_argument);
}

TEST_CASE("fingerprints are stable and sensitive") {
  std::mt19937 gen(9);
  auto data = oracle::random_dataset(gen, 12, 3, 2);
  const auto h1 = cmfs::fingerprint(data);
  CHECK(h1.size() == 16);
  CHECK(cmfs::fingerprint(data) == h1);
  data.features(3, 1) = std::nextafter(data.features(3, 1), 1e308);
  CHECK(cmfs::fingerprint(data) != h1);
}

TEST_CASE("the bundled wine table has the expected shape") {
  const auto data = cmfs::load_delimited(std::string(CMFS_DATA_DIR) + "/wine.csv");
  CHECK(data.n_samples() == 178);
  CHECK(data.n_features() == 13);
  CHECK(data.n_classes() == 3);
  std::vector<std::size_t> per_class(3, 0);
  for (int code : data.labels) ++per_class[static_cast<std::size_t>(code)];
  CHECK(per_class == std::vector<std::size_t>{59, 71, 48});
  CHECK(data.feature_names[6] == "Flavanoids");
  CHECK(data.feature_names[9] == "Color intensity");
}

TEST_CASE("validate rejects inconsistent datasets") {
  auto data = oracle::dataset_from_columns({{1.0, 2.0}}, {0, 1});
  data.labels.push_back(0);
  CHECK_THROWS_AS(data.validate(), cmfs::DataError);

  auto dup = oracle::dataset_from_columns({{1.0, 2.0}, {3.0, 4.0}}, {0, 1});
  dup.feature_names[1] = dup.feature_names[0];
  CHECK_THROWS_AS(dup.validate(), cmfs::DataError);

  auto gap = oracle::dataset_from_columns({{1.0, 2.0}}, {0, 1});
  gap.class_names.push_back("unused");
  CHECK_THROWS_AS(gap.validate(), cmfs::DataError);
}
