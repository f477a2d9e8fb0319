#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <cmfs/stats.hpp>

#include "oracle_helpers.hpp"

TEST_CASE("exact linear relations hit the correlation bounds") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> up(x.size()), down(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    up[i] = 3.0 * x[i] - 2.0;
    down[i] = -0.5 * x[i] + 7.0;
  }
  const auto pos = cmfs::pearson(x, up);
  const auto neg = cmfs::pearson(x, down);
  REQUIRE(pos.defined);
  REQUIRE(neg.defined);
  CHECK_THAT(pos.value, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(neg.value, Catch::Matchers::WithinAbs(-1.0, 1e-12));
}

TEST_CASE("the near-linear four-point correlation matches its precomputed value") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{1.0, 2.0, 3.0, 5.0};
  const auto r = cmfs::pearson(x, y);
  REQUIRE(r.defined);
  CHECK_THAT(r.value, Catch::Matchers::WithinAbs(0.98270762982399062, 1e-12));
}

TEST_CASE("zero-variance input yields an undefined correlation, not zero") {
  const std::vector<double> flat{2.0, 2.0, 2.0};
  const std::vector<double> live{1.0, 2.0, 3.0};
  CHECK_FALSE(cmfs::pearson(flat, live).defined);
  CHECK_FALSE(cmfs::pearson(live, flat).defined);
  CHECK_FALSE(cmfs::pearson(flat, flat).defined);
}

TEST_CASE("correlation input contract violations throw") {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(cmfs::pearson(a, b), std::invalid_argument);
  const std::vector<double> single{1.0};
  CHECK_THROWS_AS(cmfs::pearson(single, single), std::invalid_argument);
}

TEST_CASE("single-pass correlation agrees with a two-pass recomputation") {
  std::mt19937 gen(101);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(gen() % 50);
    const auto x = oracle::random_vector(gen, n, -100.0, 100.0);
    const auto y = oracle::random_vector(gen, n, -100.0, 100.0);
    const auto r = cmfs::pearson(x, y);
    if (!r.defined) continue;
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(oracle::pearson_two_pass(x, y), 1e-9));
  }
}

TEST_CASE("correlation survives a large common offset") {
  std::mt19937 gen(7);
  const auto x = oracle::random_vector(gen, 64, 0.0, 1.0);
  const auto y = oracle::random_vector(gen, 64, 0.0, 1.0);
  std::vector<double> xs(x), ys(y);
  for (auto& v : xs) v += 1e6;
  for (auto& v : ys) v += 1e6;
  const auto base = cmfs::pearson(x, y);
  const auto shifted = cmfs::pearson(xs, ys);
  REQUIRE(shifted.defined);
  CHECK_THAT(shifted.value, Catch::Matchers::WithinAbs(base.value, 1e-5));
}

TEST_CASE("correlation matrices are symmetric with a unit diagonal") {
  std::mt19937 gen(11);
  const auto data = oracle::random_dataset(gen, 30, 6, 2);
  const auto corr = cmfs::correlation_matrix(data);
  REQUIRE(corr.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(corr.values(i, i) == 1.0);
    REQUIRE(corr.defined(i, i));
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(corr.values(i, j) == corr.values(j, i));
      CHECK(std::abs(corr.values(i, j)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("degenerate features leave undefined holes in the matrix") {
  const auto data = oracle::dataset_from_columns(
      {{1.0, 2.0, 3.0}, {4.0, 4.0, 4.0}, {2.0, 1.0, 3.0}}, {0, 1, 0});
  const auto corr = cmfs::correlation_matrix(data);
  CHECK_FALSE(corr.defined(1, 1));
  CHECK_FALSE(corr.defined(0, 1));
  CHECK_FALSE(corr.defined(1, 2));
  CHECK(corr.values(0, 1) == 0.0);
  CHECK(corr.defined(0, 2));
  CHECK(corr.defined(0, 0));
}

TEST_CASE("label correlations line up with direct column-label calls") {
  std::mt19937 gen(13);
  const auto data = oracle::random_dataset(gen, 25, 4, 3);
  const auto with_label = cmfs::label_correlations(data);
  const auto label = data.labels_as_doubles();
  REQUIRE(with_label.size() == 4);
  for (std::size_t j = 0; j < 4; ++j) {
    const auto direct = cmfs::pearson(data.features.column(j), label);
    CHECK(with_label[j].defined == direct.defined);
    CHECK(with_label[j].value == direct.value);
  }
}
