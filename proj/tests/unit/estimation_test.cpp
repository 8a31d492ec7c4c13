#include "helpers.hpp"
#include "wtpc/errors.hpp"
#include "wtpc/estimation.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <random>
#include <vector>

using namespace wtpc;

namespace {

/// Reference implementation: group by quantized wind with a double loop and
/// average the within-group squared deviations from the group mean.
double naive_lower_bound(const CleanDataset& data) {
  double sse = 0.0;
  std::size_t n = 0;
  std::vector<bool> used(data.records.size(), false);
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    if (used[i]) continue;
    std::vector<double> group;
    for (std::size_t j = i; j < data.records.size(); ++j) {
      if (to_tenths(*data.records[j].wind) == to_tenths(*data.records[i].wind)) {
        group.push_back(*data.records[j].power);
        used[j] = true;
      }
    }
    double mean = 0.0;
    for (double p : group) mean += p;
    mean /= static_cast<double>(group.size());
    for (double p : group) sse += (p - mean) * (p - mean);
    n += group.size();
  }
  return sse / static_cast<double>(n);
}

CleanDataset random_corpus(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> wind(3.0, 16.0);
  std::normal_distribution<double> noise(0.0, 50.0);
  std::vector<double> winds, powers;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = quantize1(wind(rng));
    winds.push_back(w);
    powers.push_back(quantize1(100.0 * w + noise(rng)));
  }
  CleanDataset data;
  data.records = testutil::grid_records(winds, powers);
  data.report.raw = data.report.retained = static_cast<long long>(n);
  return data;
}

}  // namespace

TEST_CASE("quantized-regressor mse floor matches a double-loop reference") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(5, 500);
  for (int rep = 0; rep < 25; ++rep) {
    const auto data = random_corpus(rng, size(rng));
    const double fast = mse_lower_bound(data);
    const double naive = naive_lower_bound(data);
    CHECK(std::abs(fast - naive) <= 1e-12 * std::max(1.0, std::abs(naive)));
  }
}

TEST_CASE("binned statistics aggregate per quantized wind value") {
  CleanDataset data;
  data.records = testutil::grid_records({5.0, 5.0, 5.1, 5.0}, {100.0, 200.0, 400.0, 300.0});
  data.report.raw = data.report.retained = 4;
  const auto stats = binned_means(data);
  REQUIRE(stats.bins.size() == 2);
  CHECK(stats.total == 4);
  CHECK(stats.bins[0].wind_tenths == 50);
  CHECK(stats.bins[0].count == 3);
  CHECK(stats.bins[0].mean == doctest::Approx(200.0));
  CHECK(stats.bins[0].ss == doctest::Approx(20000.0));
  CHECK(stats.bins[1].count == 1);
  CHECK(stats.bins[1].ss == doctest::Approx(0.0));
  // The floor is the count-weighted average of within-bin variances.
  CHECK(mse_lower_bound(data) == doctest::Approx(20000.0 / 4.0));
}

TEST_CASE("least squares solution is optimal and reports the design rank") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 1.0);
  const int n = 120, k = 4;
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double t = i / 30.0;
    X(i, 0) = 1.0;
    X(i, 1) = t;
    X(i, 2) = t * t;
    X(i, 3) = std::sin(t);
    y(i) = 2.0 - t + 0.3 * t * t + noise(rng);
  }
  const auto ls = solve_least_squares(X, y, k, "test");
  CHECK(ls.rank == k);
  const double base = (y - X * ls.coef).squaredNorm() / n;
  CHECK(ls.train_mse == doctest::Approx(base).epsilon(1e-12));
  for (int j = 0; j < k; ++j) {
    for (double bump : {1e-3, -1e-3}) {
      Eigen::VectorXd p = ls.coef;
      p(j) += bump;
      CHECK((y - X * p).squaredNorm() / n >= base - 1e-12);
    }
  }
}

TEST_CASE("rank deficiency beyond regressor saturation is an error") {
  Eigen::MatrixXd X(6, 3);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i;
    X(i, 2) = 2.0 * i;  // collinear with column 1
    y(i) = i;
  }
  CHECK_THROWS_AS(solve_least_squares(X, y, 3, "collinear"), FitError);
  // The same deficiency is tolerated when the data cannot support more rank.
  const auto ls = solve_least_squares(X, y, 2, "saturated");
  CHECK(ls.rank == 2);
  CHECK(ls.train_mse == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("mean squared error matches its definition") {
  CHECK(mean_squared_error({1.0, 2.0, 3.0}, {1.0, 1.0, 5.0}) == doctest::Approx(5.0 / 3.0));
  CHECK_THROWS_AS(mean_squared_error({1.0}, {1.0, 2.0}), DataError);
  CHECK_THROWS_AS(mean_squared_error({}, {}), DataError);
}
