#include "helpers.hpp"
#include "wtpc/arma.hpp"
#include "wtpc/errors.hpp"
#include "wtpc/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace wtpc;

TEST_CASE("gluing keeps in-band samples and marks resumption points") {
  const std::vector<double> values{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const std::vector<double> winds{5.0, 5.5, 9.0, 5.2, 5.9, 5.1};
  const auto glued = glue(values, winds, {5.0, 6.0});
  CHECK(glued.values == std::vector<double>{1.0, 2.0, 4.0, 5.0, 6.0});
  REQUIRE(glued.segment_starts.size() == 1);
  CHECK(glued.segment_starts[0] == 2);

  const auto narrow = glue(values, winds, {5.0, 5.5});
  CHECK(narrow.values == std::vector<double>{1.0, 2.0, 4.0, 6.0});
  CHECK(narrow.segment_starts == std::vector<std::size_t>{2, 3});

  const auto leading_gap = glue({9.9, 1.0, 2.0}, {8.0, 5.0, 5.1}, {5.0, 6.0});
  CHECK(leading_gap.values.size() == 2);
  CHECK(leading_gap.segment_starts.empty());

  CHECK_THROWS_AS(glue({1.0}, {1.0, 2.0}, {0.0, 1.0}), DataError);
}

TEST_CASE("zero-order fit reduces to the sample mean and variance") {
  GluedSeries series;
  series.values = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
  const auto model = fit_arma(series, 0, 0);
  CHECK(model.mu == doctest::Approx(5.5));
  CHECK(model.sigma_eps2 == doctest::Approx(8.25));  // population variance
  CHECK(model.a.empty());
  CHECK(model.c.empty());
}

TEST_CASE("the dynamic layer refuses series shorter than its order needs") {
  GluedSeries tiny;
  tiny.values = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK_THROWS_WITH_AS(fit_arma(tiny, 1, 1), "insufficient data for dynamic layer", DataError);
}

TEST_CASE("innovation filtering matches the recursion by hand") {
  ArmaModel model;
  model.q1 = 1;
  model.q2 = 1;
  model.a = {0.5};
  model.c = {0.2};
  model.mu = 1.0;
  model.sigma_eps2 = 1.0;
  const std::vector<double> x{2.0, 3.0, 1.5};
  const auto eps = arma_innovations(model, x);
  REQUIRE(eps.size() == 3);
  CHECK(eps[0] == doctest::Approx(1.0));                              // 2 - 1
  CHECK(eps[1] == doctest::Approx(3.0 - 1.0 - 0.5 * 2.0 - 0.2 * 1.0));
  CHECK(eps[2] == doctest::Approx(1.5 - 1.0 - 0.5 * 3.0 - 0.2 * eps[1]));
}

TEST_CASE("moving-average weights follow the closed forms") {
  ArmaModel ar;
  ar.q1 = 1;
  ar.a = {0.6};
  ar.sigma_eps2 = 2.0;
  const auto psi = psi_weights(ar, 8);
  for (std::size_t j = 0; j < psi.size(); ++j)
    CHECK(psi[j] == doctest::Approx(std::pow(0.6, j)).epsilon(1e-12));
  CHECK(stationary_variance(ar) == doctest::Approx(2.0 / (1.0 - 0.36)).epsilon(1e-9));

  ArmaModel arma;
  arma.q1 = 1;
  arma.q2 = 1;
  arma.a = {0.5};
  arma.c = {0.3};
  arma.sigma_eps2 = 1.0;
  const auto w = psi_weights(arma, 5);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(0.8));
  CHECK(w[2] == doctest::Approx(0.4));
  CHECK(w[3] == doctest::Approx(0.2));

  ArmaModel ma;
  ma.q2 = 2;
  ma.c = {0.4, 0.3};
  ma.sigma_eps2 = 1.5;
  CHECK(stationary_variance(ma) == doctest::Approx(1.5 * (1.0 + 0.16 + 0.09)));
}

TEST_CASE("forecast variance grows toward the stationary ceiling") {
  ArmaModel model;
  model.q1 = 1;
  model.q2 = 1;
  model.a = {0.7};
  model.c = {0.25};
  model.mu = 0.1;
  model.sigma_eps2 = 1.0;
  GluedSeries history;
  std::mt19937_64 rng(7);
  history.values = simulate_arma(model, 400, rng);

  const double ceiling = stationary_variance(model);
  double prev_var = 0.0;
  for (std::size_t h = 1; h <= 60; ++h) {
    const auto f = forecast_residual(model, history, h);
    CHECK(f.variance >= prev_var - 1e-12);
    CHECK(f.variance <= ceiling + 1e-9);
    prev_var = f.variance;
  }
  CHECK(forecast_residual(model, history, 1).variance == doctest::Approx(1.0));
  CHECK(forecast_residual(model, history, 200).mean == doctest::Approx(model.mu / (1 - 0.7)).epsilon(1e-6));
  CHECK(forecast_residual(model, history, 200).variance == doctest::Approx(ceiling).epsilon(1e-6));
  CHECK_THROWS_AS(forecast_residual(model, history, 0), DataError);

  const auto traj = forecast_trajectory(model, history.values, 12);
  REQUIRE(traj.size() == 12);
  for (std::size_t h = 1; h <= 12; ++h) {
    const auto single = forecast_residual(model, history, h);
    CHECK(traj[h - 1].mean == doctest::Approx(single.mean).epsilon(1e-12));
    CHECK(traj[h - 1].variance == doctest::Approx(single.variance).epsilon(1e-12));
  }
}

TEST_CASE("autoregressive and moving-average parameters are recovered") {
  ArmaModel truth;
  truth.q1 = 1;
  truth.a = {0.5};
  truth.mu = 0.0;
  truth.sigma_eps2 = 1.0;
  std::mt19937_64 rng(42);
  GluedSeries series;
  series.values = simulate_arma(truth, 20000, rng);
  const auto fitted = fit_arma(series, 1, 0);
  CHECK(fitted.a[0] == doctest::Approx(0.5).epsilon(0.06));
  CHECK(fitted.sigma_eps2 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(arma_is_stable(fitted));

  ArmaModel ma_truth;
  ma_truth.q2 = 1;
  ma_truth.c = {0.6};
  ma_truth.mu = 0.5;
  ma_truth.sigma_eps2 = 1.0;
  GluedSeries ma_series;
  ma_series.values = simulate_arma(ma_truth, 20000, rng);
  const auto ma_fit = fit_arma(ma_series, 0, 1);
  CHECK(ma_fit.c[0] == doctest::Approx(0.6).epsilon(0.08));
  CHECK(ma_fit.mu == doctest::Approx(0.5).epsilon(0.1));
  CHECK(arma_is_invertible(ma_fit));
}

TEST_CASE("stability and invertibility checks look at the companion roots") {
  ArmaModel stable;
  stable.q1 = 2;
  stable.a = {0.5, 0.3};
  stable.sigma_eps2 = 1.0;
  CHECK(arma_is_stable(stable));

  ArmaModel unit;
  unit.q1 = 1;
  unit.a = {1.0};
  unit.sigma_eps2 = 1.0;
  CHECK_FALSE(arma_is_stable(unit));

  ArmaModel explosive;
  explosive.q1 = 1;
  explosive.a = {1.2};
  explosive.sigma_eps2 = 1.0;
  CHECK_FALSE(arma_is_stable(explosive));

  ArmaModel rough;
  rough.q2 = 1;
  rough.c = {-1.5};
  rough.sigma_eps2 = 1.0;
  CHECK_FALSE(arma_is_invertible(rough));
  CHECK(arma_is_stable(rough));  // no autoregressive part at all
}

TEST_CASE("simulation is deterministic for a fixed engine state") {
  ArmaModel model;
  model.q1 = 1;
  model.a = {0.4};
  model.mu = 0.2;
  model.sigma_eps2 = 1.0;
  std::mt19937_64 a(9), b(9);
  CHECK(simulate_arma(model, 100, a) == simulate_arma(model, 100, b));
}

TEST_CASE("serialized models refuse unstable or non-invertible coefficients") {
  ArmaModel model;
  model.q1 = 1;
  model.q2 = 1;
  model.a = {0.55};
  model.c = {0.25};
  model.mu = 0.05;
  model.sigma_eps2 = 0.8;
  const auto back = arma_from_json(arma_to_json(model));
  CHECK(back.a[0] == doctest::Approx(model.a[0]));
  CHECK(back.c[0] == doctest::Approx(model.c[0]));
  CHECK(back.sigma_eps2 == doctest::Approx(model.sigma_eps2));

  auto bad = arma_to_json(model);
  bad["a"] = std::vector<double>{1.4};
  CHECK_THROWS_AS(arma_from_json(bad), ArtifactError);
  auto rough = arma_to_json(model);
  rough["c"] = std::vector<double>{-1.3};
  CHECK_THROWS_AS(arma_from_json(rough), ArtifactError);
}
