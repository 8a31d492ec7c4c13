#include "helpers.hpp"
#include "wtpc/arma.hpp"
#include "wtpc/errors.hpp"
#include "wtpc/evaluation.hpp"
#include "wtpc/io.hpp"
#include "wtpc/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace wtpc;

namespace {

/// Linear curve, flat residual scale two, band [5, 6], AR(1) with a = 0.5 on
/// unit-variance rescaled residuals; everything known in closed form.
DynamicModel toy_model() {
  CleanDataset base_data;
  base_data.records = testutil::grid_records({5.0, 5.5, 6.0}, {500.0, 550.0, 600.0});
  base_data.report.raw = base_data.report.retained = 3;
  ModelSpec spec;
  spec.model_class = ModelClass::PiecewiseLinear;
  spec.m = 1;

  DynamicModel model;
  model.enhanced.base = fit(spec, base_data);
  model.enhanced.t_bar = 12.0;
  model.enhanced.fitted = true;
  for (long long t = 50; t <= 60; ++t) {
    model.profile.sigma[t] = 2.0;
    model.profile.counts[t] = 100;
  }
  model.profile.g_lo = 5.0;
  model.profile.g_hi = 6.0;
  model.arma.q1 = 1;
  model.arma.a = {0.5};
  model.arma.mu = 0.0;
  model.arma.sigma_eps2 = 0.75;
  model.sigma_e2 = 9.0;
  return model;
}

std::vector<ScadaRecord> toy_history() {
  // Residuals against the exact linear curve: +2, -2, +2 -> rescaled +1, -1, +1.
  return {testutil::record(0, 5.0, 0.0, 12.0, 502.0),
          testutil::record(10, 5.1, 0.0, 12.0, 508.0),
          testutil::record(20, 5.2, 0.0, 12.0, 522.0)};
}

}  // namespace

TEST_CASE("power forecasts advance the residual clock only inside the band") {
  const auto model = toy_model();
  const auto history = toy_history();

  // One in-band step: mean picks up sigma_w times the one-step residual
  // forecast 0.5*(+1); variance is sigma_w^2 times the innovation variance.
  const auto in_band = predict_power(model, history, {{5.1, 0.0, 12.0}});
  REQUIRE(in_band.size() == 1);
  CHECK(in_band[0].mean == doctest::Approx(510.0 + 2.0 * 0.5));
  CHECK(in_band[0].variance == doctest::Approx(4.0 * 0.75));

  // An out-of-band point returns the static curve with the frozen variance
  // and must not advance the clock for the in-band point after it.
  const auto frozen = predict_power(model, history, {{9.0, 0.0, 12.0}, {5.1, 0.0, 12.0}});
  REQUIRE(frozen.size() == 2);
  CHECK(frozen[0].mean == doctest::Approx(900.0));
  CHECK(frozen[0].variance == doctest::Approx(9.0));
  CHECK(frozen[1].mean == doctest::Approx(511.0));
  CHECK(frozen[1].variance == doctest::Approx(3.0));

  // Two consecutive in-band steps: the second is a two-step forecast.
  const auto two = predict_power(model, history, {{5.1, 0.0, 12.0}, {5.1, 0.0, 12.0}});
  CHECK(two[1].mean == doctest::Approx(510.0 + 2.0 * 0.25));
  CHECK(two[1].variance == doctest::Approx(4.0 * 0.75 * 1.25));
}

TEST_CASE("horizon error uses the ceiling of h over the sampling step") {
  GeneratorConfig config;
  config.seed = 31;
  config.n_samples = 3000;
  config.arma_true = {1, 0, {0.7}, {}, 0.0, 1.0};
  const auto data = wrap_clean(generate(config).records);

  ModelSpec base_spec;
  base_spec.m = 17;
  const auto base = fit(base_spec, data);
  const auto env = fit_environmental(base, data, EnvironmentalMode::Both);
  const auto profile = build_profile(env.model, data.records, 0.05);
  const auto model = fit_dynamic(env.model, profile, data.records, 1, 0);

  const double h10 = mse_at_horizon(model, data, 10.0);
  CHECK(mse_at_horizon(model, data, 3.0) == doctest::Approx(h10));
  CHECK(mse_at_horizon(model, data, 25.0, 30.0) == doctest::Approx(h10));
  CHECK(mse_at_horizon(model, data, 20.0) > h10 * 0.8);

  // Strongly autocorrelated residuals: the one-step forecast beats the curve.
  const double static_mse = mse(env.model, data);
  CHECK(h10 < static_mse);
  // Far horizons revert to the static predictor.
  CHECK(mse_at_horizon(model, data, 10000.0) == doctest::Approx(static_mse).epsilon(0.05));

  CHECK_THROWS_AS(mse_at_horizon(model, data, 3000.0 * 10.0), DataError);
  CHECK_THROWS_AS(mse_at_horizon(model, data, 0.0), DataError);
}

TEST_CASE("band coverage increases with the confidence level") {
  GeneratorConfig config;
  config.seed = 77;
  config.n_samples = 2500;
  const auto data = wrap_clean(generate(config).records);
  ModelSpec base_spec;
  base_spec.m = 17;
  const auto base = fit(base_spec, data);
  const auto env = fit_environmental(base, data, EnvironmentalMode::Both);
  const auto profile = build_profile(env.model, data.records, 0.05);
  const auto model = fit_dynamic(env.model, profile, data.records, 1, 0);

  const double half = coverage_audit(model, data, 0.50);
  const double wide = coverage_audit(model, data, 0.99);
  CHECK(half > 0.3);
  CHECK(half < 0.7);
  CHECK(wide > half);
  CHECK(wide > 0.95);
  CHECK(wide <= 1.0);
  CHECK_THROWS_AS(coverage_audit(model, data, 0.0), DataError);
  CHECK_THROWS_AS(coverage_audit(model, data, 1.0), DataError);
}

TEST_CASE("report files are written once and byte-stable") {
  HorizonReport report;
  report.horizons = {10.0, 100.0};
  report.static_mse = 200.0;
  report.enhanced_mse = 190.0;
  report.dynamic.push_back({1, 1, {150.0, 189.0}});
  report.coverage = 0.95;
  BinnedStats::Bin bin;
  bin.wind_tenths = 50;
  bin.count = 10;
  bin.mean = 300.0;
  bin.ss = 90.0;
  report.bins.bins.push_back(bin);
  report.bins.total = 10;

  const auto dir = testutil::scratch_dir("report");
  emit_report(report, (dir / "report").string());
  for (const char* name : {"horizon_mse.csv", "coverage.csv", "binned_stats.csv",
                           "summary.json"}) {
    CHECK(std::filesystem::exists(dir / "report" / name));
  }
  const auto first = testutil::read_file(dir / "report" / "horizon_mse.csv");
  CHECK(first.rfind("h,static_mse,enhanced_mse,dynamic_1_1\n", 0) == 0);
  emit_report(report, (dir / "report").string());
  CHECK(testutil::read_file(dir / "report" / "horizon_mse.csv") == first);

  const auto summary = load_json((dir / "report" / "summary.json").string());
  CHECK(summary.at("coverage").get<double>() == doctest::Approx(0.95));
  CHECK(summary.at("level").get<double>() == doctest::Approx(0.95));
}
