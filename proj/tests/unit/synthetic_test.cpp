#include "helpers.hpp"
#include "wtpc/errors.hpp"
#include "wtpc/power_curve.hpp"
#include "wtpc/scada.hpp"
#include "wtpc/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace wtpc;

namespace {

bool same_record(const ScadaRecord& a, const ScadaRecord& b) {
  return a.timestamp == b.timestamp && a.wind == b.wind && a.angle == b.angle &&
         a.temperature == b.temperature && a.power == b.power && a.state == b.state;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  GeneratorConfig config;
  config.seed = 12;
  config.n_samples = 1500;
  const auto a = generate(config);
  const auto b = generate(config);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(same_record(a.records[i], b.records[i]));
  CHECK(truth_to_json(a.truth) == truth_to_json(b.truth));

  config.seed = 13;
  const auto c = generate(config);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.records.size() && !any_differs; ++i)
    any_differs = !same_record(a.records[i], c.records[i]);
  CHECK(any_differs);
}

TEST_CASE("every channel is on the recording lattice and inside its range") {
  GeneratorConfig config;
  config.seed = 4;
  config.n_samples = 2000;
  const auto data = generate(config);
  for (const auto& r : data.records) {
    CHECK(*r.wind == doctest::Approx(from_tenths(to_tenths(*r.wind))).epsilon(1e-12));
    CHECK(*r.power == doctest::Approx(from_tenths(to_tenths(*r.power))).epsilon(1e-12));
    CHECK(*r.wind >= config.wind_min);
    CHECK(*r.wind <= config.wind_max);
    CHECK(std::abs(*r.angle) <= 180.0);
    CHECK(*r.state == "NORMAL");
    CHECK(*r.timestamp % 10 == 0);
  }
}

TEST_CASE("the truth noise scale is a bump over the band and flat outside") {
  GeneratorConfig config;
  const auto truth = generate(config).truth;
  CHECK(truth.sigma_at(5.0) == doctest::Approx(config.sigma_base));
  CHECK(truth.sigma_at(14.0) == doctest::Approx(config.sigma_base));
  CHECK(truth.sigma_at(9.5) ==
        doctest::Approx(config.sigma_base + config.sigma_amp));
  CHECK(truth.sigma_at(3.0) == doctest::Approx(config.sigma_outside));
  CHECK(truth.sigma_at(20.0) == doctest::Approx(config.sigma_outside));
}

TEST_CASE("generated residuals match the declared scale") {
  GeneratorConfig config;
  config.seed = 9;
  config.n_samples = 20000;
  config.sigma_base = 7.0;
  config.sigma_amp = 0.0;
  config.sigma_outside = 7.0;
  const auto data = generate(config);
  double ss = 0.0;
  for (const auto& r : data.records) {
    const double curve = eval(data.truth.curve, *r.wind);
    const double factor = 1.0 + data.truth.c_T * (*r.temperature - data.truth.t_bar);
    const double resid = *r.power - curve * factor;
    ss += resid * resid;
  }
  const double sd = std::sqrt(ss / static_cast<double>(data.records.size()));
  CHECK(sd == doctest::Approx(7.0).epsilon(0.03));
}

TEST_CASE("truncated innovations bound the residuals") {
  GeneratorConfig config;
  config.seed = 14;
  config.n_samples = 8000;
  config.arma_true = {0, 0, {}, {}, 0.0, 1.0};
  config.truncate_noise_z = 2.0;
  const auto data = generate(config);
  for (const auto& r : data.records) {
    const double curve = eval(data.truth.curve, *r.wind);
    const double resid = *r.power - curve;
    CHECK(std::abs(resid) <= 2.0 * data.truth.sigma_at(*r.wind) + 0.051);
  }
}

TEST_CASE("injected defects raise exactly their own rule counters") {
  GeneratorConfig config;
  config.seed = 23;
  config.n_samples = 4000;
  // Keep every wind bin densely populated so the whisker rule cannot fire
  // on a sparse bin, and truncate the noise so honest rows stay inside it.
  config.wind_min = 5.0;
  config.wind_max = 12.0;
  config.truncate_noise_z = 3.0;
  config.inject_na = 17;
  config.inject_incomplete = 23;
  config.inject_nno = 31;
  config.inject_outliers = 12;
  const auto data = generate(config);
  CHECK(data.records.size() == config.n_samples - config.inject_na);

  const auto cleaned = clean(data.records);
  CHECK(cleaned.report.na == 17);
  CHECK(cleaned.report.incomplete == 23);
  CHECK(cleaned.report.nno == 31);
  CHECK(cleaned.report.outliers == 12);
  CHECK(cleaned.report.raw == 4000);
  CHECK(cleaned.report.retained == 4000 - 17 - 23 - 31 - 12);
}

TEST_CASE("the clean portion is unchanged by defect injection") {
  GeneratorConfig config;
  config.seed = 37;
  config.n_samples = 2000;
  const auto pristine = generate(config);

  config.inject_nno = 10;
  config.inject_outliers = 5;
  config.truncate_noise_z = 3.0;
  const auto injected = generate(config);

  // Truncation alters the innovation stream, so the reference run must use
  // the same truncation with injection switched off.
  GeneratorConfig base = config;
  base.inject_nno = 0;
  base.inject_outliers = 0;
  const auto reference = generate(base);

  REQUIRE(injected.records.size() == reference.records.size());
  std::size_t touched = 0;
  for (std::size_t i = 0; i < injected.records.size(); ++i) {
    if (same_record(injected.records[i], reference.records[i])) continue;
    ++touched;
  }
  CHECK(touched == 15);
  CHECK(pristine.records.size() == reference.records.size());
}

TEST_CASE("seasons share the truth but not the weather") {
  GeneratorConfig config;
  config.seed = 55;
  config.n_samples = 600;
  const auto pair = generate_seasons(config);
  // Each season records the seed that generated it; the physics must match.
  auto train_truth = truth_to_json(pair.train.truth);
  auto valid_truth = truth_to_json(pair.validation.truth);
  CHECK(train_truth["seed"] != valid_truth["seed"]);
  train_truth.erase("seed");
  valid_truth.erase("seed");
  CHECK(train_truth == valid_truth);
  bool differs = false;
  for (std::size_t i = 0; i < pair.train.records.size() && !differs; ++i)
    differs = !same_record(pair.train.records[i], pair.validation.records[i]);
  CHECK(differs);
}

TEST_CASE("ground truth serializes losslessly") {
  GeneratorConfig config;
  config.seed = 61;
  config.n_samples = 500;
  config.c_phi_true = 0.8;
  config.c_T_true = -0.004;
  const auto truth = generate(config).truth;
  const auto back = truth_from_json(truth_to_json(truth));
  CHECK(back.c_phi == doctest::Approx(truth.c_phi));
  CHECK(back.c_T == doctest::Approx(truth.c_T));
  CHECK(back.arma.a == truth.arma.a);
  CHECK(back.arma.sigma_eps2 == doctest::Approx(truth.arma.sigma_eps2));
  CHECK(back.seed == truth.seed);
  for (double w : {4.0, 8.5, 13.0, 20.0})
    CHECK(back.sigma_at(w) == doctest::Approx(truth.sigma_at(w)));
  for (double w : {5.0, 9.0, 12.5})
    CHECK(eval(back.curve, w) == doctest::Approx(eval(truth.curve, w)));
}

TEST_CASE("the quartic preset truly needs its fourth power") {
  const auto quartic = quartic_truth_preset();
  // Fit the preset's own exact values with a cubic: a visible gap remains.
  std::vector<double> winds, powers;
  for (int i = 0; i <= 114; ++i) {
    const double w = 3.5 + 0.1 * i;
    winds.push_back(w);
    powers.push_back(eval(quartic, w));
  }
  CleanDataset data;
  data.records = testutil::grid_records(winds, powers);
  data.report.raw = data.report.retained = static_cast<long long>(winds.size());
  ModelSpec cubic;
  cubic.model_class = ModelClass::Polynomial;
  cubic.m = 3;
  const auto fit3 = fit(cubic, data);
  CHECK(fit3.train_mse > 1.0);
}
