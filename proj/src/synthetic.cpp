#include "wtpc/synthetic.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace wtpc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double draw_innovation(std::mt19937_64& rng, std::normal_distribution<double>& unit,
                       double sigma, double truncate_z) {
  double z = unit(rng);
  if (truncate_z > 0.0)
    while (std::abs(z) > truncate_z) z = unit(rng);
  return sigma * z;
}

}  // namespace

double GroundTruth::sigma_at(double wind) const {
  if (wind >= sigma_band_lo && wind <= sigma_band_hi) {
    const double u = (wind - sigma_band_lo) / (sigma_band_hi - sigma_band_lo);
    const double s = std::sin(kPi * u);
    return sigma_base + sigma_amp * s * s;
  }
  return sigma_outside;
}

FittedModel sigmoid_truth_preset() {
  FittedModel m;
  m.spec.model_class = ModelClass::BSpline;
  m.spec.m = 8;
  m.knots = {3.5, 3.5, 3.5, 3.5, 5.8, 8.1, 10.4, 12.7, 15.0, 15.0, 15.0, 15.0};
  m.theta = {21.37, 21.37, 180.0, 700.0, 1600.0, 2600.0, 3274.63, 3274.63};
  m.n_params = 8;
  m.fitted = true;
  return m;
}

FittedModel quartic_truth_preset() {
  FittedModel m;
  m.spec.model_class = ModelClass::Polynomial;
  m.spec.m = 4;
  m.theta = {1650.0, 1600.0, 0.0, -250.0, 120.0};
  m.w_bar = 9.25;
  m.d_w = 5.75;
  m.p_bar = 0.0;
  m.d_p = 1.0;
  m.n_params = 5;
  m.fitted = true;
  return m;
}

SyntheticData generate(const GeneratorConfig& config) {
  if (config.n_samples == 0) throw DataError("generator needs at least one sample");

  SyntheticData out;
  GroundTruth& truth = out.truth;
  truth.curve = config.true_curve.fitted ? config.true_curve : sigmoid_truth_preset();
  truth.c_phi = config.c_phi_true;
  truth.c_T = config.c_T_true;
  truth.t_bar = config.t_bar;
  truth.sigma_band_lo = config.sigma_band_lo;
  truth.sigma_band_hi = config.sigma_band_hi;
  truth.sigma_base = config.sigma_base;
  truth.sigma_amp = config.sigma_amp;
  truth.sigma_outside = config.sigma_outside;
  truth.seed = config.seed;
  truth.n_samples = config.n_samples;

  truth.arma = config.arma_true;
  double scale = 1.0;
  if (config.normalize_arma) {
    scale = std::sqrt(stationary_variance(config.arma_true));
    if (!(scale > 0.0)) throw DataError("generator noise process has zero variance");
    truth.arma.mu /= scale;
    truth.arma.sigma_eps2 /= scale * scale;
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  // Noise trajectory from the true process, burn-in discarded.
  const std::size_t q1 = config.arma_true.q1;
  const std::size_t q2 = config.arma_true.q2;
  const double sigma_eps = std::sqrt(config.arma_true.sigma_eps2);
  const std::size_t burn = 500;
  const std::size_t total = config.n_samples + burn;
  std::vector<double> noise(total, 0.0);
  std::vector<double> eps(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    eps[t] = draw_innovation(rng, unit, sigma_eps, config.truncate_noise_z);
    double v = config.arma_true.mu + eps[t];
    for (std::size_t i = 1; i <= q1; ++i)
      if (t >= i) v += config.arma_true.a[i - 1] * noise[t - i];
    for (std::size_t j = 1; j <= q2; ++j)
      if (t >= j) v += config.arma_true.c[j - 1] * eps[t - j];
    noise[t] = v;
  }

  const std::int64_t start = parse_timestamp_minutes(config.start_timestamp);
  const double log_mean = std::log(config.wind_log_mean_of);
  const double innov_sd = config.wind_log_sd * std::sqrt(1.0 - config.wind_ar * config.wind_ar);
  double log_wind = log_mean + config.wind_log_sd * unit(rng);

  out.records.reserve(config.n_samples);
  for (std::size_t t = 0; t < config.n_samples; ++t) {
    if (t > 0) log_wind = log_mean + config.wind_ar * (log_wind - log_mean) + innov_sd * unit(rng);
    const double w = quantize1(std::clamp(std::exp(log_wind), config.wind_min, config.wind_max));

    const double phase = 2.0 * kPi * static_cast<double>(t) / config.temp_period_samples;
    const double temp = quantize1(config.temp_mean + config.temp_amp * std::sin(phase) +
                                  config.temp_noise_sd * unit(rng));
    const double angle =
        quantize1(std::clamp(config.angle_sd * unit(rng), -180.0, 180.0));

    const double effective =
        w * std::pow(std::abs(std::cos(angle * kPi / 180.0)), truth.c_phi);
    const double curve_val = eval(truth.curve, effective) *
                             (1.0 + truth.c_T * (temp - truth.t_bar));
    const double p = quantize1(curve_val + truth.sigma_at(w) * noise[burn + t] / scale);

    ScadaRecord rec;
    rec.timestamp = start + static_cast<std::int64_t>(t) * 10;
    rec.wind = w;
    rec.angle = angle;
    rec.temperature = temp;
    rec.power = p;
    rec.state = "NORMAL";
    out.records.push_back(std::move(rec));
  }

  const std::size_t defects = config.inject_na + config.inject_incomplete +
                              config.inject_nno + config.inject_outliers;
  if (defects > 0) {
    if (defects > config.n_samples)
      throw DataError("more injected defects than generated rows");
    std::mt19937_64 inject_rng(mix_seed(config.seed, 0xD1F));
    std::vector<std::size_t> order(config.n_samples);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), inject_rng);

    std::unordered_map<long long, std::size_t> bin_counts;
    for (const auto& rec : out.records) ++bin_counts[to_tenths(*rec.wind)];

    std::size_t cursor = 0;
    auto take = [&](std::size_t count, auto eligible) {
      std::vector<std::size_t> rows;
      while (rows.size() < count && cursor < order.size()) {
        std::size_t idx = order[cursor++];
        if (eligible(idx)) rows.push_back(idx);
      }
      if (rows.size() < count)
        throw DataError("not enough eligible rows for defect injection");
      return rows;
    };

    auto any_row = [](std::size_t) { return true; };
    // Deleting an end row would shift the observed grid span and hide the gap.
    const auto na_rows = take(config.inject_na, [&](std::size_t idx) {
      return idx > 0 && idx + 1 < config.n_samples;
    });
    const auto incomplete_rows = take(config.inject_incomplete, any_row);
    const auto nno_rows = take(config.inject_nno, any_row);
    const auto outlier_rows = take(config.inject_outliers, [&](std::size_t idx) {
      return bin_counts[to_tenths(*out.records[idx].wind)] >= 20;
    });

    for (std::size_t i = 0; i < incomplete_rows.size(); ++i) {
      auto& rec = out.records[incomplete_rows[i]];
      switch (i % 4) {
        case 0: rec.wind.reset(); break;
        case 1: rec.power.reset(); break;
        case 2: rec.temperature.reset(); break;
        default: rec.angle.reset(); break;
      }
    }
    for (std::size_t idx : nno_rows) out.records[idx].state = "FAULT";
    for (std::size_t idx : outlier_rows) out.records[idx].power = config.outlier_power;

    std::vector<bool> drop(config.n_samples, false);
    for (std::size_t idx : na_rows) drop[idx] = true;
    std::vector<ScadaRecord> kept;
    kept.reserve(config.n_samples - na_rows.size());
    for (std::size_t i = 0; i < out.records.size(); ++i)
      if (!drop[i]) kept.push_back(std::move(out.records[i]));
    out.records = std::move(kept);
  }

  return out;
}

SeasonPair generate_seasons(const GeneratorConfig& config) {
  SeasonPair pair;
  GeneratorConfig train_cfg = config;
  train_cfg.seed = mix_seed(config.seed, 1);
  GeneratorConfig val_cfg = config;
  val_cfg.seed = mix_seed(config.seed, 2);
  pair.train = generate(train_cfg);
  pair.validation = generate(val_cfg);
  return pair;
}

CleanDataset wrap_clean(std::vector<ScadaRecord> records) {
  CleanDataset data;
  data.report.raw = records.size();
  data.report.retained = records.size();
  data.records = std::move(records);
  return data;
}

nlohmann::json truth_to_json(const GroundTruth& truth) {
  return nlohmann::json{{"curve", model_to_json(truth.curve)},
                        {"c_phi", truth.c_phi},
                        {"c_T", truth.c_T},
                        {"t_bar", truth.t_bar},
                        {"sigma",
                         {{"band_lo", truth.sigma_band_lo},
                          {"band_hi", truth.sigma_band_hi},
                          {"base", truth.sigma_base},
                          {"amp", truth.sigma_amp},
                          {"outside", truth.sigma_outside}}},
                        {"arma", arma_to_json(truth.arma)},
                        {"seed", truth.seed},
                        {"n_samples", truth.n_samples}};
}

GroundTruth truth_from_json(const nlohmann::json& j) {
  GroundTruth truth;
  try {
    truth.curve = model_from_json(j.at("curve"));
    truth.c_phi = j.at("c_phi").get<double>();
    truth.c_T = j.at("c_T").get<double>();
    truth.t_bar = j.at("t_bar").get<double>();
    const auto& s = j.at("sigma");
    truth.sigma_band_lo = s.at("band_lo").get<double>();
    truth.sigma_band_hi = s.at("band_hi").get<double>();
    truth.sigma_base = s.at("base").get<double>();
    truth.sigma_amp = s.at("amp").get<double>();
    truth.sigma_outside = s.at("outside").get<double>();
    truth.arma = arma_from_json(j.at("arma"));
    truth.seed = j.at("seed").get<std::uint64_t>();
    truth.n_samples = j.at("n_samples").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(std::string("malformed ground truth: ") + e.what());
  }
  return truth;
}

}  // namespace wtpc
