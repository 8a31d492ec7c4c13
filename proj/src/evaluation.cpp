#include "wtpc/evaluation.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/io.hpp"
#include "wtpc/stats.hpp"

#include <cmath>
#include <cstddef>

namespace wtpc {

namespace {

struct ValidationState {
  std::vector<double> winds;
  std::vector<double> powers;
  std::vector<double> base;      // enhanced-curve value per record
  std::vector<bool> in_band;
  std::vector<std::ptrdiff_t> glued_count;  // in-band records among 0..t
  std::vector<double> glued;                // in-band rescaled residuals
  std::vector<double> eps;                  // innovations over `glued`
};

ValidationState prepare(const DynamicModel& model, const CleanDataset& validation) {
  if (validation.records.empty()) throw DataError("empty validation data");
  ValidationState st;
  const auto& recs = validation.records;
  st.winds.reserve(recs.size());
  st.powers.reserve(recs.size());
  st.base.reserve(recs.size());
  st.in_band.reserve(recs.size());
  st.glued_count.reserve(recs.size());
  std::ptrdiff_t count = 0;
  for (const auto& r : recs) {
    if (!r.wind || !r.angle || !r.temperature || !r.power)
      throw DataError("incomplete record in validation data");
    const double w = *r.wind;
    st.winds.push_back(w);
    st.powers.push_back(*r.power);
    st.base.push_back(eval_enhanced(model.enhanced, w, *r.angle, *r.temperature));
    const bool inb = model.profile.in_band(from_tenths(to_tenths(w)));
    st.in_band.push_back(inb);
    if (inb) {
      ++count;
      const double s = model.profile.sigma_at(w);
      if (s == 0.0) throw DataError("sigma_w is zero at wind " + fmt_double(w));
      st.glued.push_back((st.powers.back() - st.base.back()) / s);
    }
    st.glued_count.push_back(count);
  }
  st.eps = arma_innovations(model.arma, st.glued);
  return st;
}

/// d-step-ahead mean forecast from glued position j (last known index).
double forecast_mean(const ArmaModel& arma, const std::vector<double>& glued,
                     const std::vector<double>& eps, std::ptrdiff_t j, std::ptrdiff_t d) {
  std::vector<double> ahead(static_cast<std::size_t>(d));
  for (std::ptrdiff_t s = 1; s <= d; ++s) {
    const std::ptrdiff_t t = j + s;
    double m = arma.mu;
    for (std::size_t i = 1; i <= arma.q1; ++i) {
      const std::ptrdiff_t lag = t - static_cast<std::ptrdiff_t>(i);
      double v = 0.0;
      if (lag > j)
        v = ahead[static_cast<std::size_t>(lag - j - 1)];
      else if (lag >= 0)
        v = glued[static_cast<std::size_t>(lag)];
      m += arma.a[i - 1] * v;
    }
    for (std::size_t q = 1; q <= arma.q2; ++q) {
      const std::ptrdiff_t lag = t - static_cast<std::ptrdiff_t>(q);
      if (lag >= 0 && lag <= j) m += arma.c[q - 1] * eps[static_cast<std::size_t>(lag)];
    }
    ahead[static_cast<std::size_t>(s - 1)] = m;
  }
  return ahead.back();
}

}  // namespace

double mse_at_horizon(const DynamicModel& model, const CleanDataset& validation,
                      double h_minutes, double delta_minutes) {
  if (!(h_minutes > 0.0)) throw DataError("horizon must be positive");
  if (!(delta_minutes > 0.0)) throw DataError("sampling interval must be positive");
  const auto steps = static_cast<std::ptrdiff_t>(std::ceil(h_minutes / delta_minutes));
  ValidationState st = prepare(model, validation);
  const auto n = static_cast<std::ptrdiff_t>(st.winds.size());
  if (steps >= n) throw DataError("horizon exceeds the validation series length");

  double sse = 0.0;
  for (std::ptrdiff_t k = steps; k < n; ++k) {
    double pred = st.base[static_cast<std::size_t>(k)];
    if (st.in_band[static_cast<std::size_t>(k)]) {
      const std::ptrdiff_t origin = k - steps;
      const std::ptrdiff_t j = st.glued_count[static_cast<std::size_t>(origin)] - 1;
      const std::ptrdiff_t d = st.glued_count[static_cast<std::size_t>(k)] - (j + 1);
      const double rhat = forecast_mean(model.arma, st.glued, st.eps, j, d);
      pred += model.profile.sigma_at(st.winds[static_cast<std::size_t>(k)]) * rhat;
    }
    const double err = st.powers[static_cast<std::size_t>(k)] - pred;
    sse += err * err;
  }
  return sse / static_cast<double>(n - steps);
}

double coverage_audit(const DynamicModel& model, const CleanDataset& validation,
                      double level, const std::vector<ScadaRecord>& history) {
  if (!(level > 0.0 && level < 1.0)) throw DataError("confidence level must lie in (0, 1)");
  if (validation.records.empty()) throw DataError("empty validation data");

  std::vector<ExogPoint> future;
  future.reserve(validation.records.size());
  for (const auto& r : validation.records) {
    if (!r.wind || !r.angle || !r.temperature || !r.power)
      throw DataError("incomplete record in validation data");
    future.push_back({*r.wind, *r.angle, *r.temperature});
  }
  const auto forecasts = predict_power(model, history, future);
  const double z = normal_quantile(0.5 * (1.0 + level));
  std::size_t inside = 0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    const double half = z * std::sqrt(forecasts[i].variance);
    const double p = *validation.records[i].power;
    if (p >= forecasts[i].mean - half && p <= forecasts[i].mean + half) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(forecasts.size());
}

void emit_report(const HorizonReport& report, const std::string& dir) {
  std::string horizon_csv = "h,static_mse,enhanced_mse";
  for (const auto& cfg : report.dynamic)
    horizon_csv += ",dynamic_" + std::to_string(cfg.q1) + "_" + std::to_string(cfg.q2);
  horizon_csv += '\n';
  for (std::size_t i = 0; i < report.horizons.size(); ++i) {
    horizon_csv += fmt_double(report.horizons[i]);
    horizon_csv += ',';
    horizon_csv += fmt_double(report.static_mse);
    horizon_csv += ',';
    horizon_csv += fmt_double(report.enhanced_mse);
    for (const auto& cfg : report.dynamic) {
      horizon_csv += ',';
      horizon_csv += i < cfg.mse.size() ? fmt_double(cfg.mse[i]) : std::string();
    }
    horizon_csv += '\n';
  }
  write_text_file(dir + "/horizon_mse.csv", horizon_csv);

  std::string coverage_csv = "level,coverage\n";
  coverage_csv += fmt_double(report.level);
  coverage_csv += ',';
  coverage_csv += fmt_double(report.coverage);
  coverage_csv += '\n';
  write_text_file(dir + "/coverage.csv", coverage_csv);

  write_text_file(dir + "/binned_stats.csv", report.bins.to_csv());

  nlohmann::json summary;
  summary["horizons"] = report.horizons;
  summary["delta_minutes"] = report.delta_minutes;
  summary["static_mse"] = report.static_mse;
  summary["enhanced_mse"] = report.enhanced_mse;
  nlohmann::json dyn = nlohmann::json::array();
  for (const auto& cfg : report.dynamic)
    dyn.push_back({{"q1", cfg.q1}, {"q2", cfg.q2}, {"mse", cfg.mse}});
  summary["dynamic"] = std::move(dyn);
  summary["level"] = report.level;
  summary["coverage"] = report.coverage;
  save_json(dir + "/summary.json", summary);
}

}  // namespace wtpc
