#pragma once

#include "wtpc/environmental.hpp"
#include "wtpc/residual.hpp"

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

namespace wtpc {

/// ARMA(q1,q2) with intercept: x_t = mu + Σ a_i x_{t−i} + ε_t + Σ c_j ε_{t−j}.
struct ArmaModel {
  std::size_t q1 = 0;
  std::size_t q2 = 0;
  std::vector<double> a;
  std::vector<double> c;
  double mu = 0.0;
  double sigma_eps2 = 0.0;
};

/// In-band rescaled residuals with the gaps spliced shut.  segment_starts
/// lists glued indices whose predecessor in original time was excluded.
struct GluedSeries {
  std::vector<double> values;
  std::vector<std::size_t> segment_starts;
};

/// Static enhanced curve + residual scale + ARMA on the glued series +
/// variance of the unmodeled out-of-band noise.
struct DynamicModel {
  EnhancedModel enhanced;
  ResidualProfile profile;
  ArmaModel arma;
  double sigma_e2 = 0.0;
};

struct ExogPoint {
  double wind = 0.0;
  double angle = 0.0;
  double temperature = 0.0;
};

struct Forecast {
  double mean = 0.0;
  double variance = 0.0;
};

/// Keep in-band samples in time order; record splice points.
GluedSeries glue(const std::vector<double>& rescaled,
                 const std::vector<double>& winds,
                 std::pair<double, double> band);

/// Two-stage fit: long-autoregression innovation proxies, lagged regression
/// for starting values, then conditional-sum-of-squares refinement with
/// pre-sample values and innovations at zero.  Coefficients are reflected
/// into the stable and invertible region when needed.
ArmaModel fit_arma(const GluedSeries& series, std::size_t q1, std::size_t q2);

/// Innovations from a left-to-right filter with zero pre-sample state.
std::vector<double> arma_innovations(const ArmaModel& model,
                                     const std::vector<double>& values);

/// MA(∞) weights ψ_0..ψ_{count−1}.
std::vector<double> psi_weights(const ArmaModel& model, std::size_t count);

/// Long-run variance of the process, σ_ε²·Σψ_j².
double stationary_variance(const ArmaModel& model);

/// h-step-ahead mean and variance with future innovations at zero.
Forecast forecast_residual(const ArmaModel& model, const GluedSeries& history,
                           std::size_t h_steps);

/// Forecasts for steps 1..h_max in one filtering pass.
std::vector<Forecast> forecast_trajectory(const ArmaModel& model,
                                          const std::vector<double>& history,
                                          std::size_t h_max);

/// Assemble the dynamic model from its fitted layers on training data.
DynamicModel fit_dynamic(const EnhancedModel& enhanced, const ResidualProfile& profile,
                         const std::vector<ScadaRecord>& records, std::size_t q1,
                         std::size_t q2);

/// Power forecasts for the supplied future exogenous points.  In-band steps
/// advance the ARMA clock; out-of-band steps return the static curve with
/// the out-of-band noise variance (frozen semantics).
std::vector<Forecast> predict_power(const DynamicModel& model,
                                    const std::vector<ScadaRecord>& history,
                                    const std::vector<ExogPoint>& future);

/// Sample a trajectory after a burn-in, innovations N(0, σ_ε).
std::vector<double> simulate_arma(const ArmaModel& model, std::size_t n,
                                  std::mt19937_64& rng, std::size_t burn_in = 500);

/// True when every AR companion root lies strictly inside the unit circle.
bool arma_is_stable(const ArmaModel& model);
/// True when every MA companion root lies strictly inside the unit circle.
bool arma_is_invertible(const ArmaModel& model);

nlohmann::json arma_to_json(const ArmaModel& model);
ArmaModel arma_from_json(const nlohmann::json& j);

}  // namespace wtpc
