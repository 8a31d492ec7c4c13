#pragma once

#include "wtpc/arma.hpp"
#include "wtpc/power_curve.hpp"
#include "wtpc/scada.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wtpc {

/// Everything the generator draws from; defaults give a plausible turbine.
struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::size_t n_samples = 10000;

  FittedModel true_curve;  // default: sigmoid_truth_preset()
  double c_phi_true = 0.0;
  double c_T_true = 0.0;
  double t_bar = 12.0;

  // Residual scale: base + amp·sin²(π(w−lo)/(hi−lo)) inside [lo, hi],
  // `outside` elsewhere.
  double sigma_band_lo = 5.0;
  double sigma_band_hi = 14.0;
  double sigma_base = 5.0;
  double sigma_amp = 15.0;
  double sigma_outside = 5.0;

  ArmaModel arma_true{1, 0, {0.5}, {}, 0.0, 1.0};
  bool normalize_arma = true; // scale the noise process to unit variance
  double truncate_noise_z = 0.0;  // > 0: reject innovations beyond z·σ_ε

  // Bounded AR(1) on log wind, quantized to 0.1 m/s.
  double wind_log_mean_of = 8.5;  // m/s scale parameter, mean of log wind is ln of this
  double wind_log_sd = 0.30;
  double wind_ar = 0.97;
  double wind_min = 0.3;
  double wind_max = 24.9;

  double temp_mean = 12.0;
  double temp_amp = 8.0;
  double temp_period_samples = 4320.0;
  double temp_noise_sd = 1.5;

  double angle_sd = 5.0;

  // Defect injection for cleaning tests; rows are chosen from a separate
  // stream so the clean portion is identical across injection settings.
  std::size_t inject_na = 0;
  std::size_t inject_incomplete = 0;
  std::size_t inject_nno = 0;
  std::size_t inject_outliers = 0;
  double outlier_power = 6000.0;

  std::string start_timestamp = "2013-01-01T00:00";
};

struct GroundTruth {
  FittedModel curve;
  double c_phi = 0.0;
  double c_T = 0.0;
  double t_bar = 12.0;
  double sigma_band_lo = 0.0;
  double sigma_band_hi = 0.0;
  double sigma_base = 0.0;
  double sigma_amp = 0.0;
  double sigma_outside = 0.0;
  ArmaModel arma;  // the normalized process actually driving the noise
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;

  double sigma_at(double wind) const;
};

struct SyntheticData {
  std::vector<ScadaRecord> records;
  GroundTruth truth;
};

/// Smooth monotone spline from a low to a high plateau, both intentionally
/// off the 0.1 kW lattice.
FittedModel sigmoid_truth_preset();

/// Degree-4 polynomial with a genuine quartic component, monotone on the
/// support.
FittedModel quartic_truth_preset();

/// p = curve(w·|cosφ|^{c_φ})·(1 + c_T(T−T̄)) + σ(w)·noise, every channel
/// quantized to one decimal; deterministic for a fixed config.
SyntheticData generate(const GeneratorConfig& config);

/// Two corpora with the same truth and independent noise streams.
struct SeasonPair {
  SyntheticData train;
  SyntheticData validation;
};
SeasonPair generate_seasons(const GeneratorConfig& config);

/// Wrap generator output (already complete and normal) as a CleanDataset.
CleanDataset wrap_clean(std::vector<ScadaRecord> records);

nlohmann::json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const nlohmann::json& j);

}  // namespace wtpc
