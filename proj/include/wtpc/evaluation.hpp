#pragma once

#include "wtpc/arma.hpp"
#include "wtpc/estimation.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace wtpc {

/// Horizon-swept MSE per dynamic order, static baselines, and band coverage.
struct HorizonReport {
  std::vector<double> horizons;
  double delta_minutes = 10.0;
  double static_mse = 0.0;
  double enhanced_mse = 0.0;
  struct DynamicSweep {
    std::size_t q1 = 0;
    std::size_t q2 = 0;
    std::vector<double> mse;  // aligned with horizons
  };
  std::vector<DynamicSweep> dynamic;
  double level = 0.95;
  double coverage = 0.0;
  BinnedStats bins;
};

/// MSE of h-minute-ahead forecasts over the validation series: each record k
/// is predicted from power history up to k−⌈h/δ⌉ with exogenous values known
/// through k.
double mse_at_horizon(const DynamicModel& model, const CleanDataset& validation,
                      double h_minutes, double delta_minutes = 10.0);

/// Fraction of validation observations inside the level-confidence band of
/// the predict_power trajectory along the validation timeline.  `history`
/// seeds the ARMA state; leave empty to start from rest.
double coverage_audit(const DynamicModel& model, const CleanDataset& validation,
                      double level = 0.95,
                      const std::vector<ScadaRecord>& history = {});

/// Write horizon_mse.csv, coverage.csv, binned_stats.csv and summary.json
/// under `dir`.  Byte-identical output for identical input.
void emit_report(const HorizonReport& report, const std::string& dir);

}  // namespace wtpc
