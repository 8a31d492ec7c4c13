#pragma once

#include "wtpc/power_curve.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace wtpc {

double bic(int n_params, std::size_t n_samples, double train_mse);

struct SweepEntry {
  int m = 0;
  double train_mse = 0.0;
  double bic = 0.0;
};

struct SelectionResult {
  ModelClass model_class = ModelClass::BSpline;
  std::vector<SweepEntry> sweep;
  std::vector<std::pair<int, std::string>> failures;
  int chosen_m = 0;
  FittedModel chosen_model;

  /// CSV with header "m,mse,bic" over the successful fits.
  std::string sweep_csv() const;
};

/// Fit every order in the grid, score by BIC on the training data, return the
/// argmin; ties break toward smaller m.  Orders whose fit throws are recorded
/// under failures and skipped.
SelectionResult select_order(ModelClass model_class, const std::vector<int>& m_grid,
                             const CleanDataset& data);

/// Expected squared prediction gap between two models over the data, relative
/// to the better of their empirical MSEs.
double delta(const FittedModel& model_a, const FittedModel& model_b,
             const CleanDataset& data);

/// Orders swept when the caller gives none: piecewise 1..30, polynomial
/// 1..15, spline 4..30; the logistic classes have a fixed parameter count.
std::vector<int> default_m_grid(ModelClass model_class);

}  // namespace wtpc
