#pragma once

#include "wtpc/environmental.hpp"
#include "wtpc/scada.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace wtpc {

/// Wind-conditional residual scale plus the Gaussian band located by per-bin
/// normality tests.  Map keys are wind speeds in tenths of m/s.
struct ResidualProfile {
  std::map<long long, double> sigma;
  std::map<long long, std::size_t> counts;
  std::map<long long, double> ad_pvalues;
  double g_lo = 0.0;
  double g_hi = 0.0;
  double alpha = 0.05;

  /// σ_w at an arbitrary wind, linearly interpolated between profile bins.
  double sigma_at(double wind) const;

  bool in_band(double wind) const { return wind >= g_lo && wind <= g_hi; }
};

/// Power residuals r_t = p_t − F(w_t, φ_t, T_t), aligned with `records`.
std::vector<double> residuals(const EnhancedModel& model,
                              const std::vector<ScadaRecord>& records);

/// Wind-conditional scale: σ_w² is the mean of r² inside each 0.1 m/s bin.
/// Bins with fewer than 30 samples inherit σ by linear interpolation from the
/// nearest well-populated bins.
ResidualProfile sigma_profile(const std::vector<double>& resid,
                              const std::vector<double>& winds);

/// Pointwise r / σ_w using each record's quantized wind.
std::vector<double> rescale(const std::vector<double>& resid,
                            const ResidualProfile& profile,
                            const std::vector<double>& winds);

struct AdResult {
  double a2 = 0.0;
  double p = 0.0;
};

/// Anderson-Darling test of a sample against the standard normal with both
/// parameters fixed (case 0).  Needs at least 8 observations.
AdResult anderson_darling(const std::vector<double>& samples);

/// Upper tail probability of the case-0 statistic (Marsaglia's asymptotic
/// form; the far tail goes through expm1 so small p stay representable).
double ad_pvalue(double a2);

/// Longest contiguous run of 0.1 m/s wind bins whose rescaled residuals pass
/// the normality test at `alpha`.  Bins with fewer than 8 samples are not
/// testable and break runs; ties go to the lowest wind.  Per-bin p-values are
/// written to `pvalues_out` when given.
std::pair<double, double> gaussian_band(const std::vector<double>& rescaled,
                                        const std::vector<double>& winds,
                                        double alpha,
                                        std::map<long long, double>* pvalues_out = nullptr);

/// residuals → sigma_profile → rescale → gaussian_band in one pass.
ResidualProfile build_profile(const EnhancedModel& model,
                              const std::vector<ScadaRecord>& records,
                              double alpha = 0.05);

/// CSV with header wind,sigma,n,ad_p; untested bins leave ad_p empty.
std::string profile_to_csv(const ResidualProfile& profile);

nlohmann::json profile_to_json(const ResidualProfile& profile);
ResidualProfile profile_from_json(const nlohmann::json& j);

}  // namespace wtpc
