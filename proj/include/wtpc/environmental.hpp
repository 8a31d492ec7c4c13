#pragma once

#include "wtpc/power_curve.hpp"
#include "wtpc/scada.hpp"

#include <json.hpp>

#include <string>

namespace wtpc {

/// Static curve augmented with incidence-angle and temperature regressors:
/// p = base(w * |cos phi|^c_phi) * (1 + c_T * (T - t_bar)).
struct EnhancedModel {
    FittedModel base;
    double c_phi = 0.0; // nonnegative; |cos phi|^c_phi never amplifies the wind
    double c_T = 0.0;   // per degree C
    double t_bar = 0.0; // training-mean temperature
    bool fitted = false;
};

enum class EnvironmentalMode { AngleOnly, TempOnly, Both };

EnvironmentalMode environmental_mode_from_name(const std::string& name);

/// phi in degrees, converted to radians for the cosine.
double eval_enhanced(const EnhancedModel& model, double w, double phi_deg, double T);

struct EnvironmentalFit {
    EnhancedModel model;
    double train_mse = 0.0;
    /// The c_phi search ended on an edge of [0, 3] with the objective still
    /// improving toward it; the coefficient is reported as-is.
    bool c_phi_at_boundary = false;
};

/// Minimize training MSE over (c_phi, c_T) with the base curve held fixed;
/// the mode pins the excluded coefficient at 0. c_phi is searched by
/// golden section on [0, 3]; c_T has a closed-form least-squares update.
EnvironmentalFit fit_environmental(const FittedModel& base, const CleanDataset& data,
                                   EnvironmentalMode mode);

double mse(const EnhancedModel& model, const CleanDataset& data);

nlohmann::json enhanced_to_json(const EnhancedModel& model, const std::string& base_ref);
std::string enhanced_base_ref(const nlohmann::json& j);
EnhancedModel enhanced_from_json(const nlohmann::json& j, FittedModel base);

} // namespace wtpc
