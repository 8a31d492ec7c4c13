#include "wtpc/environmental.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wtpc {

namespace {

constexpr double kCphiMax = 3.0;

double effective_wind(double w, double phi_deg, double c_phi) {
    if (c_phi == 0.0) return w;
    const double c = std::abs(std::cos(phi_deg * M_PI / 180.0));
    return w * std::pow(c, c_phi);
}

} // namespace

EnvironmentalMode environmental_mode_from_name(const std::string& name) {
    if (name == "angle" || name == "angle_only") return EnvironmentalMode::AngleOnly;
    if (name == "temp" || name == "temp_only") return EnvironmentalMode::TempOnly;
    if (name == "both") return EnvironmentalMode::Both;
    throw DataError("unknown environmental mode '" + name + "'");
}

double eval_enhanced(const EnhancedModel& model, double w, double phi_deg, double T) {
    if (!model.fitted) throw FitError("eval_enhanced: model is not fitted");
    const double base = eval(model.base, effective_wind(w, phi_deg, model.c_phi));
    return base * (1.0 + model.c_T * (T - model.t_bar));
}

EnvironmentalFit fit_environmental(const FittedModel& base, const CleanDataset& data,
                                   EnvironmentalMode mode) {
    if (!base.fitted) throw FitError("fit_environmental: base model is not fitted");
    if (data.records.empty()) throw DataError("fit_environmental: empty data");
    const auto n = data.records.size();

    std::vector<double> winds(n), angles(n), temps(n), powers(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = data.records[i];
        winds[i] = *r.wind;
        angles[i] = *r.angle;
        temps[i] = *r.temperature;
        powers[i] = *r.power;
    }
    const double t_bar = mean(temps);
    const bool use_temp = mode != EnvironmentalMode::AngleOnly;
    const bool use_angle = mode != EnvironmentalMode::TempOnly;
    if (use_temp) {
        const auto [lo, hi] = std::minmax_element(temps.begin(), temps.end());
        if (*lo == *hi) {
            throw DataError("fit_environmental: temperature column is constant, "
                            "c_T is unidentifiable");
        }
    }

    // Base curve at angle-adjusted wind for a candidate exponent.
    std::vector<double> s(n);
    auto fill_base = [&](double c_phi) {
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = eval(base, effective_wind(winds[i], angles[i], c_phi));
        }
    };
    // Given the base predictions, c_T is a linear least-squares coefficient.
    auto best_ct = [&]() {
        if (!use_temp) return 0.0;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = s[i] * (temps[i] - t_bar);
            num += (powers[i] - s[i]) * x;
            den += x * x;
        }
        return den > 0.0 ? num / den : 0.0;
    };
    auto sse_at = [&](double c_phi) {
        fill_base(c_phi);
        const double ct = best_ct();
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = powers[i] - s[i] * (1.0 + ct * (temps[i] - t_bar));
            sse += d * d;
        }
        return sse;
    };

    double c_phi = 0.0;
    bool at_boundary = false;
    if (use_angle) {
        c_phi = golden_section_minimize(sse_at, 0.0, kCphiMax, 1e-6);
        // Golden section never probes the interval edges; a boundary optimum
        // must be reported explicitly rather than snapped to a nearby point.
        const double sse_mid = sse_at(c_phi);
        if (sse_at(0.0) <= sse_mid) {
            c_phi = 0.0;
            at_boundary = sse_at(1e-4) > sse_at(0.0) ? false : true;
        } else if (sse_at(kCphiMax) <= sse_mid) {
            c_phi = kCphiMax;
            at_boundary = true;
        }
    }

    EnvironmentalFit result;
    result.model.base = base;
    result.model.c_phi = c_phi;
    fill_base(c_phi);
    result.model.c_T = best_ct();
    result.model.t_bar = t_bar;
    result.model.fitted = true;
    result.c_phi_at_boundary = at_boundary;
    result.train_mse = mse(result.model, data);
    return result;
}

double mse(const EnhancedModel& model, const CleanDataset& data) {
    if (data.records.empty()) throw DataError("mse: empty data");
    double s = 0.0;
    for (const auto& r : data.records) {
        const double d = *r.power - eval_enhanced(model, *r.wind, *r.angle, *r.temperature);
        s += d * d;
    }
    return s / static_cast<double>(data.records.size());
}

nlohmann::json enhanced_to_json(const EnhancedModel& model, const std::string& base_ref) {
    return nlohmann::json{{"base_ref", base_ref},
                          {"c_phi", model.c_phi},
                          {"c_T", model.c_T},
                          {"T_bar", model.t_bar}};
}

std::string enhanced_base_ref(const nlohmann::json& j) {
    try {
        return j.at("base_ref").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError(std::string("invalid enhanced-model JSON: ") + e.what());
    }
}

EnhancedModel enhanced_from_json(const nlohmann::json& j, FittedModel base) {
    EnhancedModel model;
    try {
        model.c_phi = j.at("c_phi").get<double>();
        model.c_T = j.at("c_T").get<double>();
        model.t_bar = j.at("T_bar").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError(std::string("invalid enhanced-model JSON: ") + e.what());
    }
    if (model.c_phi < 0.0 || !std::isfinite(model.c_phi) || !std::isfinite(model.c_T) ||
        !std::isfinite(model.t_bar)) {
        throw ArtifactError("invalid enhanced-model JSON: bad coefficients");
    }
    model.base = std::move(base);
    model.fitted = true;
    return model;
}

} // namespace wtpc
