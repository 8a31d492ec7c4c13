#pragma once

#include "wtpc/scada.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace wtpc {

enum class ModelClass { Logistic5PL, MStukel, PiecewiseLinear, Polynomial, BSpline };

std::string class_name(ModelClass c);
ModelClass class_from_name(const std::string& name);

/// Model class plus order and the support of the constrained transform.
/// `m` is segments (piecewise linear), degree (polynomial) or basis count
/// (spline); the logistic classes have fixed parameter counts and ignore it.
struct ModelSpec {
    ModelClass model_class = ModelClass::BSpline;
    int m = 4;
    double w_lo = 3.5;
    double w_hi = 15.0;
    double cutout = 25.0;
};

struct FittedModel {
    ModelSpec spec;
    std::vector<double> theta;
    double train_mse = 0.0;
    int n_params = 0;
    std::size_t n_train = 0;
    bool fitted = false;

    // Class-specific auxiliaries.
    std::vector<double> knots;  // spline: nondecreasing, length m+4
    std::vector<double> splits; // piecewise linear: s_0..s_{m-1}
    double p_bar = 0.0, w_bar = 0.0, d_p = 1.0, d_w = 1.0; // polynomial scaling
};

/// Clamp wind into the support: below w_lo the curve is flat at w_lo, between
/// w_hi and cutout flat at w_hi, and at or above cutout the output is forced
/// to zero (second member of the pair).
std::pair<double, bool> constrain_input(double w, const ModelSpec& spec);

/// Evaluate the constrained model at ambient wind speed w.
double eval(const FittedModel& model, double w);

/// Cox-de Boor basis function B_{i,k,d}(x) with 1-based index i and the
/// half-open support convention [k_i, k_{i+d+1}); 0/0 terms resolve to 0.
double bspline_basis(std::size_t i, const std::vector<double>& knots, int degree, double x);

/// Least-squares fit of the given class/order on the transformed training
/// data (w < w_lo mapped to w_lo, [w_hi, cutout) to w_hi, >= cutout dropped).
FittedModel fit(const ModelSpec& spec, const CleanDataset& data);

/// Place interior knots so that integral |S''|^(1/2) of the round-1 spline is
/// equidistributed across knot intervals; end knots stay quadruple. A spline
/// with zero curvature everywhere returns its knots unchanged.
std::vector<double> reallocate_knots(const FittedModel& round1);

/// Mean squared prediction error of the model on a dataset.
double mse(const FittedModel& model, const CleanDataset& data);

nlohmann::json model_to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& j);

} // namespace wtpc
