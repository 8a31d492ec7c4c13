#include "wtpc/power_curve.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/estimation.hpp"
#include "wtpc/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace wtpc {

std::string class_name(ModelClass c) {
    switch (c) {
        case ModelClass::Logistic5PL: return "logistic5pl";
        case ModelClass::MStukel: return "mstukel";
        case ModelClass::PiecewiseLinear: return "piecewise";
        case ModelClass::Polynomial: return "polynomial";
        case ModelClass::BSpline: return "spline";
    }
    throw Error("class_name: unknown class");
}

ModelClass class_from_name(const std::string& name) {
    if (name == "logistic5pl" || name == "5pl") return ModelClass::Logistic5PL;
    if (name == "mstukel") return ModelClass::MStukel;
    if (name == "piecewise" || name == "pw") return ModelClass::PiecewiseLinear;
    if (name == "polynomial" || name == "poly") return ModelClass::Polynomial;
    if (name == "spline" || name == "bspline") return ModelClass::BSpline;
    throw DataError("unknown model class '" + name + "'");
}

std::pair<double, bool> constrain_input(double w, const ModelSpec& spec) {
    if (w < 0.0 || !std::isfinite(w)) throw DataError("constrain_input: negative wind");
    if (w >= spec.cutout) return {spec.w_hi, true};
    if (w < spec.w_lo) return {spec.w_lo, false};
    if (w >= spec.w_hi) return {spec.w_hi, false};
    return {w, false};
}

namespace {

double basis_unchecked(std::size_t i, const std::vector<double>& k, int d, double x) {
    if (d == 0) {
        return (k[i - 1] <= x && x < k[i]) ? 1.0 : 0.0;
    }
    double left = 0.0;
    const double dl = k[i - 1 + d] - k[i - 1];
    if (dl > 0.0) left = (x - k[i - 1]) / dl * basis_unchecked(i, k, d - 1, x);
    double right = 0.0;
    const double dr = k[i + d] - k[i];
    if (dr > 0.0) right = (k[i + d] - x) / dr * basis_unchecked(i + 1, k, d - 1, x);
    return left + right;
}

double basis_deriv_unchecked(std::size_t i, const std::vector<double>& k, int d, double x) {
    double left = 0.0;
    const double dl = k[i - 1 + d] - k[i - 1];
    if (dl > 0.0) left = basis_unchecked(i, k, d - 1, x) / dl;
    double right = 0.0;
    const double dr = k[i + d] - k[i];
    if (dr > 0.0) right = basis_unchecked(i + 1, k, d - 1, x) / dr;
    return d * (left - right);
}

double basis_deriv2_unchecked(std::size_t i, const std::vector<double>& k, int d, double x) {
    double left = 0.0;
    const double dl = k[i - 1 + d] - k[i - 1];
    if (dl > 0.0) left = basis_deriv_unchecked(i, k, d - 1, x) / dl;
    double right = 0.0;
    const double dr = k[i + d] - k[i];
    if (dr > 0.0) right = basis_deriv_unchecked(i + 1, k, d - 1, x) / dr;
    return d * (left - right);
}

void validate_knots(const std::vector<double>& k) {
    for (std::size_t j = 1; j < k.size(); ++j) {
        if (k[j] < k[j - 1]) throw DataError("bspline: decreasing knot vector");
    }
}

/// Spline value with the last interval closed, so S(k_max) equals the last
/// coefficient on a clamped knot vector instead of the raw zero extension.
double spline_value(const std::vector<double>& theta, const std::vector<double>& k, double x) {
    if (x >= k.back()) return theta.back();
    double s = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        s += theta[i] * basis_unchecked(i + 1, k, 3, x);
    }
    return s;
}

double spline_deriv2(const std::vector<double>& theta, const std::vector<double>& k, double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        s += theta[i] * basis_deriv2_unchecked(i + 1, k, 3, x);
    }
    return s;
}

struct TrainingSample {
    double w = 0.0; // transformed wind, inside [w_lo, w_hi]
    double p = 0.0;
};

std::vector<TrainingSample> transform_training(const ModelSpec& spec, const CleanDataset& data) {
    std::vector<TrainingSample> out;
    out.reserve(data.records.size());
    for (const auto& r : data.records) {
        const double w = *r.wind;
        if (w >= spec.cutout) continue;
        const auto [w_eff, zero] = constrain_input(w, spec);
        (void)zero;
        out.push_back({w_eff, *r.power});
    }
    if (out.empty()) {
        throw DataError("fit: no data left after the input transformation");
    }
    return out;
}

Eigen::Index distinct_winds(const std::vector<TrainingSample>& samples) {
    std::set<long long> seen;
    for (const auto& s : samples) seen.insert(to_tenths(s.w));
    return static_cast<Eigen::Index>(seen.size());
}

std::vector<double> equidistant_splits(const ModelSpec& spec, int m) {
    std::vector<double> s(m);
    for (int k = 0; k < m; ++k) {
        s[k] = spec.w_lo + k * (spec.w_hi - spec.w_lo) / m;
    }
    return s;
}

std::vector<double> clamped_equidistant_knots(const ModelSpec& spec, int m) {
    std::vector<double> k;
    k.reserve(m + 4);
    for (int j = 0; j < 4; ++j) k.push_back(spec.w_lo);
    for (int j = 1; j <= m - 4; ++j) {
        k.push_back(spec.w_lo + j * (spec.w_hi - spec.w_lo) / (m - 3));
    }
    for (int j = 0; j < 4; ++j) k.push_back(spec.w_hi);
    return k;
}

/// Row of the spline design matrix; the closed last interval puts all weight
/// on the last basis function at x = k_max, mirroring spline_value.
Eigen::RowVectorXd spline_design_row(const std::vector<double>& k, int m, double x) {
    Eigen::RowVectorXd row(m);
    if (x >= k.back()) {
        row.setZero();
        row(m - 1) = 1.0;
        return row;
    }
    for (int i = 0; i < m; ++i) {
        row(i) = basis_unchecked(static_cast<std::size_t>(i) + 1, k, 3, x);
    }
    return row;
}

FittedModel fit_linear_class(const ModelSpec& spec, const std::vector<TrainingSample>& samples) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    const Eigen::Index sat = distinct_winds(samples);
    FittedModel model;
    model.spec = spec;

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = samples[i].p;

    if (spec.model_class == ModelClass::PiecewiseLinear) {
        const auto splits = equidistant_splits(spec, spec.m);
        Eigen::MatrixXd X(n, spec.m + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            X(i, 0) = 1.0;
            for (int k = 0; k < spec.m; ++k) {
                const double w = samples[i].w;
                X(i, k + 1) = w >= splits[k] ? w - splits[k] : 0.0;
            }
        }
        auto ls = solve_least_squares(X, y, sat, "piecewise m=" + std::to_string(spec.m));
        model.splits = splits;
        model.theta.assign(ls.coef.data(), ls.coef.data() + ls.coef.size());
        model.train_mse = ls.train_mse;
        model.n_params = spec.m + 1;
    } else if (spec.model_class == ModelClass::Polynomial) {
        std::vector<double> ws(samples.size()), ps(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            ws[i] = samples[i].w;
            ps[i] = samples[i].p;
        }
        model.w_bar = mean(ws);
        model.p_bar = mean(ps);
        const double nn = static_cast<double>(samples.size());
        const double bessel = nn > 1.0 ? nn / (nn - 1.0) : 1.0;
        model.d_w = std::sqrt(variance(ws) * bessel);
        model.d_p = std::sqrt(variance(ps) * bessel);
        if (model.d_w <= 0.0) model.d_w = 1.0;
        if (model.d_p <= 0.0) model.d_p = 1.0;

        Eigen::MatrixXd X(n, spec.m + 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double z = (samples[i].w - model.w_bar) / model.d_w;
            double zp = 1.0;
            for (int k = 0; k <= spec.m; ++k) {
                X(i, k) = zp;
                zp *= z;
            }
        }
        // Fit the centered response so theta is in d_p units of the scaled model.
        Eigen::VectorXd yc = (y.array() - model.p_bar) / model.d_p;
        auto ls = solve_least_squares(X, yc, sat, "polynomial m=" + std::to_string(spec.m));
        model.theta.assign(ls.coef.data(), ls.coef.data() + ls.coef.size());
        const Eigen::VectorXd pred =
            (model.p_bar + model.d_p * (X * ls.coef).array()).matrix();
        model.train_mse = (y - pred).squaredNorm() / static_cast<double>(n);
        model.n_params = spec.m + 1;
    } else {
        if (spec.m < 4) throw FitError("spline m=" + std::to_string(spec.m) +
                                       ": a cubic spline needs at least 4 basis functions");
        auto solve_on_knots = [&](const std::vector<double>& knots) {
            Eigen::MatrixXd X(n, spec.m);
            for (Eigen::Index i = 0; i < n; ++i) {
                X.row(i) = spline_design_row(knots, spec.m, samples[i].w);
            }
            return solve_least_squares(X, y, sat, "spline m=" + std::to_string(spec.m));
        };
        FittedModel round1;
        round1.spec = spec;
        round1.knots = clamped_equidistant_knots(spec, spec.m);
        auto ls1 = solve_on_knots(round1.knots);
        round1.theta.assign(ls1.coef.data(), ls1.coef.data() + ls1.coef.size());
        round1.train_mse = ls1.train_mse;
        round1.n_params = spec.m;
        round1.fitted = true;

        model.knots = reallocate_knots(round1);
        if (model.knots == round1.knots) {
            model.theta = round1.theta;
            model.train_mse = round1.train_mse;
        } else {
            auto ls2 = solve_on_knots(model.knots);
            model.theta.assign(ls2.coef.data(), ls2.coef.data() + ls2.coef.size());
            model.train_mse = ls2.train_mse;
        }
        model.n_params = spec.m;
    }
    model.fitted = true;
    return model;
}

struct LogisticEval {
    double value = 0.0;
    std::array<double, 6> grad{}; // first n_params entries used
};

double safe_exp(double x) {
    return std::exp(std::clamp(x, -700.0, 700.0));
}

LogisticEval eval_5pl(const std::vector<double>& th, double w) {
    LogisticEval e;
    const double u = std::pow(w / th[1], th[2]);
    const double b = 1.0 + u;
    const double a = std::pow(b, th[3]);
    e.value = th[4] + (th[0] - th[4]) / a;
    const double inv_a = 1.0 / a;
    const double common = (th[0] - th[4]) * (-th[3]) * std::pow(b, -th[3] - 1.0);
    e.grad[0] = inv_a;
    e.grad[1] = common * (-th[2] * u / th[1]);
    e.grad[2] = common * u * std::log(w / th[1]);
    e.grad[3] = (th[0] - th[4]) * (-std::log(b)) * inv_a;
    e.grad[4] = 1.0 - inv_a;
    return e;
}

LogisticEval eval_mstukel(const std::vector<double>& th, double w, const ModelSpec& spec) {
    LogisticEval e;
    const double dw = w - th[2];
    const bool left = spec.w_lo <= w && w < th[2];
    const bool right = th[2] <= w && w <= spec.w_hi;
    const double eta = th[1] * dw + (left ? th[4] * dw * dw * dw * dw : 0.0) +
                       (right ? th[5] * dw * dw : 0.0);
    const double s = 1.0 / (1.0 + safe_exp(-eta));
    e.value = th[0] + (th[3] - th[0]) * s;
    const double d_eta = (th[3] - th[0]) * s * (1.0 - s);
    e.grad[0] = 1.0 - s;
    e.grad[1] = d_eta * dw;
    e.grad[2] = d_eta * (-th[1] - (left ? 4.0 * th[4] * dw * dw * dw : 0.0) -
                         (right ? 2.0 * th[5] * dw : 0.0));
    e.grad[3] = s;
    e.grad[4] = d_eta * (left ? dw * dw * dw * dw : 0.0);
    e.grad[5] = d_eta * (right ? dw * dw : 0.0);
    return e;
}

FittedModel fit_logistic_class(const ModelSpec& spec, const std::vector<TrainingSample>& samples) {
    const bool five_pl = spec.model_class == ModelClass::Logistic5PL;
    const int k = five_pl ? 5 : 6;
    const auto n = static_cast<Eigen::Index>(samples.size());

    double p_min = samples[0].p, p_max = samples[0].p;
    for (const auto& s : samples) {
        p_min = std::min(p_min, s.p);
        p_max = std::max(p_max, s.p);
    }
    const double p_half = 0.5 * (p_min + p_max);
    double w_half = samples[0].w;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        const double gap = std::abs(s.p - p_half);
        if (gap < best_gap) {
            best_gap = gap;
            w_half = s.w;
        }
    }

    // Geometric initialization: asymptotes at the observed power range, the
    // transition centered where power crosses half range.
    std::vector<double> th;
    if (five_pl) {
        th = {p_min, w_half, 5.0, 1.0, p_max};
    } else {
        th = {p_min, 0.6, w_half, p_max, 0.0, 0.0};
    }

    auto objective = [&](const std::vector<double>& t, Eigen::VectorXd* resid,
                         Eigen::MatrixXd* jac) {
        double sse = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const LogisticEval e = five_pl ? eval_5pl(t, samples[i].w)
                                           : eval_mstukel(t, samples[i].w, spec);
            const double r = samples[i].p - e.value;
            if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
            sse += r * r;
            if (resid) (*resid)(i) = r;
            if (jac) {
                for (int j = 0; j < k; ++j) (*jac)(i, j) = e.grad[j];
            }
        }
        return sse;
    };

    Eigen::VectorXd resid(n);
    Eigen::MatrixXd jac(n, k);
    double sse = objective(th, &resid, &jac);
    if (!std::isfinite(sse)) throw FitError(class_name(spec.model_class) + ": bad initialization");

    double lambda = 1e-3;
    bool converged = false;
    for (int it = 0; it < 500 && !converged; ++it) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * resid;
        bool stepped = false;
        while (lambda <= 1e14) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
            const Eigen::VectorXd delta = damped.ldlt().solve(jtr);
            std::vector<double> cand = th;
            for (int j = 0; j < k; ++j) cand[j] += delta(j);
            const bool valid = !five_pl || cand[1] > 1e-6; // theta_2 scales w, keep positive
            const double cand_sse = valid ? objective(cand, nullptr, nullptr)
                                          : std::numeric_limits<double>::infinity();
            if (cand_sse < sse) {
                const double rel = (sse - cand_sse) / std::max(sse, 1e-300);
                th = cand;
                sse = objective(th, &resid, &jac);
                lambda = std::max(lambda / 10.0, 1e-15);
                stepped = true;
                if (rel < 1e-10) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) converged = true; // no descent direction left at machine scale
    }
    if (!converged) {
        throw FitError(class_name(spec.model_class) +
                       " fit did not converge; final objective " + std::to_string(sse));
    }

    FittedModel model;
    model.spec = spec;
    model.theta = th;
    model.train_mse = sse / static_cast<double>(n);
    model.n_params = k;
    model.fitted = true;
    return model;
}

} // namespace

double bspline_basis(std::size_t i, const std::vector<double>& knots, int degree, double x) {
    if (degree < 0 || i < 1 || i + degree + 1 > knots.size()) {
        throw DataError("bspline_basis: index out of range");
    }
    validate_knots(knots);
    return basis_unchecked(i, knots, degree, x);
}

double eval(const FittedModel& model, double w) {
    if (!model.fitted) throw FitError("eval: model is not fitted");
    const auto [w_eff, zero] = constrain_input(w, model.spec);
    if (zero) return 0.0;
    const auto& th = model.theta;
    switch (model.spec.model_class) {
        case ModelClass::Logistic5PL:
            return eval_5pl(th, w_eff).value;
        case ModelClass::MStukel:
            return eval_mstukel(th, w_eff, model.spec).value;
        case ModelClass::PiecewiseLinear: {
            double p = th[0];
            for (std::size_t k = 0; k < model.splits.size(); ++k) {
                if (w_eff >= model.splits[k]) p += (w_eff - model.splits[k]) * th[k + 1];
            }
            return p;
        }
        case ModelClass::Polynomial: {
            const double z = (w_eff - model.w_bar) / model.d_w;
            double acc = 0.0;
            double zp = 1.0;
            for (double c : th) {
                acc += c * zp;
                zp *= z;
            }
            return model.p_bar + model.d_p * acc;
        }
        case ModelClass::BSpline:
            return spline_value(th, model.knots, w_eff);
    }
    throw Error("eval: unknown model class");
}

FittedModel fit(const ModelSpec& spec, const CleanDataset& data) {
    if (data.records.empty()) throw DataError("fit: empty data");
    if (spec.m < 1) throw FitError("fit: order must be at least 1");
    const auto samples = transform_training(spec, data);
    FittedModel model;
    if (spec.model_class == ModelClass::Logistic5PL || spec.model_class == ModelClass::MStukel) {
        model = fit_logistic_class(spec, samples);
    } else {
        model = fit_linear_class(spec, samples);
    }
    model.n_train = samples.size();
    for (double t : model.theta) {
        if (!std::isfinite(t)) {
            throw FitError(class_name(spec.model_class) + " fit produced a non-finite parameter");
        }
    }
    return model;
}

std::vector<double> reallocate_knots(const FittedModel& round1) {
    if (!round1.fitted || round1.spec.model_class != ModelClass::BSpline) {
        throw FitError("reallocate_knots: expected a fitted spline model");
    }
    const auto& k = round1.knots;
    const int m = round1.spec.m;
    const double lo = k.front();
    const double hi = k.back();
    const int cells = 4000;
    const double step = (hi - lo) / cells;

    // Midpoint density |S''|^(1/2); its running integral drives knot placement.
    std::vector<double> density(cells);
    double total = 0.0;
    double peak = 0.0;
    for (int j = 0; j < cells; ++j) {
        const double x = lo + (j + 0.5) * step;
        const double dd = std::abs(spline_deriv2(round1.theta, k, x));
        peak = std::max(peak, dd);
        density[j] = std::sqrt(dd);
        total += density[j] * step;
    }
    double scale = 0.0;
    for (double t : round1.theta) scale = std::max(scale, std::abs(t));
    if (peak <= 1e-9 * std::max(1.0, scale)) {
        return k; // curvature-free spline: nothing to equidistribute
    }

    std::vector<double> out;
    out.reserve(k.size());
    for (int j = 0; j < 4; ++j) out.push_back(lo);
    const int interior = m - 4;
    double acc = 0.0;
    int cell = 0;
    for (int j = 1; j <= interior; ++j) {
        const double target = total * j / (interior + 1);
        while (cell < cells && acc + density[cell] * step < target) {
            acc += density[cell] * step;
            ++cell;
        }
        double x;
        if (cell >= cells) {
            x = hi;
        } else {
            const double need = target - acc;
            const double frac = density[cell] > 0.0 ? need / (density[cell] * step) : 1.0;
            x = lo + (cell + std::clamp(frac, 0.0, 1.0)) * step;
        }
        x = std::clamp(x, out.back(), hi);
        out.push_back(x);
    }
    for (int j = 0; j < 4; ++j) out.push_back(hi);
    return out;
}

double mse(const FittedModel& model, const CleanDataset& data) {
    if (data.records.empty()) throw DataError("mse: empty data");
    double s = 0.0;
    for (const auto& r : data.records) {
        const double d = *r.power - eval(model, *r.wind);
        s += d * d;
    }
    return s / static_cast<double>(data.records.size());
}

nlohmann::json model_to_json(const FittedModel& model) {
    nlohmann::json aux = nlohmann::json::object();
    switch (model.spec.model_class) {
        case ModelClass::BSpline:
            aux["knots"] = model.knots;
            break;
        case ModelClass::PiecewiseLinear:
            aux["splits"] = model.splits;
            break;
        case ModelClass::Polynomial:
            aux["scaling"] = {{"p_bar", model.p_bar},
                              {"w_bar", model.w_bar},
                              {"d_p", model.d_p},
                              {"d_w", model.d_w}};
            break;
        default:
            break;
    }
    return nlohmann::json{{"class", class_name(model.spec.model_class)},
                          {"m", model.spec.m},
                          {"theta", model.theta},
                          {"aux", aux},
                          {"train_mse", model.train_mse},
                          {"n_params", model.n_params}};
}

FittedModel model_from_json(const nlohmann::json& j) {
    FittedModel model;
    try {
        model.spec.model_class = class_from_name(j.at("class").get<std::string>());
        model.spec.m = j.at("m").get<int>();
        model.theta = j.at("theta").get<std::vector<double>>();
        model.train_mse = j.at("train_mse").get<double>();
        model.n_params = j.at("n_params").get<int>();
        const auto& aux = j.at("aux");
        switch (model.spec.model_class) {
            case ModelClass::BSpline:
                model.knots = aux.at("knots").get<std::vector<double>>();
                break;
            case ModelClass::PiecewiseLinear:
                model.splits = aux.at("splits").get<std::vector<double>>();
                break;
            case ModelClass::Polynomial:
                model.p_bar = aux.at("scaling").at("p_bar").get<double>();
                model.w_bar = aux.at("scaling").at("w_bar").get<double>();
                model.d_p = aux.at("scaling").at("d_p").get<double>();
                model.d_w = aux.at("scaling").at("d_w").get<double>();
                break;
            default:
                break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError(std::string("invalid model JSON: ") + e.what());
    } catch (const DataError& e) {
        // An unknown class name in a stored model is a corrupt artifact.
        throw ArtifactError(std::string("invalid model JSON: ") + e.what());
    }
    if (model.spec.model_class == ModelClass::BSpline) {
        if (model.knots.size() != model.theta.size() + 4) {
            throw ArtifactError("invalid model JSON: spline knot count must be m+4");
        }
        validate_knots(model.knots);
    }
    for (double t : model.theta) {
        if (!std::isfinite(t)) throw ArtifactError("invalid model JSON: non-finite parameter");
    }
    model.fitted = true;
    return model;
}

} // namespace wtpc
