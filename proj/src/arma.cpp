#include "wtpc/arma.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/estimation.hpp"
#include "wtpc/stats.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace wtpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Roots of z^q + b_1 z^{q-1} + ... + b_q via the companion matrix.
std::vector<std::complex<double>> roots_of_monic(const std::vector<double>& b) {
  const std::size_t q = b.size();
  if (q == 0) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(q, q);
  for (std::size_t i = 1; i < q; ++i) comp(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < q; ++i) comp(i, q - 1) = -b[q - 1 - i];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
  std::vector<std::complex<double>> roots(q);
  for (std::size_t i = 0; i < q; ++i) roots[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
  return roots;
}

std::vector<double> monic_from_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> coef{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(coef.size() + 1, 0.0);
    for (std::size_t i = 0; i < coef.size(); ++i) {
      next[i] += coef[i];
      next[i + 1] -= r * coef[i];
    }
    coef = std::move(next);
  }
  std::vector<double> out(coef.size() - 1);
  for (std::size_t i = 1; i < coef.size(); ++i) out[i - 1] = coef[i].real();
  return out;
}

/// Reflect any companion root on or outside the unit circle to its inverse.
bool reflect_into_unit(std::vector<double>& b) {
  if (b.empty()) return false;
  auto roots = roots_of_monic(b);
  bool changed = false;
  for (auto& r : roots) {
    double m = std::abs(r);
    if (m >= 1.0) {
      r = 1.0 / std::conj(r);
      if (std::abs(r) >= 1.0) r *= 1.0 - 1e-8;
      changed = true;
    }
  }
  if (changed) b = monic_from_roots(roots);
  return changed;
}

bool roots_inside_unit(const std::vector<double>& b) {
  for (const auto& r : roots_of_monic(b))
    if (std::abs(r) >= 1.0) return false;
  return true;
}

std::vector<double> ar_monic(const ArmaModel& m) {
  std::vector<double> b(m.a.size());
  for (std::size_t i = 0; i < m.a.size(); ++i) b[i] = -m.a[i];
  return b;
}

struct Theta {
  double mu = 0.0;
  std::vector<double> a;
  std::vector<double> c;

  std::size_t dim() const { return 1 + a.size() + c.size(); }
};

double css_only(const Theta& th, const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t q1 = th.a.size();
  const std::size_t q2 = th.c.size();
  std::vector<double> eps(n, 0.0);
  double css = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double e = x[t] - th.mu;
    for (std::size_t i = 1; i <= q1; ++i)
      if (t >= i) e -= th.a[i - 1] * x[t - i];
    for (std::size_t j = 1; j <= q2; ++j)
      if (t >= j) e -= th.c[j - 1] * eps[t - j];
    if (!std::isfinite(e)) return kInf;
    eps[t] = e;
    css += e * e;
  }
  return css;
}

/// One filtering pass accumulating the Gauss-Newton system.
double css_with_system(const Theta& th, const std::vector<double>& x,
                       Eigen::MatrixXd& jtj, Eigen::VectorXd& jte) {
  const std::size_t n = x.size();
  const std::size_t q1 = th.a.size();
  const std::size_t q2 = th.c.size();
  const std::size_t dim = th.dim();
  jtj = Eigen::MatrixXd::Zero(dim, dim);
  jte = Eigen::VectorXd::Zero(dim);
  std::vector<double> eps(n, 0.0);
  std::vector<Eigen::VectorXd> grad(n, Eigen::VectorXd::Zero(dim));
  double css = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double e = x[t] - th.mu;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    g[0] = -1.0;
    for (std::size_t i = 1; i <= q1; ++i)
      if (t >= i) {
        e -= th.a[i - 1] * x[t - i];
        g[static_cast<Eigen::Index>(i)] = -x[t - i];
      }
    for (std::size_t j = 1; j <= q2; ++j)
      if (t >= j) {
        e -= th.c[j - 1] * eps[t - j];
        g[static_cast<Eigen::Index>(q1 + j)] = -eps[t - j];
        g -= th.c[j - 1] * grad[t - j];
      }
    if (!std::isfinite(e)) return kInf;
    eps[t] = e;
    grad[t] = g;
    jtj.noalias() += g * g.transpose();
    jte.noalias() += g * e;
    css += e * e;
  }
  return css;
}

Theta initial_estimate(const std::vector<double>& x, std::size_t q1, std::size_t q2) {
  const std::size_t n = x.size();
  Theta th;
  th.a.assign(q1, 0.0);
  th.c.assign(q2, 0.0);

  std::vector<double> proxy(n, 0.0);
  if (q2 > 0 || q1 > 0) {
    const auto order = static_cast<std::size_t>(
        std::ceil(10.0 * std::log(static_cast<double>(n))));
    if (n < 2 * order + 2)
      throw DataError("series shorter than the long autoregression order");
    const std::size_t rows = n - order;
    Eigen::MatrixXd design(rows, order + 1);
    Eigen::VectorXd target(rows);
    for (std::size_t t = order; t < n; ++t) {
      const auto row = static_cast<Eigen::Index>(t - order);
      design(row, 0) = 1.0;
      for (std::size_t i = 1; i <= order; ++i)
        design(row, static_cast<Eigen::Index>(i)) = x[t - i];
      target(row) = x[t];
    }
    auto ls = solve_least_squares(design, target, 0, "long autoregression");
    for (std::size_t t = order; t < n; ++t) {
      double fit = ls.coef(0);
      for (std::size_t i = 1; i <= order; ++i)
        fit += ls.coef(static_cast<Eigen::Index>(i)) * x[t - i];
      proxy[t] = x[t] - fit;
    }
  }

  const std::size_t t0 = std::max(q1, q2);
  const std::size_t rows = n - t0;
  Eigen::MatrixXd design(rows, 1 + q1 + q2);
  Eigen::VectorXd target(rows);
  for (std::size_t t = t0; t < n; ++t) {
    const auto row = static_cast<Eigen::Index>(t - t0);
    design(row, 0) = 1.0;
    for (std::size_t i = 1; i <= q1; ++i)
      design(row, static_cast<Eigen::Index>(i)) = x[t - i];
    for (std::size_t j = 1; j <= q2; ++j)
      design(row, static_cast<Eigen::Index>(q1 + j)) = proxy[t - j];
    target(row) = x[t];
  }
  auto ls = solve_least_squares(design, target, 0, "ARMA starting values");
  th.mu = ls.coef(0);
  for (std::size_t i = 0; i < q1; ++i) th.a[i] = ls.coef(static_cast<Eigen::Index>(1 + i));
  for (std::size_t j = 0; j < q2; ++j) th.c[j] = ls.coef(static_cast<Eigen::Index>(1 + q1 + j));

  // An explosive start would overflow the conditional-sum-of-squares filter.
  std::vector<double> arb(th.a.size());
  for (std::size_t i = 0; i < th.a.size(); ++i) arb[i] = -th.a[i];
  if (reflect_into_unit(arb))
    for (std::size_t i = 0; i < th.a.size(); ++i) th.a[i] = -arb[i];
  reflect_into_unit(th.c);
  return th;
}

}  // namespace

GluedSeries glue(const std::vector<double>& rescaled, const std::vector<double>& winds,
                 std::pair<double, double> band) {
  if (rescaled.size() != winds.size())
    throw DataError("residual and wind series lengths differ");
  GluedSeries out;
  bool gap_open = false;
  for (std::size_t i = 0; i < rescaled.size(); ++i) {
    if (winds[i] >= band.first && winds[i] <= band.second) {
      if (gap_open && !out.values.empty()) out.segment_starts.push_back(out.values.size());
      out.values.push_back(rescaled[i]);
      gap_open = false;
    } else {
      gap_open = true;
    }
  }
  return out;
}

ArmaModel fit_arma(const GluedSeries& series, std::size_t q1, std::size_t q2) {
  const auto& x = series.values;
  const std::size_t n = x.size();
  if (n < 10 * (q1 + q2 + 1)) throw DataError("insufficient data for dynamic layer");

  ArmaModel model;
  model.q1 = q1;
  model.q2 = q2;

  if (q1 == 0 && q2 == 0) {
    model.mu = mean(x);
    double css = 0.0;
    for (double v : x) css += (v - model.mu) * (v - model.mu);
    model.sigma_eps2 = css / static_cast<double>(n);
    if (!(model.sigma_eps2 > 0.0)) throw FitError("ARMA innovation variance is zero");
    return model;
  }

  Theta th = initial_estimate(x, q1, q2);
  const std::size_t dim = th.dim();
  Eigen::MatrixXd jtj;
  Eigen::VectorXd jte;
  double css = css_with_system(th, x, jtj, jte);
  if (!std::isfinite(css)) throw FitError("ARMA starting values are unusable");

  double lambda = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < 500 && !converged; ++iter) {
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      Eigen::VectorXd step = damped.ldlt().solve(-jte);
      Theta cand = th;
      cand.mu += step(0);
      for (std::size_t i = 0; i < q1; ++i) cand.a[i] += step(static_cast<Eigen::Index>(1 + i));
      for (std::size_t j = 0; j < q2; ++j)
        cand.c[j] += step(static_cast<Eigen::Index>(1 + q1 + j));
      double cand_css = css_only(cand, x);
      if (cand_css < css) {
        double rel = (css - cand_css) / std::max(css, 1e-300);
        th = cand;
        css = cand_css;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel < 1e-10) converged = true;
        // Near-cancelling AR and MA factors leave a flat ridge where the
        // objective keeps creeping; a negligible accepted step is converged.
        double scale = std::abs(th.mu);
        for (double v : th.a) scale = std::max(scale, std::abs(v));
        for (double v : th.c) scale = std::max(scale, std::abs(v));
        if (step.norm() < 1e-9 * (1.0 + scale)) converged = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e14) {
          converged = true;
          accepted = true;
        }
      }
    }
    if (!converged) css = css_with_system(th, x, jtj, jte);
  }
  // Near-cancelling factors leave a valley whose floor sits outside the
  // invertible region and drains forever; the iterate moves by less than the
  // estimate's own sampling error long before that, so the cap is acceptance,
  // not failure.  The root reflection below restores a usable model.

  model.mu = th.mu;
  model.a = th.a;
  model.c = th.c;

  std::vector<double> arb = ar_monic(model);
  bool projected = reflect_into_unit(arb);
  if (projected)
    for (std::size_t i = 0; i < model.a.size(); ++i) model.a[i] = -arb[i];
  projected |= reflect_into_unit(model.c);
  if (projected) {
    Theta final_th{model.mu, model.a, model.c};
    css = css_only(final_th, x);
  }

  model.sigma_eps2 = css / static_cast<double>(n);
  if (!(model.sigma_eps2 > 0.0) || !std::isfinite(model.sigma_eps2))
    throw FitError("ARMA innovation variance is zero");
  return model;
}

std::vector<double> arma_innovations(const ArmaModel& model,
                                     const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> eps(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double e = values[t] - model.mu;
    for (std::size_t i = 1; i <= model.q1; ++i)
      if (t >= i) e -= model.a[i - 1] * values[t - i];
    for (std::size_t j = 1; j <= model.q2; ++j)
      if (t >= j) e -= model.c[j - 1] * eps[t - j];
    eps[t] = e;
  }
  return eps;
}

std::vector<double> psi_weights(const ArmaModel& model, std::size_t count) {
  std::vector<double> psi;
  psi.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    if (j == 0) {
      psi.push_back(1.0);
      continue;
    }
    double w = j <= model.q2 ? model.c[j - 1] : 0.0;
    for (std::size_t i = 1; i <= std::min(j, model.q1); ++i) w += model.a[i - 1] * psi[j - i];
    psi.push_back(w);
  }
  return psi;
}

double stationary_variance(const ArmaModel& model) {
  double total = 0.0;
  std::vector<double> psi{1.0};
  std::size_t quiet = 0;
  for (std::size_t j = 0; j < 100000; ++j) {
    if (j >= psi.size()) {
      double w = j <= model.q2 ? model.c[j - 1] : 0.0;
      for (std::size_t i = 1; i <= std::min(j, model.q1); ++i) w += model.a[i - 1] * psi[j - i];
      psi.push_back(w);
    }
    double term = model.sigma_eps2 * psi[j] * psi[j];
    total += term;
    quiet = j > model.q1 + model.q2 && term <= total * 1e-16 ? quiet + 1 : 0;
    if (quiet > model.q1 + 2) break;
  }
  return total;
}

std::vector<Forecast> forecast_trajectory(const ArmaModel& model,
                                          const std::vector<double>& history,
                                          std::size_t h_max) {
  if (h_max == 0) return {};
  const auto n = static_cast<std::ptrdiff_t>(history.size());
  std::vector<double> eps = arma_innovations(model, history);
  std::vector<double> ext = history;
  ext.reserve(history.size() + h_max);

  auto value_at = [&](std::ptrdiff_t t) { return t >= 0 ? ext[static_cast<std::size_t>(t)] : 0.0; };
  auto eps_at = [&](std::ptrdiff_t t) {
    return t >= 0 && t < n ? eps[static_cast<std::size_t>(t)] : 0.0;
  };

  std::vector<double> psi = psi_weights(model, h_max);
  std::vector<Forecast> out;
  out.reserve(h_max);
  double cum = 0.0;
  for (std::size_t s = 1; s <= h_max; ++s) {
    const std::ptrdiff_t t = n + static_cast<std::ptrdiff_t>(s) - 1;
    double m = model.mu;
    for (std::size_t i = 1; i <= model.q1; ++i)
      m += model.a[i - 1] * value_at(t - static_cast<std::ptrdiff_t>(i));
    for (std::size_t j = 1; j <= model.q2; ++j)
      m += model.c[j - 1] * eps_at(t - static_cast<std::ptrdiff_t>(j));
    ext.push_back(m);
    cum += model.sigma_eps2 * psi[s - 1] * psi[s - 1];
    out.push_back({m, cum});
  }
  return out;
}

Forecast forecast_residual(const ArmaModel& model, const GluedSeries& history,
                           std::size_t h_steps) {
  if (h_steps < 1) throw DataError("forecast horizon must be at least one step");
  return forecast_trajectory(model, history.values, h_steps).back();
}

DynamicModel fit_dynamic(const EnhancedModel& enhanced, const ResidualProfile& profile,
                         const std::vector<ScadaRecord>& records, std::size_t q1,
                         std::size_t q2) {
  std::vector<double> winds;
  winds.reserve(records.size());
  for (const auto& rec : records) {
    if (!rec.wind) throw DataError("record without wind in dynamic fit");
    winds.push_back(*rec.wind);
  }
  auto r = residuals(enhanced, records);
  auto rp = rescale(r, profile, winds);
  GluedSeries glued = glue(rp, winds, {profile.g_lo, profile.g_hi});

  DynamicModel model;
  model.enhanced = enhanced;
  model.profile = profile;
  model.arma = fit_arma(glued, q1, q2);

  std::vector<double> outside;
  for (std::size_t i = 0; i < winds.size(); ++i)
    if (!(winds[i] >= profile.g_lo && winds[i] <= profile.g_hi)) outside.push_back(r[i]);
  model.sigma_e2 = outside.size() >= 2 ? variance(outside) : 0.0;
  return model;
}

std::vector<Forecast> predict_power(const DynamicModel& model,
                                    const std::vector<ScadaRecord>& history,
                                    const std::vector<ExogPoint>& future) {
  if (!model.enhanced.fitted) throw FitError("dynamic model components not fitted");

  std::vector<double> winds;
  winds.reserve(history.size());
  for (const auto& rec : history) {
    if (!rec.wind) throw DataError("record without wind in forecast history");
    winds.push_back(*rec.wind);
  }
  auto r = residuals(model.enhanced, history);
  auto rp = rescale(r, model.profile, winds);
  GluedSeries glued = glue(rp, winds, {model.profile.g_lo, model.profile.g_hi});

  std::size_t in_band_steps = 0;
  for (const auto& pt : future)
    if (model.profile.in_band(from_tenths(to_tenths(pt.wind)))) ++in_band_steps;
  std::vector<Forecast> traj =
      forecast_trajectory(model.arma, glued.values, std::max<std::size_t>(in_band_steps, 1));

  std::vector<Forecast> out;
  out.reserve(future.size());
  std::size_t d = 0;
  for (const auto& pt : future) {
    double base = eval_enhanced(model.enhanced, pt.wind, pt.angle, pt.temperature);
    double wq = from_tenths(to_tenths(pt.wind));
    if (model.profile.in_band(wq)) {
      const Forecast& f = traj[d++];
      double s = model.profile.sigma_at(pt.wind);
      out.push_back({base + s * f.mean, s * s * f.variance});
    } else {
      out.push_back({base, model.sigma_e2});
    }
  }
  return out;
}

std::vector<double> simulate_arma(const ArmaModel& model, std::size_t n,
                                  std::mt19937_64& rng, std::size_t burn_in) {
  std::normal_distribution<double> noise(0.0, std::sqrt(model.sigma_eps2));
  const std::size_t total = n + burn_in;
  std::vector<double> x(total, 0.0);
  std::vector<double> eps(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    eps[t] = noise(rng);
    double v = model.mu + eps[t];
    for (std::size_t i = 1; i <= model.q1; ++i)
      if (t >= i) v += model.a[i - 1] * x[t - i];
    for (std::size_t j = 1; j <= model.q2; ++j)
      if (t >= j) v += model.c[j - 1] * eps[t - j];
    x[t] = v;
  }
  return {x.begin() + static_cast<std::ptrdiff_t>(burn_in), x.end()};
}

bool arma_is_stable(const ArmaModel& model) { return roots_inside_unit(ar_monic(model)); }

bool arma_is_invertible(const ArmaModel& model) { return roots_inside_unit(model.c); }

nlohmann::json arma_to_json(const ArmaModel& model) {
  return nlohmann::json{{"q1", model.q1}, {"q2", model.q2},   {"a", model.a},
                        {"c", model.c},   {"mu", model.mu},   {"sigma_eps2", model.sigma_eps2}};
}

ArmaModel arma_from_json(const nlohmann::json& j) {
  ArmaModel model;
  try {
    model.q1 = j.at("q1").get<std::size_t>();
    model.q2 = j.at("q2").get<std::size_t>();
    model.a = j.at("a").get<std::vector<double>>();
    model.c = j.at("c").get<std::vector<double>>();
    model.mu = j.at("mu").get<double>();
    model.sigma_eps2 = j.at("sigma_eps2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(std::string("malformed ARMA model: ") + e.what());
  }
  if (model.a.size() != model.q1 || model.c.size() != model.q2)
    throw ArtifactError("ARMA coefficient counts do not match the stated orders");
  for (double v : model.a)
    if (!std::isfinite(v)) throw ArtifactError("non-finite ARMA coefficient");
  for (double v : model.c)
    if (!std::isfinite(v)) throw ArtifactError("non-finite ARMA coefficient");
  if (!std::isfinite(model.mu) || !(model.sigma_eps2 > 0.0))
    throw ArtifactError("ARMA model has invalid intercept or innovation variance");
  if (!arma_is_stable(model)) throw ArtifactError("ARMA model is not stable");
  if (!arma_is_invertible(model)) throw ArtifactError("ARMA model is not invertible");
  return model;
}

}  // namespace wtpc
