#include "wtpc/selection.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/io.hpp"

#include <cmath>
#include <numeric>

namespace wtpc {

double bic(int n_params, std::size_t n_samples, double train_mse) {
  if (n_samples < 1) throw DataError("bic: need at least one sample");
  if (!(train_mse > 0.0))
    throw DataError("bic: training MSE must be positive (perfect interpolation?)");
  const auto n = static_cast<double>(n_samples);
  return std::log(n) * n_params + n * std::log(train_mse) + n * std::log(2.0 * M_PI) + 1.0;
}

std::string SelectionResult::sweep_csv() const {
  std::string out = "m,mse,bic\n";
  for (const auto& e : sweep) {
    out += std::to_string(e.m);
    out += ',';
    out += fmt_double(e.train_mse);
    out += ',';
    out += fmt_double(e.bic);
    out += '\n';
  }
  return out;
}

SelectionResult select_order(ModelClass model_class, const std::vector<int>& m_grid,
                             const CleanDataset& data) {
  if (m_grid.empty()) throw DataError("select_order: empty order grid");
  for (std::size_t i = 1; i < m_grid.size(); ++i)
    if (m_grid[i] <= m_grid[i - 1])
      throw DataError("select_order: order grid must be strictly ascending");

  SelectionResult result;
  result.model_class = model_class;
  bool have_best = false;
  double best_bic = 0.0;
  for (int m : m_grid) {
    ModelSpec spec;
    spec.model_class = model_class;
    spec.m = m;
    FittedModel model;
    try {
      model = fit(spec, data);
    } catch (const Error& e) {
      result.failures.emplace_back(m, e.what());
      continue;
    }
    const double score = bic(model.n_params, model.n_train, model.train_mse);
    result.sweep.push_back({m, model.train_mse, score});
    if (!have_best || score < best_bic) {
      have_best = true;
      best_bic = score;
      result.chosen_m = m;
      result.chosen_model = model;
    }
  }
  if (!have_best) {
    std::string detail;
    for (const auto& [m, msg] : result.failures)
      detail += "\n  m=" + std::to_string(m) + ": " + msg;
    throw FitError("select_order: every order in the grid failed" + detail);
  }
  return result;
}

double delta(const FittedModel& model_a, const FittedModel& model_b,
             const CleanDataset& data) {
  if (data.records.empty()) throw DataError("delta: empty data");
  double gap = 0.0;
  for (const auto& r : data.records) {
    const double d = eval(model_a, *r.wind) - eval(model_b, *r.wind);
    gap += d * d;
  }
  gap /= static_cast<double>(data.records.size());
  const double denom = std::min(mse(model_a, data), mse(model_b, data));
  if (!(denom > 0.0)) throw DataError("delta: a model has zero MSE; the ratio is undefined");
  return gap / denom;
}

std::vector<int> default_m_grid(ModelClass model_class) {
  auto range = [](int lo, int hi) {
    std::vector<int> g(static_cast<std::size_t>(hi - lo + 1));
    std::iota(g.begin(), g.end(), lo);
    return g;
  };
  switch (model_class) {
    case ModelClass::PiecewiseLinear: return range(1, 30);
    case ModelClass::Polynomial: return range(1, 15);
    case ModelClass::BSpline: return range(4, 30);
    case ModelClass::Logistic5PL:
    case ModelClass::MStukel: return {1};
  }
  throw DataError("unknown model class");
}

}  // namespace wtpc
