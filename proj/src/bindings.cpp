#include "wtpc/arma.hpp"
#include "wtpc/environmental.hpp"
#include "wtpc/errors.hpp"
#include "wtpc/evaluation.hpp"
#include "wtpc/io.hpp"
#include "wtpc/power_curve.hpp"
#include "wtpc/residual.hpp"
#include "wtpc/scada.hpp"
#include "wtpc/selection.hpp"
#include "wtpc/synthetic.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

namespace py = pybind11;

namespace {

std::vector<wtpc::ExogPoint> zip_exog(const std::vector<double>& wind,
                                      const std::vector<double>& angle,
                                      const std::vector<double>& temperature) {
  if (wind.size() != angle.size() || wind.size() != temperature.size())
    throw wtpc::DataError("wind, angle and temperature must have equal length");
  std::vector<wtpc::ExogPoint> out(wind.size());
  for (std::size_t i = 0; i < wind.size(); ++i)
    out[i] = {wind[i], angle[i], temperature[i]};
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wind turbine power curve modeling and forecasting";

  py::register_exception<wtpc::Error>(m, "WtpcError");

  py::class_<wtpc::CleanDataset>(m, "CleanDataset")
      .def("__len__", [](const wtpc::CleanDataset& d) { return d.records.size(); })
      .def_property_readonly("report",
                             [](const wtpc::CleanDataset& d) {
                               py::dict r;
                               r["raw"] = d.report.raw;
                               r["na"] = d.report.na;
                               r["incomplete"] = d.report.incomplete;
                               r["nno"] = d.report.nno;
                               r["outliers"] = d.report.outliers;
                               r["retained"] = d.report.retained;
                               return r;
                             })
      .def("winds",
           [](const wtpc::CleanDataset& d) {
             std::vector<double> w;
             w.reserve(d.records.size());
             for (const auto& r : d.records) w.push_back(*r.wind);
             return w;
           })
      .def("powers", [](const wtpc::CleanDataset& d) {
        std::vector<double> p;
        p.reserve(d.records.size());
        for (const auto& r : d.records) p.push_back(*r.power);
        return p;
      });

  py::class_<wtpc::FittedModel>(m, "FittedModel")
      .def_readonly("train_mse", &wtpc::FittedModel::train_mse)
      .def_readonly("n_params", &wtpc::FittedModel::n_params)
      .def("predict", [](const wtpc::FittedModel& f, double w) { return wtpc::eval(f, w); })
      .def("to_json", [](const wtpc::FittedModel& f) { return wtpc::model_to_json(f).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return wtpc::model_from_json(nlohmann::json::parse(text));
      });

  py::class_<wtpc::EnhancedModel>(m, "EnhancedModel")
      .def_readonly("c_phi", &wtpc::EnhancedModel::c_phi)
      .def_readonly("c_T", &wtpc::EnhancedModel::c_T)
      .def_readonly("t_bar", &wtpc::EnhancedModel::t_bar)
      .def("predict", [](const wtpc::EnhancedModel& f, double w, double phi, double T) {
        return wtpc::eval_enhanced(f, w, phi, T);
      });

  py::class_<wtpc::ResidualProfile>(m, "ResidualProfile")
      .def_readonly("g_lo", &wtpc::ResidualProfile::g_lo)
      .def_readonly("g_hi", &wtpc::ResidualProfile::g_hi)
      .def_readonly("alpha", &wtpc::ResidualProfile::alpha)
      .def("sigma_at", &wtpc::ResidualProfile::sigma_at)
      .def("in_band", &wtpc::ResidualProfile::in_band);

  py::class_<wtpc::DynamicModel>(m, "DynamicModel")
      .def_property_readonly("a",
                             [](const wtpc::DynamicModel& d) { return d.arma.a; })
      .def_property_readonly("c",
                             [](const wtpc::DynamicModel& d) { return d.arma.c; })
      .def_property_readonly("mu", [](const wtpc::DynamicModel& d) { return d.arma.mu; })
      .def_property_readonly(
          "sigma_eps2", [](const wtpc::DynamicModel& d) { return d.arma.sigma_eps2; })
      .def_readonly("sigma_e2", &wtpc::DynamicModel::sigma_e2);

  m.def(
      "load_scada",
      [](const std::string& path, double iqr_k) {
        return wtpc::clean(wtpc::parse_scada(path, {}), iqr_k);
      },
      py::arg("path"), py::arg("iqr_k") = 3.0,
      "Parse a SCADA CSV with the canonical header and apply the cleaning rules");

  m.def(
      "fit",
      [](const wtpc::CleanDataset& data, const std::string& model_class, int order) {
        wtpc::ModelSpec spec;
        spec.model_class = wtpc::class_from_name(model_class);
        spec.m = order;
        return wtpc::fit(spec, data);
      },
      py::arg("data"), py::arg("model_class") = "spline", py::arg("m") = 17);

  m.def(
      "select",
      [](const wtpc::CleanDataset& data, const std::string& model_class,
         std::vector<int> grid) {
        const auto cls = wtpc::class_from_name(model_class);
        if (grid.empty()) grid = wtpc::default_m_grid(cls);
        auto result = wtpc::select_order(cls, grid, data);
        py::list sweep;
        for (const auto& e : result.sweep)
          sweep.append(py::make_tuple(e.m, e.train_mse, e.bic));
        return py::make_tuple(std::move(result.chosen_model), result.chosen_m, sweep);
      },
      py::arg("data"), py::arg("model_class") = "spline",
      py::arg("grid") = std::vector<int>{},
      "BIC sweep; returns (model, chosen_m, [(m, mse, bic), ...])");

  m.def(
      "enhance",
      [](const wtpc::FittedModel& base, const wtpc::CleanDataset& data,
         const std::string& mode) {
        return wtpc::fit_environmental(base, data,
                                       wtpc::environmental_mode_from_name(mode))
            .model;
      },
      py::arg("base"), py::arg("data"), py::arg("mode") = "both");

  m.def(
      "build_profile",
      [](const wtpc::EnhancedModel& model, const wtpc::CleanDataset& data, double alpha) {
        return wtpc::build_profile(model, data.records, alpha);
      },
      py::arg("model"), py::arg("data"), py::arg("alpha") = 0.05);

  m.def(
      "fit_dynamic",
      [](const wtpc::EnhancedModel& enhanced, const wtpc::ResidualProfile& profile,
         const wtpc::CleanDataset& data, std::size_t q1, std::size_t q2) {
        return wtpc::fit_dynamic(enhanced, profile, data.records, q1, q2);
      },
      py::arg("enhanced"), py::arg("profile"), py::arg("data"), py::arg("q1") = 1,
      py::arg("q2") = 1);

  m.def(
      "predict_power",
      [](const wtpc::DynamicModel& model, const wtpc::CleanDataset& history,
         const std::vector<double>& wind, const std::vector<double>& angle,
         const std::vector<double>& temperature) {
        const auto forecasts =
            wtpc::predict_power(model, history.records, zip_exog(wind, angle, temperature));
        py::list out;
        for (const auto& f : forecasts) out.append(py::make_tuple(f.mean, f.variance));
        return out;
      },
      py::arg("model"), py::arg("history"), py::arg("wind"), py::arg("angle"),
      py::arg("temperature"), "Returns [(mean, variance), ...] for the future points");

  m.def("mse",
        py::overload_cast<const wtpc::FittedModel&, const wtpc::CleanDataset&>(&wtpc::mse),
        py::arg("model"), py::arg("data"));
  m.def("mse",
        py::overload_cast<const wtpc::EnhancedModel&, const wtpc::CleanDataset&>(&wtpc::mse),
        py::arg("model"), py::arg("data"));
  m.def("mse_at_horizon", &wtpc::mse_at_horizon, py::arg("model"), py::arg("validation"),
        py::arg("h_minutes"), py::arg("delta_minutes") = 10.0);
  m.def(
      "coverage_audit",
      [](const wtpc::DynamicModel& model, const wtpc::CleanDataset& validation, double level,
         const wtpc::CleanDataset* history) {
        return wtpc::coverage_audit(model, validation, level,
                                    history ? history->records
                                            : std::vector<wtpc::ScadaRecord>{});
      },
      py::arg("model"), py::arg("validation"), py::arg("level") = 0.95,
      py::arg("history") = nullptr);

  m.def(
      "simulate",
      [](std::uint64_t seed, std::size_t n, const std::string& curve) {
        wtpc::GeneratorConfig config;
        config.seed = seed;
        config.n_samples = n;
        if (curve == "quartic") config.true_curve = wtpc::quartic_truth_preset();
        const auto data = wtpc::generate(config);
        return py::make_tuple(wtpc::wrap_clean(data.records),
                              wtpc::truth_to_json(data.truth).dump());
      },
      py::arg("seed") = 1, py::arg("n") = 10000, py::arg("curve") = "sigmoid",
      "Synthetic season; returns (dataset, truth_json)");
}
