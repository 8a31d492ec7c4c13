#include "wtpc/arma.hpp"
#include "wtpc/environmental.hpp"
#include "wtpc/errors.hpp"
#include "wtpc/estimation.hpp"
#include "wtpc/evaluation.hpp"
#include "wtpc/io.hpp"
#include "wtpc/power_curve.hpp"
#include "wtpc/residual.hpp"
#include "wtpc/scada.hpp"
#include "wtpc/selection.hpp"
#include "wtpc/stats.hpp"
#include "wtpc/synthetic.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitArtifact = 66;
constexpr int kExitFit = 70;
constexpr int kExitIo = 74;

void print_error(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

/// "--schema wind=ws,power=p,delimiter=;" overrides the canonical column names.
wtpc::ScadaSchema parse_schema(const std::string& text) {
  wtpc::ScadaSchema schema;
  if (text.empty()) return schema;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    pos = end + 1;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw wtpc::DataError("schema items must look like column=header, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "timestamp") schema.timestamp = value;
    else if (key == "wind") schema.wind = value;
    else if (key == "angle") schema.angle = value;
    else if (key == "temperature") schema.temperature = value;
    else if (key == "power") schema.power = value;
    else if (key == "state") schema.state = value;
    else if (key == "delimiter") {
      if (value.size() != 1) throw wtpc::DataError("delimiter must be one character");
      schema.delimiter = value[0];
    } else {
      throw wtpc::DataError("unknown schema key '" + key + "'");
    }
  }
  return schema;
}

/// "4..30", "1,2,5" or a single integer.
std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> grid;
  const std::size_t dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) throw wtpc::DataError("grid range is reversed: '" + text + "'");
    for (int m = lo; m <= hi; ++m) grid.push_back(m);
    return grid;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    grid.push_back(std::stoi(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  if (grid.empty()) throw wtpc::DataError("empty order grid '" + text + "'");
  return grid;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    out.push_back(std::stod(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

struct Options {
  std::string data;
  std::string schema;
  std::string out = "out";
  std::string model_class = "spline";
  std::string grid;
  std::string mode = "both";
  double alpha = 0.05;
  std::size_t q1 = 1;
  std::size_t q2 = 1;
  std::string horizons = "10,50,100,1000,10000";
  double level = 0.95;
  std::uint64_t seed = 1;
  double iqr_k = 3.0;

  // simulate-only knobs
  std::size_t n = 10000;
  std::string curve = "sigmoid";
  double c_phi_true = 0.0;
  double c_t_true = 0.0;
  double t_bar = 12.0;
  double sigma_band_lo = 5.0;
  double sigma_band_hi = 14.0;
  double sigma_base = 5.0;
  double sigma_amp = 15.0;
  double sigma_outside = 5.0;
  std::string arma_a = "0.5";
  std::string arma_c = "";
  double sigma_eps2 = 1.0;
  double truncate_z = 0.0;
  double wind_scale = 8.5;
  double wind_log_sd = 0.30;
  double wind_ar = 0.97;
  double wind_min = 0.3;
  double wind_max = 24.9;
  double angle_sd = 5.0;
  std::size_t inject_na = 0;
  std::size_t inject_incomplete = 0;
  std::size_t inject_nno = 0;
  std::size_t inject_outliers = 0;
  double outlier_power = 6000.0;
  bool seasons = false;
};

wtpc::CleanDataset load_clean(const Options& opt) {
  if (opt.data.empty()) throw wtpc::DataError("--data is required");
  const auto records = wtpc::parse_scada(opt.data, parse_schema(opt.schema));
  return wtpc::clean(records, opt.iqr_k);
}

std::string artifact(const Options& opt, const std::string& name) {
  return opt.out + "/" + name;
}

wtpc::FittedModel load_base_model(const Options& opt) {
  return wtpc::model_from_json(wtpc::load_json(artifact(opt, "model.json")));
}

wtpc::EnhancedModel load_enhanced(const Options& opt) {
  const auto j = wtpc::load_json(artifact(opt, "enhanced.json"));
  const std::string base_ref = wtpc::enhanced_base_ref(j);
  auto base = wtpc::model_from_json(wtpc::load_json(artifact(opt, base_ref)));
  return wtpc::enhanced_from_json(j, std::move(base));
}

wtpc::DynamicModel load_dynamic(const Options& opt) {
  const auto j = wtpc::load_json(artifact(opt, "dynamic.json"));
  wtpc::DynamicModel model;
  try {
    const std::string profile_ref = j.at("profile_ref").get<std::string>();
    const std::string arma_ref = j.at("arma_ref").get<std::string>();
    model.profile = wtpc::profile_from_json(wtpc::load_json(artifact(opt, profile_ref)));
    model.arma = wtpc::arma_from_json(wtpc::load_json(artifact(opt, arma_ref)));
    model.sigma_e2 = j.at("sigma_e2").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw wtpc::ArtifactError(std::string("malformed dynamic model: ") + e.what());
  }
  model.enhanced = load_enhanced(opt);
  return model;
}

int default_order(wtpc::ModelClass cls) {
  switch (cls) {
    case wtpc::ModelClass::PiecewiseLinear: return 13;
    case wtpc::ModelClass::Polynomial: return 14;
    case wtpc::ModelClass::BSpline: return 17;
    default: return 1;
  }
}

void run_clean(const Options& opt) {
  const auto data = load_clean(opt);
  wtpc::write_text_file(artifact(opt, "cleaned.csv"), wtpc::render_scada_csv(data.records));
  wtpc::save_json(artifact(opt, "cleaning_report.json"),
                  wtpc::cleaning_report_json(data.report));
  std::cout << "retained " << data.report.retained << " of " << data.report.raw << " rows ("
            << wtpc::fmt_double(data.report.proportion()) << ")\n";
}

void run_fit(const Options& opt) {
  const auto data = load_clean(opt);
  wtpc::ModelSpec spec;
  spec.model_class = wtpc::class_from_name(opt.model_class);
  spec.m = opt.grid.empty() ? default_order(spec.model_class) : parse_grid(opt.grid).at(0);
  const auto model = wtpc::fit(spec, data);
  wtpc::save_json(artifact(opt, "model.json"), wtpc::model_to_json(model));
  std::cout << "class=" << wtpc::class_name(spec.model_class) << " m=" << spec.m
            << " train_mse=" << wtpc::fmt_double(model.train_mse)
            << " n_params=" << model.n_params << "\n";
}

void run_select(const Options& opt) {
  const auto data = load_clean(opt);
  const auto cls = wtpc::class_from_name(opt.model_class);
  const auto grid = opt.grid.empty() ? wtpc::default_m_grid(cls) : parse_grid(opt.grid);
  const auto result = wtpc::select_order(cls, grid, data);
  wtpc::write_text_file(artifact(opt, "sweep.csv"), result.sweep_csv());
  wtpc::save_json(artifact(opt, "model.json"), wtpc::model_to_json(result.chosen_model));
  nlohmann::json sel;
  sel["class"] = wtpc::class_name(cls);
  sel["chosen_m"] = result.chosen_m;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& [m, msg] : result.failures)
    failures.push_back({{"m", m}, {"error", msg}});
  sel["failures"] = std::move(failures);
  wtpc::save_json(artifact(opt, "selection.json"), sel);
  std::cout << "chosen m=" << result.chosen_m << " train_mse="
            << wtpc::fmt_double(result.chosen_model.train_mse) << "\n";
}

void run_enhance(const Options& opt) {
  const auto data = load_clean(opt);
  const auto base = load_base_model(opt);
  const auto mode = wtpc::environmental_mode_from_name(opt.mode);
  const auto fit = wtpc::fit_environmental(base, data, mode);
  auto j = wtpc::enhanced_to_json(fit.model, "model.json");
  j["train_mse"] = fit.train_mse;
  j["c_phi_at_boundary"] = fit.c_phi_at_boundary;
  wtpc::save_json(artifact(opt, "enhanced.json"), j);
  std::cout << "c_phi=" << wtpc::fmt_double(fit.model.c_phi)
            << " c_T=" << wtpc::fmt_double(fit.model.c_T)
            << " train_mse=" << wtpc::fmt_double(fit.train_mse)
            << " boundary=" << (fit.c_phi_at_boundary ? 1 : 0) << "\n";
}

void run_residuals(const Options& opt) {
  const auto data = load_clean(opt);
  const auto enhanced = load_enhanced(opt);
  const auto profile = wtpc::build_profile(enhanced, data.records, opt.alpha);
  wtpc::save_json(artifact(opt, "residual_profile.json"), wtpc::profile_to_json(profile));
  wtpc::write_text_file(artifact(opt, "residual_profile.csv"), wtpc::profile_to_csv(profile));
  std::cout << "band=[" << wtpc::fmt_double(profile.g_lo) << ", "
            << wtpc::fmt_double(profile.g_hi) << "] alpha=" << wtpc::fmt_double(profile.alpha)
            << "\n";
}

void run_arma(const Options& opt) {
  const auto data = load_clean(opt);
  const auto enhanced = load_enhanced(opt);
  const auto profile =
      wtpc::profile_from_json(wtpc::load_json(artifact(opt, "residual_profile.json")));
  const auto dynamic = wtpc::fit_dynamic(enhanced, profile, data.records, opt.q1, opt.q2);
  wtpc::save_json(artifact(opt, "arma.json"), wtpc::arma_to_json(dynamic.arma));
  nlohmann::json j{{"enhanced_ref", "enhanced.json"},
                   {"profile_ref", "residual_profile.json"},
                   {"arma_ref", "arma.json"},
                   {"sigma_e2", dynamic.sigma_e2}};
  wtpc::save_json(artifact(opt, "dynamic.json"), j);
  std::cout << "q1=" << dynamic.arma.q1 << " q2=" << dynamic.arma.q2
            << " mu=" << wtpc::fmt_double(dynamic.arma.mu)
            << " sigma_eps2=" << wtpc::fmt_double(dynamic.arma.sigma_eps2)
            << " sigma_e2=" << wtpc::fmt_double(dynamic.sigma_e2) << "\n";
}

void run_forecast(const Options& opt) {
  if (opt.data.empty()) throw wtpc::DataError("--data is required");
  const auto model = load_dynamic(opt);
  const auto history_rows = wtpc::parse_scada(artifact(opt, "cleaned.csv"), {});
  const auto history = wtpc::clean(history_rows, opt.iqr_k);

  const auto future_rows = wtpc::parse_scada(opt.data, parse_schema(opt.schema));
  std::vector<wtpc::ExogPoint> future;
  future.reserve(future_rows.size());
  for (const auto& r : future_rows) {
    if (!r.wind || !r.angle || !r.temperature)
      throw wtpc::DataError("future exogenous rows need wind, angle and temperature");
    future.push_back({*r.wind, *r.angle, *r.temperature});
  }
  const auto forecasts = wtpc::predict_power(model, history.records, future);

  std::int64_t next_stamp = 0;
  bool have_stamp = !history.records.empty() && history.records.back().timestamp.has_value();
  if (have_stamp) next_stamp = *history.records.back().timestamp + 10;
  const double z = wtpc::normal_quantile(0.5 * (1.0 + opt.level));
  std::string csv = "timestamp,p_hat,var,lo95,hi95\n";
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    if (future_rows[i].timestamp)
      csv += wtpc::format_timestamp_minutes(*future_rows[i].timestamp);
    else if (have_stamp)
      csv += wtpc::format_timestamp_minutes(next_stamp + static_cast<std::int64_t>(i) * 10);
    else
      csv += std::to_string(i + 1);
    const double half = z * std::sqrt(forecasts[i].variance);
    csv += ',';
    csv += wtpc::fmt_double(forecasts[i].mean);
    csv += ',';
    csv += wtpc::fmt_double(forecasts[i].variance);
    csv += ',';
    csv += wtpc::fmt_double(forecasts[i].mean - half);
    csv += ',';
    csv += wtpc::fmt_double(forecasts[i].mean + half);
    csv += '\n';
  }
  wtpc::write_text_file(artifact(opt, "forecast.csv"), csv);
  std::cout << "wrote " << forecasts.size() << " forecasts\n";
}

void run_evaluate(const Options& opt) {
  const auto validation = load_clean(opt);
  const auto model = load_dynamic(opt);
  const auto base = load_base_model(opt);

  const auto training_rows = wtpc::parse_scada(artifact(opt, "cleaned.csv"), {});
  const auto training = wtpc::clean(training_rows, opt.iqr_k);

  wtpc::HorizonReport report;
  report.horizons = parse_double_list(opt.horizons);
  if (report.horizons.empty()) throw wtpc::DataError("--horizons must list at least one value");
  report.static_mse = wtpc::mse(base, validation);
  report.enhanced_mse = wtpc::mse(model.enhanced, validation);
  wtpc::HorizonReport::DynamicSweep sweep;
  sweep.q1 = model.arma.q1;
  sweep.q2 = model.arma.q2;
  for (double h : report.horizons)
    sweep.mse.push_back(wtpc::mse_at_horizon(model, validation, h));
  report.dynamic.push_back(std::move(sweep));
  report.level = opt.level;
  report.coverage = wtpc::coverage_audit(model, validation, opt.level, training.records);
  report.bins = wtpc::binned_means(validation);
  wtpc::emit_report(report, artifact(opt, "report"));
  std::cout << "coverage=" << wtpc::fmt_double(report.coverage)
            << " static_mse=" << wtpc::fmt_double(report.static_mse)
            << " enhanced_mse=" << wtpc::fmt_double(report.enhanced_mse) << "\n";
}

void run_simulate(const Options& opt) {
  wtpc::GeneratorConfig config;
  config.seed = opt.seed;
  config.n_samples = opt.n;
  if (opt.curve == "sigmoid") config.true_curve = wtpc::sigmoid_truth_preset();
  else if (opt.curve == "quartic") config.true_curve = wtpc::quartic_truth_preset();
  else throw wtpc::DataError("unknown curve preset '" + opt.curve + "'");
  config.c_phi_true = opt.c_phi_true;
  config.c_T_true = opt.c_t_true;
  config.t_bar = opt.t_bar;
  config.sigma_band_lo = opt.sigma_band_lo;
  config.sigma_band_hi = opt.sigma_band_hi;
  config.sigma_base = opt.sigma_base;
  config.sigma_amp = opt.sigma_amp;
  config.sigma_outside = opt.sigma_outside;
  const auto a = opt.arma_a.empty() ? std::vector<double>{} : parse_double_list(opt.arma_a);
  const auto c = opt.arma_c.empty() ? std::vector<double>{} : parse_double_list(opt.arma_c);
  config.arma_true = {a.size(), c.size(), a, c, 0.0, opt.sigma_eps2};
  config.truncate_noise_z = opt.truncate_z;
  config.wind_log_mean_of = opt.wind_scale;
  config.wind_log_sd = opt.wind_log_sd;
  config.wind_ar = opt.wind_ar;
  config.wind_min = opt.wind_min;
  config.wind_max = opt.wind_max;
  config.angle_sd = opt.angle_sd;
  config.inject_na = opt.inject_na;
  config.inject_incomplete = opt.inject_incomplete;
  config.inject_nno = opt.inject_nno;
  config.inject_outliers = opt.inject_outliers;
  config.outlier_power = opt.outlier_power;

  if (opt.seasons) {
    const auto pair = wtpc::generate_seasons(config);
    wtpc::write_text_file(artifact(opt, "data.csv"),
                          wtpc::render_scada_csv(pair.train.records));
    wtpc::write_text_file(artifact(opt, "validation.csv"),
                          wtpc::render_scada_csv(pair.validation.records));
    wtpc::save_json(artifact(opt, "truth.json"), wtpc::truth_to_json(pair.train.truth));
    std::cout << "wrote " << pair.train.records.size() << " training and "
              << pair.validation.records.size() << " validation rows\n";
    return;
  }
  const auto data = wtpc::generate(config);
  wtpc::write_text_file(artifact(opt, "data.csv"), wtpc::render_scada_csv(data.records));
  wtpc::save_json(artifact(opt, "truth.json"), wtpc::truth_to_json(data.truth));
  std::cout << "wrote " << data.records.size() << " rows\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind turbine power curve modeling and forecasting pipeline"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes:\n"
      "  0   success\n"
      "  64  usage error (bad flags or arguments)\n"
      "  65  malformed input data (parse, schema or precondition failure)\n"
      "  66  missing or invalid prerequisite artifact\n"
      "  70  estimation failure (nonconvergence, rank deficiency)\n"
      "  74  output could not be written\n"
      "Errors are reported as one JSON object per line on stderr.\n"
      "\n"
      "Artifacts live in --out and are referenced by fixed names: cleaned.csv,\n"
      "model.json, enhanced.json, residual_profile.json, arma.json, dynamic.json.\n"
      "A config file holds flag=value lines grouped in [subcommand] sections.");
  app.fallthrough();
  app.set_config("--config", "",
                 "Config file with [subcommand] sections; flags win on conflict");

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Artifact directory")->capture_default_str();
    return sub;
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", opt.data, "Input delimited text file");
    sub->add_option("--schema", opt.schema,
                    "Column overrides, e.g. wind=WS,power=P,delimiter=;");
    return sub;
  };

  auto* cmd_clean = add_data(add_common(app.add_subcommand(
      "clean", "Parse and clean a SCADA file; writes cleaned.csv and cleaning_report.json")));
  cmd_clean->add_option("--iqr-k", opt.iqr_k, "Whisker multiplier for the outlier rule")
      ->capture_default_str();

  auto* cmd_fit = add_data(add_common(
      app.add_subcommand("fit", "Fit one power-curve model; writes model.json")));
  cmd_fit->add_option("--class", opt.model_class,
                      "5pl | mstukel | piecewise | polynomial | spline")
      ->capture_default_str();
  cmd_fit->add_option("--grid", opt.grid, "Model order (single integer)");

  auto* cmd_select = add_data(add_common(app.add_subcommand(
      "select", "Sweep orders by BIC; writes sweep.csv, selection.json, model.json")));
  cmd_select->add_option("--class", opt.model_class,
                         "piecewise | polynomial | spline (logistic classes have no order)")
      ->capture_default_str();
  cmd_select->add_option("--grid", opt.grid, "Orders: 4..30 or comma list (default per class)");

  auto* cmd_enhance = add_data(add_common(app.add_subcommand(
      "enhance", "Add angle/temperature factors to model.json; writes enhanced.json")));
  cmd_enhance->add_option("--mode", opt.mode, "angle | temp | both")->capture_default_str();

  auto* cmd_residuals = add_data(add_common(app.add_subcommand(
      "residuals",
      "Wind-conditional residual scale and Gaussian band; writes residual_profile.*")));
  cmd_residuals->add_option("--alpha", opt.alpha, "Normality-test significance level")
      ->capture_default_str();

  auto* cmd_arma = add_data(add_common(app.add_subcommand(
      "arma", "Fit the dynamic layer on glued residuals; writes arma.json and dynamic.json")));
  cmd_arma->add_option("--q1", opt.q1, "AR order")->capture_default_str();
  cmd_arma->add_option("--q2", opt.q2, "MA order")->capture_default_str();

  auto* cmd_forecast = add_data(add_common(app.add_subcommand(
      "forecast",
      "Forecast power for a future exogenous series (--data); writes forecast.csv")));
  cmd_forecast->add_option("--level", opt.level, "Confidence level for the band")
      ->capture_default_str();

  auto* cmd_evaluate = add_data(add_common(app.add_subcommand(
      "evaluate", "Horizon MSE sweep and coverage on validation data; writes report/")));
  cmd_evaluate->add_option("--horizons", opt.horizons, "Comma list of minutes")
      ->capture_default_str();
  cmd_evaluate->add_option("--level", opt.level, "Confidence level")->capture_default_str();

  auto* cmd_simulate = add_common(app.add_subcommand(
      "simulate", "Generate a synthetic corpus with ground truth; writes data.csv, truth.json"));
  cmd_simulate->add_option("--seed", opt.seed, "Generator seed")->capture_default_str();
  cmd_simulate->add_option("--n", opt.n, "Number of 10-minute samples")->capture_default_str();
  cmd_simulate->add_option("--curve", opt.curve, "Truth preset: sigmoid | quartic")
      ->capture_default_str();
  cmd_simulate->add_option("--c-phi-true", opt.c_phi_true, "True angle exponent")
      ->capture_default_str();
  cmd_simulate->add_option("--c-t-true", opt.c_t_true, "True temperature coefficient")
      ->capture_default_str();
  cmd_simulate->add_option("--t-bar", opt.t_bar, "Reference temperature")->capture_default_str();
  cmd_simulate->add_option("--sigma-band-lo", opt.sigma_band_lo, "Noise bump lower edge")
      ->capture_default_str();
  cmd_simulate->add_option("--sigma-band-hi", opt.sigma_band_hi, "Noise bump upper edge")
      ->capture_default_str();
  cmd_simulate->add_option("--sigma-base", opt.sigma_base, "Noise scale at the bump edges")
      ->capture_default_str();
  cmd_simulate->add_option("--sigma-amp", opt.sigma_amp, "Noise bump amplitude")
      ->capture_default_str();
  cmd_simulate->add_option("--sigma-outside", opt.sigma_outside, "Noise scale outside the bump")
      ->capture_default_str();
  cmd_simulate->add_option("--arma-a", opt.arma_a, "AR coefficients, comma list (empty: none)")
      ->capture_default_str();
  cmd_simulate->add_option("--arma-c", opt.arma_c, "MA coefficients, comma list")
      ->capture_default_str();
  cmd_simulate->add_option("--sigma-eps2", opt.sigma_eps2, "Innovation variance")
      ->capture_default_str();
  cmd_simulate->add_option("--truncate-z", opt.truncate_z,
                           "Reject innovations beyond this many sigmas (0: off)")
      ->capture_default_str();
  cmd_simulate->add_option("--wind-scale", opt.wind_scale, "Median wind speed")
      ->capture_default_str();
  cmd_simulate->add_option("--wind-log-sd", opt.wind_log_sd, "Log-wind standard deviation")
      ->capture_default_str();
  cmd_simulate->add_option("--wind-ar", opt.wind_ar, "Log-wind AR(1) coefficient")
      ->capture_default_str();
  cmd_simulate->add_option("--wind-min", opt.wind_min, "Wind clip floor")->capture_default_str();
  cmd_simulate->add_option("--wind-max", opt.wind_max, "Wind clip ceiling")
      ->capture_default_str();
  cmd_simulate->add_option("--angle-sd", opt.angle_sd, "Angle noise sd in degrees")
      ->capture_default_str();
  cmd_simulate->add_option("--inject-na", opt.inject_na, "Rows to delete (missing slots)")
      ->capture_default_str();
  cmd_simulate->add_option("--inject-incomplete", opt.inject_incomplete,
                           "Rows with one field blanked")
      ->capture_default_str();
  cmd_simulate->add_option("--inject-nno", opt.inject_nno, "Rows flagged not-normal")
      ->capture_default_str();
  cmd_simulate->add_option("--inject-outliers", opt.inject_outliers, "Rows with absurd power")
      ->capture_default_str();
  cmd_simulate->add_option("--outlier-power", opt.outlier_power, "Injected outlier power value")
      ->capture_default_str();
  cmd_simulate->add_flag("--seasons", opt.seasons,
                         "Also write an independent validation season");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitUsage;
  }

  try {
    if (cmd_clean->parsed()) run_clean(opt);
    else if (cmd_fit->parsed()) run_fit(opt);
    else if (cmd_select->parsed()) run_select(opt);
    else if (cmd_enhance->parsed()) run_enhance(opt);
    else if (cmd_residuals->parsed()) run_residuals(opt);
    else if (cmd_arma->parsed()) run_arma(opt);
    else if (cmd_forecast->parsed()) run_forecast(opt);
    else if (cmd_evaluate->parsed()) run_evaluate(opt);
    else if (cmd_simulate->parsed()) run_simulate(opt);
  } catch (const wtpc::ParseError& e) {
    print_error("parse", e.what());
    return kExitData;
  } catch (const wtpc::SchemaError& e) {
    print_error("schema", e.what());
    return kExitData;
  } catch (const wtpc::DataError& e) {
    print_error("data", e.what());
    return kExitData;
  } catch (const wtpc::ArtifactError& e) {
    print_error("artifact", e.what());
    return kExitArtifact;
  } catch (const wtpc::FitError& e) {
    print_error("fit", e.what());
    return kExitFit;
  } catch (const wtpc::IoError& e) {
    print_error("io", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitFit;
  }
  return 0;
}
