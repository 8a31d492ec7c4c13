#include "wtpc/residual.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/io.hpp"
#include "wtpc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wtpc {

namespace {

struct BinAccum {
  std::size_t n = 0;
  double sum_sq = 0.0;
};

std::map<long long, BinAccum> accumulate_bins(const std::vector<double>& resid,
                                              const std::vector<double>& winds) {
  if (resid.empty()) throw DataError("empty residual series");
  if (resid.size() != winds.size())
    throw DataError("residual and wind series lengths differ");
  std::map<long long, BinAccum> bins;
  for (std::size_t i = 0; i < resid.size(); ++i) {
    auto& b = bins[to_tenths(winds[i])];
    ++b.n;
    b.sum_sq += resid[i] * resid[i];
  }
  return bins;
}

/// Fill σ for sparse bins by linear interpolation between flanking donors.
void interpolate_sparse(std::map<long long, double>& sigma,
                        const std::vector<long long>& donors,
                        const std::vector<long long>& sparse) {
  for (long long t : sparse) {
    auto up = std::lower_bound(donors.begin(), donors.end(), t);
    if (up == donors.begin()) {
      sigma[t] = sigma.at(donors.front());
    } else if (up == donors.end()) {
      sigma[t] = sigma.at(donors.back());
    } else {
      long long hi = *up;
      long long lo = *(up - 1);
      double frac = static_cast<double>(t - lo) / static_cast<double>(hi - lo);
      sigma[t] = sigma.at(lo) + frac * (sigma.at(hi) - sigma.at(lo));
    }
  }
}

/// Marsaglia's asymptotic CDF of the case-0 Anderson-Darling statistic.
double adinf(double z) {
  if (z <= 0.0) return 0.0;
  if (z < 2.0) {
    double poly = 2.00012 +
                  (0.247105 -
                   (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) *
                      z;
    return std::exp(-1.2337141 / z) / std::sqrt(z) * poly;
  }
  double inner = 1.0776 -
                 (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z;
  return std::exp(-std::exp(inner));
}

}  // namespace

double ad_pvalue(double a2) {
  if (a2 >= 2.0) {
    double inner =
        1.0776 -
        (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * a2) * a2) * a2) * a2) * a2;
    return -std::expm1(-std::exp(inner));
  }
  double p = 1.0 - adinf(a2);
  return std::clamp(p, 0.0, 1.0);
}

double ResidualProfile::sigma_at(double wind) const {
  if (sigma.empty()) throw DataError("empty residual profile");
  long long t = to_tenths(wind);
  auto up = sigma.lower_bound(t);
  if (up != sigma.end() && up->first == t) return up->second;
  if (up == sigma.begin()) return up->second;
  if (up == sigma.end()) return std::prev(up)->second;
  auto lo = std::prev(up);
  double frac = static_cast<double>(t - lo->first) /
                static_cast<double>(up->first - lo->first);
  return lo->second + frac * (up->second - lo->second);
}

std::vector<double> residuals(const EnhancedModel& model,
                              const std::vector<ScadaRecord>& records) {
  std::vector<double> r;
  r.reserve(records.size());
  for (const auto& rec : records) {
    if (!rec.wind || !rec.angle || !rec.temperature || !rec.power)
      throw DataError("incomplete record in residual computation");
    r.push_back(*rec.power - eval_enhanced(model, *rec.wind, *rec.angle, *rec.temperature));
  }
  return r;
}

ResidualProfile sigma_profile(const std::vector<double>& resid,
                              const std::vector<double>& winds) {
  auto bins = accumulate_bins(resid, winds);

  ResidualProfile profile;
  std::vector<long long> anchors;
  std::vector<long long> sparse;
  for (const auto& [t, b] : bins) {
    profile.counts[t] = b.n;
    profile.sigma[t] = std::sqrt(b.sum_sq / static_cast<double>(b.n));
    if (b.n >= 30)
      anchors.push_back(t);
    else
      sparse.push_back(t);
  }

  if (anchors.empty()) {
    // Degenerate corpus: fall back to any bin with at least two samples.
    std::vector<long long> donors;
    std::vector<long long> singles;
    for (const auto& [t, b] : bins)
      (b.n >= 2 ? donors : singles).push_back(t);
    if (!donors.empty()) interpolate_sparse(profile.sigma, donors, singles);
    return profile;
  }

  interpolate_sparse(profile.sigma, anchors, sparse);
  return profile;
}

std::vector<double> rescale(const std::vector<double>& resid,
                            const ResidualProfile& profile,
                            const std::vector<double>& winds) {
  if (resid.size() != winds.size())
    throw DataError("residual and wind series lengths differ");
  std::vector<double> out;
  out.reserve(resid.size());
  for (std::size_t i = 0; i < resid.size(); ++i) {
    long long t = to_tenths(winds[i]);
    auto it = profile.sigma.find(t);
    double s = it != profile.sigma.end() ? it->second : profile.sigma_at(winds[i]);
    if (s == 0.0)
      throw DataError("sigma_w is zero at wind " + fmt_double(from_tenths(t)));
    out.push_back(resid[i] / s);
  }
  return out;
}

AdResult anderson_darling(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 8)
    throw DataError("Anderson-Darling test needs at least 8 observations, got " +
                    std::to_string(n));
  std::vector<double> x = samples;
  for (double v : x)
    if (!std::isfinite(v)) throw DataError("non-finite value in Anderson-Darling sample");
  std::sort(x.begin(), x.end());

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = log_normal_cdf(x[i]);
    double hi = log_normal_cdf(-x[n - 1 - i]);
    sum += static_cast<double>(2 * i + 1) * (lo + hi);
  }
  AdResult res;
  res.a2 = -static_cast<double>(n) - sum / static_cast<double>(n);
  res.p = ad_pvalue(res.a2);
  return res;
}

std::pair<double, double> gaussian_band(const std::vector<double>& rescaled,
                                        const std::vector<double>& winds,
                                        double alpha,
                                        std::map<long long, double>* pvalues_out) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DataError("alpha must lie in (0, 1)");
  if (rescaled.size() != winds.size())
    throw DataError("residual and wind series lengths differ");
  if (rescaled.empty()) throw DataError("empty residual series");

  std::map<long long, std::vector<double>> bins;
  for (std::size_t i = 0; i < rescaled.size(); ++i)
    bins[to_tenths(winds[i])].push_back(rescaled[i]);

  std::map<long long, double> pvalues;
  for (const auto& [t, sample] : bins)
    if (sample.size() >= 8) pvalues[t] = anderson_darling(sample).p;
  if (pvalues_out) *pvalues_out = pvalues;

  long long best_start = 0;
  std::size_t best_len = 0;
  long long run_start = 0;
  long long prev = 0;
  std::size_t run_len = 0;
  for (const auto& [t, p] : pvalues) {
    bool pass = p >= alpha;
    if (pass && run_len > 0 && t == prev + 1) {
      ++run_len;
    } else if (pass) {
      run_start = t;
      run_len = 1;
    } else {
      run_len = 0;
    }
    if (run_len > best_len) {
      best_len = run_len;
      best_start = run_start;
    }
    prev = t;
  }
  if (best_len == 0)
    throw DataError("no Gaussian band at level " + fmt_double(alpha));
  long long best_end = best_start + static_cast<long long>(best_len) - 1;
  return {from_tenths(best_start), from_tenths(best_end)};
}

ResidualProfile build_profile(const EnhancedModel& model,
                              const std::vector<ScadaRecord>& records,
                              double alpha) {
  std::vector<double> winds;
  winds.reserve(records.size());
  for (const auto& rec : records) {
    if (!rec.wind) throw DataError("record without wind in residual profile");
    winds.push_back(*rec.wind);
  }
  auto r = residuals(model, records);
  ResidualProfile profile = sigma_profile(r, winds);
  profile.alpha = alpha;
  auto rp = rescale(r, profile, winds);
  auto band = gaussian_band(rp, winds, alpha, &profile.ad_pvalues);
  profile.g_lo = band.first;
  profile.g_hi = band.second;
  return profile;
}

std::string profile_to_csv(const ResidualProfile& profile) {
  std::string out = "wind,sigma,n,ad_p\n";
  for (const auto& [t, s] : profile.sigma) {
    out += fmt_double(from_tenths(t));
    out += ',';
    out += fmt_double(s);
    out += ',';
    auto nit = profile.counts.find(t);
    out += std::to_string(nit != profile.counts.end() ? nit->second : 0);
    out += ',';
    auto pit = profile.ad_pvalues.find(t);
    if (pit != profile.ad_pvalues.end()) out += fmt_double(pit->second);
    out += '\n';
  }
  return out;
}

nlohmann::json profile_to_json(const ResidualProfile& profile) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& [t, s] : profile.sigma) {
    nlohmann::json b;
    b["wind"] = from_tenths(t);
    b["sigma"] = s;
    auto nit = profile.counts.find(t);
    b["n"] = nit != profile.counts.end() ? nit->second : std::size_t{0};
    auto pit = profile.ad_pvalues.find(t);
    if (pit != profile.ad_pvalues.end())
      b["ad_p"] = pit->second;
    else
      b["ad_p"] = nullptr;
    bins.push_back(std::move(b));
  }
  return nlohmann::json{{"alpha", profile.alpha},
                        {"g_lo", profile.g_lo},
                        {"g_hi", profile.g_hi},
                        {"bins", std::move(bins)}};
}

ResidualProfile profile_from_json(const nlohmann::json& j) {
  ResidualProfile profile;
  try {
    profile.alpha = j.at("alpha").get<double>();
    profile.g_lo = j.at("g_lo").get<double>();
    profile.g_hi = j.at("g_hi").get<double>();
    for (const auto& b : j.at("bins")) {
      long long t = to_tenths(b.at("wind").get<double>());
      double s = b.at("sigma").get<double>();
      if (!(s >= 0.0) || !std::isfinite(s))
        throw ArtifactError("residual profile has negative or non-finite sigma");
      profile.sigma[t] = s;
      profile.counts[t] = b.at("n").get<std::size_t>();
      if (b.contains("ad_p") && !b.at("ad_p").is_null())
        profile.ad_pvalues[t] = b.at("ad_p").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(std::string("malformed residual profile: ") + e.what());
  }
  if (profile.sigma.empty()) throw ArtifactError("residual profile has no bins");
  return profile;
}

}  // namespace wtpc
