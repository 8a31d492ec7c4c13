#include "wtpc/estimation.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/io.hpp"

#include <map>
#include <sstream>

namespace wtpc {

BinnedStats binned_means(const CleanDataset& data) {
    if (data.records.empty()) throw DataError("binned_means: empty data");
    std::map<long long, std::vector<double>> groups;
    for (const auto& r : data.records) {
        groups[to_tenths(*r.wind)].push_back(*r.power);
    }
    BinnedStats stats;
    stats.total = static_cast<long long>(data.records.size());
    for (const auto& [w, powers] : groups) {
        BinnedStats::Bin bin;
        bin.wind_tenths = w;
        bin.count = static_cast<long long>(powers.size());
        double s = 0.0;
        for (double p : powers) s += p;
        bin.mean = s / static_cast<double>(powers.size());
        for (double p : powers) bin.ss += (p - bin.mean) * (p - bin.mean);
        stats.bins.push_back(bin);
    }
    return stats;
}

std::string BinnedStats::to_csv() const {
    std::ostringstream out;
    out << "wind,count,mean,std\n";
    for (const auto& b : bins) {
        const double sd = b.count > 0 ? std::sqrt(b.ss / static_cast<double>(b.count)) : 0.0;
        out << fmt_double(from_tenths(b.wind_tenths)) << ',' << b.count << ','
            << fmt_double(b.mean) << ',' << fmt_double(sd) << '\n';
    }
    return out.str();
}

double mse_lower_bound(const CleanDataset& data) {
    const BinnedStats stats = binned_means(data);
    double ss = 0.0;
    for (const auto& b : stats.bins) ss += b.ss;
    return ss / static_cast<double>(stats.total);
}

double mean_squared_error(const std::vector<double>& observed,
                          const std::vector<double>& predicted) {
    if (observed.empty() || observed.size() != predicted.size()) {
        throw DataError("mean_squared_error: empty or mismatched series");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = observed[i] - predicted[i];
        s += d * d;
    }
    return s / static_cast<double>(observed.size());
}

LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& target,
                                       Eigen::Index saturation_rank,
                                       const std::string& context) {
    if (design.rows() != target.size() || design.rows() == 0) {
        throw DataError("solve_least_squares: empty or mismatched design");
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    const Eigen::Index rank = cod.rank();
    // Quantization can cap the reachable rank at the number of distinct
    // regressor values; only deficiency beyond that cap is a real failure.
    if (rank < design.cols() && rank < std::min(saturation_rank, design.cols())) {
        throw FitError("rank-deficient design matrix for " + context + " (rank " +
                       std::to_string(rank) + " of " + std::to_string(design.cols()) + ")");
    }
    LeastSquaresResult res;
    res.coef = cod.solve(target);
    res.rank = rank;
    const Eigen::VectorXd resid = target - design * res.coef;
    res.train_mse = resid.squaredNorm() / static_cast<double>(design.rows());
    return res;
}

} // namespace wtpc
