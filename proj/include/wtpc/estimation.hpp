#pragma once

#include "wtpc/scada.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace wtpc {

/// Per-wind-bin power statistics over the quantized regressor grid.
struct BinnedStats {
    struct Bin {
        long long wind_tenths = 0;
        long long count = 0;
        double mean = 0.0;
        double ss = 0.0; // sum of squared deviations from the bin mean
    };
    std::vector<Bin> bins; // ascending wind
    long long total = 0;

    /// CSV with header "wind,count,mean,std".
    std::string to_csv() const;
};

BinnedStats binned_means(const CleanDataset& data);

/// Minimal attainable training MSE under a quantized regressor: the average
/// within-bin variance of power given wind. No model can fit below this.
double mse_lower_bound(const CleanDataset& data);

double mean_squared_error(const std::vector<double>& observed,
                          const std::vector<double>& predicted);

struct LeastSquaresResult {
    Eigen::VectorXd coef;
    double train_mse = 0.0;
    Eigen::Index rank = 0;
};

/// Linear least squares via complete orthogonal decomposition (minimum-norm
/// under rank deficiency). `saturation_rank` is the largest rank the data can
/// support (number of distinct regressor values); a deficiency beyond what
/// saturation explains throws FitError tagged with `context`.
LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& target,
                                       Eigen::Index saturation_rank,
                                       const std::string& context);

} // namespace wtpc
