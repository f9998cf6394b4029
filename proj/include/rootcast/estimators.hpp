#ifndef ROOTCAST_ESTIMATORS_HPP
#define ROOTCAST_ESTIMATORS_HPP

#include "rootcast/series.hpp"

#include <Eigen/Dense>
#include <vector>

// Closed-form fitting: ordinary least squares, Reduced-Rank Regression,
// Direct Weight Rank Reduction, and validation-driven rank selection.
// Fitting calls are pure given their inputs; trained models are immutable.
namespace rootcast::estimators {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using series::SegmentSet;

enum class Domain { time, frequency };
enum class NormPolicy { none, instance_mean, instance_mean_std };

/// A trained forecaster: a real [L x H] time-domain weight or a complex
/// [(L/2+1) x (H/2+1)] frequency-domain weight, plus the normalization the
/// model applies around the linear map. Exactly one weight is present.
struct LinearModel {
    Domain domain = Domain::time;
    MatrixXd time_weight;    // present iff domain == time
    MatrixXcd freq_weight;   // present iff domain == frequency
    Eigen::Index lookback = 0;
    Eigen::Index horizon = 0;
    NormPolicy norm_policy = NormPolicy::instance_mean;
};

LinearModel make_time_model(MatrixXd weight, NormPolicy policy);
LinearModel make_frequency_model(MatrixXcd weight, Eigen::Index lookback, Eigen::Index horizon,
                                 NormPolicy policy);

series::ScaleMode scale_mode_of(NormPolicy policy);  // throws for NormPolicy::none

/// Min-norm least-squares fit of the (normalized, per policy) segments.
LinearModel fit_ols(const SegmentSet& train, NormPolicy policy);

/// Reduced-Rank Regression: project the OLS fitted values onto their top-rho
/// right singular directions, W_RRR = W_OLS V_rho V_rho^T.
LinearModel fit_rrr(const SegmentSet& train, Eigen::Index rank, NormPolicy policy);

/// Direct Weight Rank Reduction: truncated SVD of W_OLS itself.
LinearModel fit_dwrr(const SegmentSet& train, Eigen::Index rank, NormPolicy policy);

enum class RankMethod { rrr, dwrr };

/// Validation/test MSE at every rank 1..min(L,H), reusing a single OLS fit
/// and SVD. selected_rank minimizes validation MSE, smallest rank on ties.
struct RankSweepResult {
    std::vector<Eigen::Index> ranks;
    std::vector<double> val_mse;
    std::vector<double> test_mse;
    Eigen::Index selected_rank = 0;
};

RankSweepResult rank_sweep(const SegmentSet& train, const SegmentSet& val,
                           const SegmentSet& test, RankMethod method, NormPolicy policy);

/// Best test MSE among the top-k validation ranks of a sweep.
double best_test_among_top_val(const RankSweepResult& sweep, int top_k = 3);

/// Normalize -> linear map (time or frequency path) -> denormalize.
MatrixXd forecast(const LinearModel& model, const MatrixXd& history);

/// Mean over all N*H squared errors, in the original (denormalized) scale.
double evaluate_mse(const LinearModel& model, const SegmentSet& segments);

/// End-to-end linear map with the normalization folded in. Defined for
/// NormPolicy::none and instance_mean (mean_and_std is not a linear map).
MatrixXd effective_time_weight(const LinearModel& model);

}  // namespace rootcast::estimators

#endif
