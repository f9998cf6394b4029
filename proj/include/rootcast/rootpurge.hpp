#ifndef ROOTCAST_ROOTPURGE_HPP
#define ROOTCAST_ROOTPURGE_HPP

#include "rootcast/estimators.hpp"
#include "rootcast/series.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

// The Root Purge objective: a residual-recycling penalty that drives noise
// into the model's null space. Covers the padding operator, the composite
// loss with analytic gradient, gradient-descent training in the time or
// frequency domain, the IRLS solver for the square case, and higher-order
// purge variants.
namespace rootcast::rootpurge {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using estimators::Domain;
using estimators::LinearModel;
using estimators::NormPolicy;
using series::SegmentSet;

enum class PurgeInit { zeros, ols_warm_start };

struct PurgeConfig {
    double lambda = 0.5;            // regularization weight, >= 0
    int order = 1;                  // composition depth k, >= 1
    Domain domain = Domain::frequency;
    double learning_rate = 1e-3;
    int max_epochs = 200;
    Eigen::Index batch_size = 0;    // 0 = full batch
    std::int64_t seed = 0;          // mini-batch row shuffle
    int early_stop_patience = 10;   // 0 disables early stopping
    PurgeInit init = PurgeInit::zeros;  // ols_warm_start is time-domain only
    bool stop_gradient = false;     // treat the recycled residual as constant
};

/// Align a residual block to the lookback length: right-pad rows with zeros
/// when H < L (scaling lambda by L/H), crop to the first L columns otherwise.
std::pair<MatrixXd, double> pad_or_crop(const MatrixXd& residual, Eigen::Index target_len);

/// Loss and analytic gradient of
///   ||Y - G_W(X)||_F^2 + lambda_eff * ||(G_W o P)^k (Y - G_W(X))||_F^2
/// with respect to the model's own weight. The gradient matching the
/// model's domain is populated; the other is empty.
struct PurgeLoss {
    double loss = 0.0;
    double seek_term = 0.0;
    double purge_term = 0.0;  // already scaled by lambda_eff
    MatrixXd time_gradient;
    MatrixXcd freq_gradient;
};

PurgeLoss purge_loss(const LinearModel& model, const MatrixXd& history, const MatrixXd& future,
                     const PurgeConfig& config);

/// Per-epoch record of a training run, for inspection and tests.
struct TrainDiagnostics {
    std::vector<double> train_loss;  // mean-scaled objective per epoch
    std::vector<double> val_mse;     // original-scale validation MSE per epoch
    int best_epoch = 0;
    double best_val_mse = 0.0;
    bool capture_weights = false;
    std::vector<MatrixXd> time_weights;    // per epoch, when capture_weights
    std::vector<MatrixXcd> freq_weights;
};

/// Full-batch (or mini-batch) gradient descent on the purge objective,
/// normalized per policy; returns the weight with the lowest validation MSE
/// seen, including the initial weight. Deterministic given the config.
/// Throws on divergence, reporting the epoch.
LinearModel train_root_purge(const SegmentSet& train, const SegmentSet& val,
                             const PurgeConfig& config, NormPolicy policy,
                             TrainDiagnostics* diagnostics = nullptr);

struct IrlsDiagnostics {
    std::vector<double> objective;  // J(W_k) per iterate, non-increasing
    int iterations = 0;
    bool converged = false;
};

/// Iteratively reweighted least squares for the square case H = L:
///   W_{k+1} = (X^T X + lambda R_k^T R_k)^{-1} X^T Y,  R_k = Y - X W_k,
/// started from the OLS solution. A trace-scaled ridge of 1e-10 is added
/// when the normal matrix is numerically singular.
LinearModel fit_root_purge_irls(const SegmentSet& train, double lambda, int max_iters = 100,
                                double tol = 1e-10, NormPolicy policy = NormPolicy::none,
                                IrlsDiagnostics* diagnostics = nullptr);

/// Frequency-domain forward map per row: rfft(L) -> multiply by the complex
/// weight -> irfft(H), scaled by H/L so an identity-like weight preserves
/// amplitudes across length changes.
MatrixXd freq_apply(const MatrixXcd& freq_weight, const MatrixXd& history_rows,
                    Eigen::Index horizon);

/// Time-domain weight reproducing the model's linear map, obtained by
/// applying the map to the L x L identity. Time models return their own
/// weight.
MatrixXd materialize_time_weight(const LinearModel& model);

}  // namespace rootcast::rootpurge

#endif
