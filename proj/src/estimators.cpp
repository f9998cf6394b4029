#include "rootcast/estimators.hpp"

#include "rootcast/linalg.hpp"
#include "rootcast/rootpurge.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rootcast::estimators {

namespace {

using linalg::SvdResult;
using series::NormState;
using series::ScaleMode;

void check_segments(const SegmentSet& s) {
    if (s.count() < 1) throw std::invalid_argument("estimators: empty segment set");
    if (s.future.rows() != s.history.rows()) {
        throw std::invalid_argument("estimators: history/future row mismatch");
    }
}

/// Normalized copies of the segment matrices plus the per-row scale weights
/// that turn normalized-space residuals back into original-scale MSE.
struct Normalized {
    MatrixXd history;
    MatrixXd future;
    Eigen::VectorXd row_weight;  // scale_i^2, all ones unless mean_and_std
};

Normalized apply_policy(const SegmentSet& s, NormPolicy policy) {
    Normalized out;
    if (policy == NormPolicy::none) {
        out.history = s.history;
        out.future = s.future;
        out.row_weight = Eigen::VectorXd::Ones(s.count());
        return out;
    }
    auto [normalized, state] = series::instance_normalize(s, scale_mode_of(policy));
    out.history = std::move(normalized.history);
    out.future = std::move(normalized.future);
    out.row_weight = state.scales.array().square();
    return out;
}

}  // namespace

series::ScaleMode scale_mode_of(NormPolicy policy) {
    switch (policy) {
        case NormPolicy::instance_mean: return ScaleMode::mean_only;
        case NormPolicy::instance_mean_std: return ScaleMode::mean_and_std;
        case NormPolicy::none: break;
    }
    throw std::invalid_argument("scale_mode_of: NormPolicy::none has no scale mode");
}

LinearModel make_time_model(MatrixXd weight, NormPolicy policy) {
    if (weight.rows() < 1 || weight.cols() < 1) {
        throw std::invalid_argument("make_time_model: empty weight");
    }
    LinearModel m;
    m.domain = Domain::time;
    m.lookback = weight.rows();
    m.horizon = weight.cols();
    m.time_weight = std::move(weight);
    m.norm_policy = policy;
    return m;
}

LinearModel make_frequency_model(MatrixXcd weight, Eigen::Index lookback, Eigen::Index horizon,
                                 NormPolicy policy) {
    if (weight.rows() != lookback / 2 + 1 || weight.cols() != horizon / 2 + 1) {
        throw std::invalid_argument("make_frequency_model: weight is " +
                                    std::to_string(weight.rows()) + "x" +
                                    std::to_string(weight.cols()) + " but L=" +
                                    std::to_string(lookback) + ", H=" + std::to_string(horizon) +
                                    " need " + std::to_string(lookback / 2 + 1) + "x" +
                                    std::to_string(horizon / 2 + 1));
    }
    LinearModel m;
    m.domain = Domain::frequency;
    m.lookback = lookback;
    m.horizon = horizon;
    m.freq_weight = std::move(weight);
    m.norm_policy = policy;
    return m;
}

LinearModel fit_ols(const SegmentSet& train, NormPolicy policy) {
    check_segments(train);
    Normalized n = apply_policy(train, policy);
    MatrixXd w = linalg::least_squares(n.history, n.future);
    return make_time_model(std::move(w), policy);
}

LinearModel fit_rrr(const SegmentSet& train, Eigen::Index rank, NormPolicy policy) {
    check_segments(train);
    const Eigen::Index max_rank = std::min(train.count(), train.horizon);
    if (rank < 1 || rank > max_rank) {
        throw std::invalid_argument("fit_rrr: rank " + std::to_string(rank) + " outside [1, " +
                                    std::to_string(max_rank) + "]");
    }
    Normalized n = apply_policy(train, policy);
    MatrixXd w_ols = linalg::least_squares(n.history, n.future);
    MatrixXd fitted = linalg::matmul(n.history, w_ols);
    SvdResult s = linalg::svd(fitted);
    const MatrixXd v_rho = s.right_vectors.leftCols(rank);
    MatrixXd w = w_ols * (v_rho * v_rho.transpose());
    return make_time_model(std::move(w), policy);
}

LinearModel fit_dwrr(const SegmentSet& train, Eigen::Index rank, NormPolicy policy) {
    check_segments(train);
    const Eigen::Index max_rank = std::min(train.lookback, train.horizon);
    if (rank < 1 || rank > max_rank) {
        throw std::invalid_argument("fit_dwrr: rank " + std::to_string(rank) + " outside [1, " +
                                    std::to_string(max_rank) + "]");
    }
    Normalized n = apply_policy(train, policy);
    MatrixXd w_ols = linalg::least_squares(n.history, n.future);
    SvdResult s = linalg::svd(w_ols);
    return make_time_model(linalg::truncate_rank(s, rank), policy);
}

namespace {

double weighted_mse(const MatrixXd& residual, const Eigen::VectorXd& row_weight) {
    const double cells = static_cast<double>(residual.rows()) * static_cast<double>(residual.cols());
    return (residual.array().square().rowwise().sum() * row_weight.array()).sum() / cells;
}

}  // namespace

RankSweepResult rank_sweep(const SegmentSet& train, const SegmentSet& val, const SegmentSet& test,
                           RankMethod method, NormPolicy policy) {
    check_segments(train);
    check_segments(val);
    check_segments(test);
    if (train.lookback != val.lookback || train.lookback != test.lookback ||
        train.horizon != val.horizon || train.horizon != test.horizon) {
        throw std::invalid_argument("rank_sweep: splits disagree on L or H");
    }

    Normalized tr = apply_policy(train, policy);
    Normalized va = apply_policy(val, policy);
    Normalized te = apply_policy(test, policy);

    MatrixXd w_ols = linalg::least_squares(tr.history, tr.future);
    const Eigen::Index sweep_max = std::min(train.lookback, train.horizon);

    // One SVD serves the whole sweep; rank rho adds one rank-1 term to the
    // rank rho-1 prediction, so the full curve costs O(sweep_max) cheap passes.
    struct RankOneTerm {
        Eigen::VectorXd val_coeff;   // N_val
        Eigen::VectorXd test_coeff;  // N_test
        Eigen::VectorXd direction;   // H
    };
    std::vector<RankOneTerm> terms;
    terms.reserve(static_cast<size_t>(sweep_max));

    if (method == RankMethod::rrr) {
        MatrixXd fitted = linalg::matmul(tr.history, w_ols);
        SvdResult s = linalg::svd(fitted);
        MatrixXd val_pred_full = linalg::matmul(va.history, w_ols);
        MatrixXd test_pred_full = linalg::matmul(te.history, w_ols);
        for (Eigen::Index r = 0; r < sweep_max; ++r) {
            const Eigen::VectorXd v = s.right_vectors.col(r);
            terms.push_back({val_pred_full * v, test_pred_full * v, v});
        }
    } else {
        SvdResult s = linalg::svd(w_ols);
        MatrixXd val_proj = linalg::matmul(va.history, s.left_vectors);
        MatrixXd test_proj = linalg::matmul(te.history, s.left_vectors);
        for (Eigen::Index r = 0; r < sweep_max; ++r) {
            const double sigma = s.singular_values[r];
            terms.push_back({sigma * val_proj.col(r), sigma * test_proj.col(r),
                             s.right_vectors.col(r)});
        }
    }

    RankSweepResult out;
    MatrixXd val_res = va.future;
    MatrixXd test_res = te.future;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < sweep_max; ++r) {
        val_res.noalias() -= terms[static_cast<size_t>(r)].val_coeff *
                             terms[static_cast<size_t>(r)].direction.transpose();
        test_res.noalias() -= terms[static_cast<size_t>(r)].test_coeff *
                              terms[static_cast<size_t>(r)].direction.transpose();
        out.ranks.push_back(r + 1);
        out.val_mse.push_back(weighted_mse(val_res, va.row_weight));
        out.test_mse.push_back(weighted_mse(test_res, te.row_weight));
        if (out.val_mse.back() < best) {  // strict: ties keep the smaller rank
            best = out.val_mse.back();
            out.selected_rank = r + 1;
        }
    }
    return out;
}

double best_test_among_top_val(const RankSweepResult& sweep, int top_k) {
    if (sweep.ranks.empty()) throw std::invalid_argument("best_test_among_top_val: empty sweep");
    std::vector<size_t> order(sweep.ranks.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return sweep.val_mse[a] < sweep.val_mse[b]; });
    double best = std::numeric_limits<double>::infinity();
    const size_t k = std::min<size_t>(static_cast<size_t>(std::max(top_k, 1)), order.size());
    for (size_t i = 0; i < k; ++i) best = std::min(best, sweep.test_mse[order[i]]);
    return best;
}

MatrixXd forecast(const LinearModel& model, const MatrixXd& history) {
    if (history.cols() != model.lookback) {
        throw std::invalid_argument("forecast: history has " + std::to_string(history.cols()) +
                                    " columns, model expects " + std::to_string(model.lookback));
    }
    MatrixXd input = history;
    NormState state;
    const bool normalized = model.norm_policy != NormPolicy::none;
    if (normalized) {
        state = series::history_stats(history, scale_mode_of(model.norm_policy));
        input = series::normalize_with(history, state);
    }
    MatrixXd pred;
    if (model.domain == Domain::time) {
        pred = history.rows() >= 256 ? linalg::matmul(input, model.time_weight)
                                     : MatrixXd(input * model.time_weight);
    } else {
        pred = rootpurge::freq_apply(model.freq_weight, input, model.horizon);
    }
    return normalized ? series::denormalize(pred, state) : pred;
}

double evaluate_mse(const LinearModel& model, const SegmentSet& segments) {
    check_segments(segments);
    if (segments.lookback != model.lookback || segments.horizon != model.horizon) {
        throw std::invalid_argument("evaluate_mse: segment shape does not match model");
    }
    const MatrixXd pred = forecast(model, segments.history);
    return (pred - segments.future).squaredNorm() /
           (static_cast<double>(segments.count()) * static_cast<double>(segments.horizon));
}

MatrixXd effective_time_weight(const LinearModel& model) {
    const MatrixXd w = rootpurge::materialize_time_weight(model);
    switch (model.norm_policy) {
        case NormPolicy::none:
            return w;
        case NormPolicy::instance_mean: {
            // Mean removal then re-addition folds into the weight: subtracting
            // the window mean projects rows, adding it back contributes a
            // rank-one all-ones block. Column sums become exactly 1.
            const Eigen::Index L = model.lookback;
            const Eigen::Index H = model.horizon;
            const MatrixXd centering =
                MatrixXd::Identity(L, L) - MatrixXd::Constant(L, L, 1.0 / static_cast<double>(L));
            return centering * w + MatrixXd::Constant(L, H, 1.0 / static_cast<double>(L));
        }
        case NormPolicy::instance_mean_std: break;
    }
    throw std::invalid_argument(
        "effective_time_weight: mean_and_std normalization is not a linear map");
}

}  // namespace rootcast::estimators
