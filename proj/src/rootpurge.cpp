#include "rootcast/rootpurge.hpp"

#include "rootcast/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rootcast::rootpurge {

namespace {

using Eigen::VectorXcd;
using Eigen::VectorXd;

double lambda_scale_for(Eigen::Index horizon, Eigen::Index lookback) {
    return horizon < lookback ? static_cast<double>(lookback) / static_cast<double>(horizon) : 1.0;
}

// Gram-space image of the padding operator: pad^T(M) pad for an H x H block.
MatrixXd embed_gram(const MatrixXd& m, Eigen::Index lookback) {
    const Eigen::Index h = m.rows();
    if (h < lookback) {
        MatrixXd out = MatrixXd::Zero(lookback, lookback);
        out.topLeftCorner(h, h) = m;
        return out;
    }
    return m.topLeftCorner(lookback, lookback);
}

// Adjoint of embed_gram under the trace inner product.
MatrixXd embed_gram_adjoint(const MatrixXd& q, Eigen::Index horizon) {
    const Eigen::Index l = q.rows();
    if (horizon < l) return q.topLeftCorner(horizon, horizon);
    MatrixXd out = MatrixXd::Zero(horizon, horizon);
    out.topLeftCorner(l, l) = q;
    return out;
}

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

struct PurgeTerms {
    double seek = 0.0;
    double purge = 0.0;    // includes lambda_eff
    MatrixXd grad;         // with respect to the time-domain weight, sum form
};

// Loss and gradient of the purge objective given the residual gram
// M0 = R^T R and the seek-gradient factor XtR = X^T R. Everything downstream
// of these two matrices is independent of the sample count, which is what
// makes full-batch training cheap per epoch.
//
// Forward chain:  M_j = W^T E(M_{j-1}) W,  loss = tr(M_0) + lambda_eff tr(M_k).
// Reverse sweep accumulates the cotangents C_j of each M_j; the W-gradient
// picks up 2 E(M_{j-1}) W C_j from every composition step plus the
// dependence of M_0 on W (dropped under stop_gradient).
PurgeTerms purge_core(const MatrixXd& weight, const MatrixXd& m0, const MatrixXd& xtr,
                      double lambda_eff, int order, bool stop_gradient) {
    const Eigen::Index L = weight.rows();
    const Eigen::Index H = weight.cols();

    std::vector<MatrixXd> chain(static_cast<size_t>(order) + 1);
    chain[0] = symmetrize(m0);
    for (int j = 1; j <= order; ++j) {
        const MatrixXd embedded = embed_gram(chain[static_cast<size_t>(j - 1)], L);
        chain[static_cast<size_t>(j)] = symmetrize(weight.transpose() * (embedded * weight));
    }

    PurgeTerms out;
    out.seek = chain[0].trace();
    out.purge = lambda_eff * chain[static_cast<size_t>(order)].trace();

    MatrixXd purge_grad = MatrixXd::Zero(L, H);
    MatrixXd cotangent = MatrixXd::Identity(H, H);  // C_k
    for (int j = order; j >= 1; --j) {
        const MatrixXd embedded = embed_gram(chain[static_cast<size_t>(j - 1)], L);
        purge_grad.noalias() += 2.0 * embedded * (weight * cotangent);
        cotangent = symmetrize(embed_gram_adjoint(weight * cotangent * weight.transpose(), H));
    }
    if (!stop_gradient) {
        purge_grad.noalias() -= 2.0 * xtr * cotangent;  // C_0 path through M_0
    }
    out.grad = -2.0 * xtr + lambda_eff * purge_grad;
    return out;
}

// rfft of the L x L identity: row j holds exp(-2*pi*i*j*k/L). Applying the
// frequency weight to these rows materializes the time-domain map.
MatrixXcd fourier_rows(Eigen::Index length) {
    const Eigen::Index bins = length / 2 + 1;
    MatrixXcd f(length, bins);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(length);
    for (Eigen::Index j = 0; j < length; ++j) {
        for (Eigen::Index k = 0; k < bins; ++k) {
            const double angle = step * static_cast<double>(j) * static_cast<double>(k);
            f(j, k) = std::complex<double>(std::cos(angle), std::sin(angle));
        }
    }
    return f;
}

MatrixXd materialize_freq(const MatrixXcd& freq_weight, const MatrixXcd& fourier,
                          Eigen::Index lookback, Eigen::Index horizon) {
    const MatrixXcd spectra = fourier * freq_weight;
    const double scale = static_cast<double>(horizon) / static_cast<double>(lookback);
    return scale * linalg::irfft_rows(spectra, horizon);
}

// Adjoint of the materialization: maps a time-weight cotangent back to the
// complex weight, in the (d/dRe + i d/dIm) convention used for descent steps.
MatrixXcd freq_weight_gradient(const MatrixXd& time_grad, const MatrixXcd& fourier,
                               Eigen::Index lookback, Eigen::Index horizon) {
    const double scale = static_cast<double>(horizon) / static_cast<double>(lookback);
    MatrixXcd spectra = linalg::rfft_rows(time_grad);  // L x (H/2+1)
    const double base = scale / static_cast<double>(horizon);
    spectra.col(0) *= base;
    const Eigen::Index bins = horizon / 2 + 1;
    for (Eigen::Index k = 1; k < bins; ++k) {
        const bool nyquist = (horizon % 2 == 0) && (k == horizon / 2);
        spectra.col(k) *= nyquist ? base : 2.0 * base;
    }
    return fourier.adjoint() * spectra;
}

}  // namespace

std::pair<MatrixXd, double> pad_or_crop(const MatrixXd& residual, Eigen::Index target_len) {
    const Eigen::Index h = residual.cols();
    if (h < target_len) {
        MatrixXd padded = MatrixXd::Zero(residual.rows(), target_len);
        padded.leftCols(h) = residual;
        return {std::move(padded), static_cast<double>(target_len) / static_cast<double>(h)};
    }
    return {residual.leftCols(target_len), 1.0};
}

MatrixXd freq_apply(const MatrixXcd& freq_weight, const MatrixXd& history_rows,
                    Eigen::Index horizon) {
    const Eigen::Index lookback = history_rows.cols();
    if (freq_weight.rows() != lookback / 2 + 1) {
        throw std::invalid_argument("freq_apply: weight has " + std::to_string(freq_weight.rows()) +
                                    " input bins, history length " + std::to_string(lookback) +
                                    " needs " + std::to_string(lookback / 2 + 1));
    }
    if (freq_weight.cols() != horizon / 2 + 1) {
        throw std::invalid_argument("freq_apply: weight has " + std::to_string(freq_weight.cols()) +
                                    " output bins, horizon " + std::to_string(horizon) + " needs " +
                                    std::to_string(horizon / 2 + 1));
    }
    const MatrixXcd spectra = linalg::rfft_rows(history_rows) * freq_weight;
    const double scale = static_cast<double>(horizon) / static_cast<double>(lookback);
    return scale * linalg::irfft_rows(spectra, horizon);
}

MatrixXd materialize_time_weight(const LinearModel& model) {
    if (model.domain == Domain::time) return model.time_weight;
    return freq_apply(model.freq_weight, MatrixXd::Identity(model.lookback, model.lookback),
                      model.horizon);
}

PurgeLoss purge_loss(const LinearModel& model, const MatrixXd& history, const MatrixXd& future,
                     const PurgeConfig& config) {
    if (config.lambda < 0.0) throw std::invalid_argument("purge_loss: lambda must be >= 0");
    if (config.order < 1) throw std::invalid_argument("purge_loss: order must be >= 1");
    if (history.cols() != model.lookback || future.cols() != model.horizon ||
        history.rows() != future.rows()) {
        throw std::invalid_argument("purge_loss: matrix shapes do not match the model");
    }

    const MatrixXd weight = materialize_time_weight(model);
    const MatrixXd residual = future - history * weight;
    const MatrixXd m0 = residual.transpose() * residual;
    const MatrixXd xtr = history.transpose() * residual;
    const double lambda_eff =
        config.lambda * lambda_scale_for(model.horizon, model.lookback);

    PurgeTerms terms =
        purge_core(weight, m0, xtr, lambda_eff, config.order, config.stop_gradient);

    PurgeLoss out;
    out.seek_term = terms.seek;
    out.purge_term = terms.purge;
    out.loss = terms.seek + terms.purge;
    if (!std::isfinite(out.loss)) {
        throw std::runtime_error("purge_loss: non-finite loss");
    }
    if (model.domain == Domain::time) {
        out.time_gradient = std::move(terms.grad);
    } else {
        const MatrixXcd fourier = fourier_rows(model.lookback);
        out.freq_gradient = freq_weight_gradient(terms.grad, fourier, model.lookback, model.horizon);
    }
    return out;
}

namespace {

struct GramSet {
    MatrixXd sxx;  // X^T X
    MatrixXd sxy;  // X^T Y
    MatrixXd syy;  // Y^T Y
    double cells = 0.0;  // rows * H, the mean-loss normalizer
};

GramSet build_grams(const MatrixXd& x, const MatrixXd& y) {
    GramSet g;
    g.sxx = linalg::gram(x);
    g.sxy = linalg::crossprod(x, y);
    g.syy = linalg::gram(y);
    g.cells = static_cast<double>(x.rows()) * static_cast<double>(y.cols());
    return g;
}

double gram_mse(const GramSet& g, const MatrixXd& weight) {
    const double sq = g.syy.trace() - 2.0 * weight.cwiseProduct(g.sxy).sum() +
                      weight.cwiseProduct(g.sxx * weight).sum();
    return std::max(sq, 0.0) / g.cells;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

LinearModel train_root_purge(const SegmentSet& train, const SegmentSet& val,
                             const PurgeConfig& config, NormPolicy policy,
                             TrainDiagnostics* diagnostics) {
    if (config.lambda < 0.0 || config.order < 1 || config.learning_rate <= 0.0 ||
        config.max_epochs < 1 || config.early_stop_patience < 0) {
        throw std::invalid_argument("train_root_purge: invalid config");
    }
    if (train.lookback != val.lookback || train.horizon != val.horizon) {
        throw std::invalid_argument("train_root_purge: train/val disagree on L or H");
    }
    const Eigen::Index L = train.lookback;
    const Eigen::Index H = train.horizon;

    // Train in normalized space; validation MSE is converted back to the
    // original scale through the per-row variances (exact for linear maps).
    MatrixXd x_train = train.history, y_train = train.future;
    MatrixXd x_val = val.history, y_val = val.future;
    VectorXd val_weights = VectorXd::Ones(val.count());
    if (policy != NormPolicy::none) {
        const series::ScaleMode mode = estimators::scale_mode_of(policy);
        auto [nt, st] = series::instance_normalize(train, mode);
        x_train = std::move(nt.history);
        y_train = std::move(nt.future);
        auto [nv, sv] = series::instance_normalize(val, mode);
        x_val = std::move(nv.history);
        y_val = std::move(nv.future);
        val_weights = sv.scales.array().square();
    }
    GramSet val_grams = build_grams(val_weights.cwiseSqrt().asDiagonal() * x_val,
                                    val_weights.cwiseSqrt().asDiagonal() * y_val);

    // Mini-batches are fixed contiguous slices of a once-shuffled row order,
    // so accumulation order (and therefore the result) is deterministic.
    const Eigen::Index n = train.count();
    std::vector<GramSet> batches;
    if (config.batch_size > 0 && config.batch_size < n) {
        std::vector<Eigen::Index> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::uint64_t state = static_cast<std::uint64_t>(config.seed);
        for (Eigen::Index i = n - 1; i > 0; --i) {
            state = mix64(state);
            const Eigen::Index j = static_cast<Eigen::Index>(state % static_cast<std::uint64_t>(i + 1));
            std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
        }
        for (Eigen::Index start = 0; start < n; start += config.batch_size) {
            const Eigen::Index rows = std::min(config.batch_size, n - start);
            MatrixXd xb(rows, L), yb(rows, H);
            for (Eigen::Index r = 0; r < rows; ++r) {
                xb.row(r) = x_train.row(order[static_cast<size_t>(start + r)]);
                yb.row(r) = y_train.row(order[static_cast<size_t>(start + r)]);
            }
            batches.push_back(build_grams(xb, yb));
        }
    } else {
        batches.push_back(build_grams(x_train, y_train));
    }
    GramSet full = batches.size() == 1 ? batches[0] : build_grams(x_train, y_train);

    const double lambda_eff = config.lambda * lambda_scale_for(H, L);
    const bool frequency = config.domain == Domain::frequency;
    const MatrixXcd fourier = frequency ? fourier_rows(L) : MatrixXcd();

    MatrixXcd freq_param;
    MatrixXd time_param;
    if (config.init == PurgeInit::ols_warm_start) {
        if (frequency) {
            throw std::invalid_argument("train_root_purge: ols_warm_start is time-domain only");
        }
        time_param = linalg::least_squares(x_train, y_train);
    } else if (frequency) {
        freq_param = MatrixXcd::Zero(L / 2 + 1, H / 2 + 1);
    } else {
        time_param = MatrixXd::Zero(L, H);
    }

    auto current_weight = [&]() -> MatrixXd {
        return frequency ? materialize_freq(freq_param, fourier, L, H) : time_param;
    };
    auto loss_at = [&](const MatrixXd& weight, const GramSet& g, MatrixXd* grad) -> double {
        const MatrixXd sxx_w = g.sxx * weight;
        const MatrixXd xtr = g.sxy - sxx_w;
        MatrixXd m0 = g.syy - weight.transpose() * g.sxy;
        m0.noalias() -= g.sxy.transpose() * weight;
        m0.noalias() += weight.transpose() * sxx_w;
        PurgeTerms t = purge_core(weight, m0, xtr, lambda_eff, config.order, config.stop_gradient);
        if (grad) *grad = t.grad / g.cells;
        return (t.seek + t.purge) / g.cells;
    };

    MatrixXd best_weight_time = time_param;
    MatrixXcd best_weight_freq = freq_param;
    double best_val = gram_mse(val_grams, current_weight());
    int best_epoch = 0;
    if (diagnostics) {
        diagnostics->val_mse.push_back(best_val);
        diagnostics->train_loss.push_back(loss_at(current_weight(), full, nullptr));
        if (diagnostics->capture_weights) {
            if (frequency) diagnostics->freq_weights.push_back(freq_param);
            else diagnostics->time_weights.push_back(time_param);
        }
    }

    int stale = 0;
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        for (const GramSet& batch : batches) {
            MatrixXd grad;
            const double loss = loss_at(current_weight(), batch, &grad);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("train_root_purge: loss diverged (non-finite) at epoch " +
                                         std::to_string(epoch));
            }
            if (frequency) {
                freq_param.noalias() -= config.learning_rate *
                                        freq_weight_gradient(grad, fourier, L, H);
            } else {
                time_param.noalias() -= config.learning_rate * grad;
            }
        }
        const MatrixXd weight = current_weight();
        if (!weight.allFinite()) {
            throw std::runtime_error("train_root_purge: weights diverged at epoch " +
                                     std::to_string(epoch));
        }
        const double val_mse = gram_mse(val_grams, weight);
        if (diagnostics) {
            diagnostics->val_mse.push_back(val_mse);
            diagnostics->train_loss.push_back(loss_at(weight, full, nullptr));
            if (diagnostics->capture_weights) {
                if (frequency) diagnostics->freq_weights.push_back(freq_param);
                else diagnostics->time_weights.push_back(time_param);
            }
        }
        if (val_mse < best_val) {
            best_val = val_mse;
            best_epoch = epoch;
            best_weight_time = time_param;
            best_weight_freq = freq_param;
            stale = 0;
        } else if (config.early_stop_patience > 0 && ++stale >= config.early_stop_patience) {
            break;
        }
    }
    if (diagnostics) {
        diagnostics->best_epoch = best_epoch;
        diagnostics->best_val_mse = best_val;
    }

    return frequency
               ? estimators::make_frequency_model(std::move(best_weight_freq), L, H, policy)
               : estimators::make_time_model(std::move(best_weight_time), policy);
}

LinearModel fit_root_purge_irls(const SegmentSet& train, double lambda, int max_iters, double tol,
                                NormPolicy policy, IrlsDiagnostics* diagnostics) {
    if (train.horizon != train.lookback) {
        throw std::invalid_argument("fit_root_purge_irls: requires H = L (square weight)");
    }
    if (lambda < 0.0 || max_iters < 1 || tol <= 0.0) {
        throw std::invalid_argument("fit_root_purge_irls: invalid parameters");
    }
    MatrixXd x = train.history, y = train.future;
    if (policy != NormPolicy::none) {
        auto [nt, st] = series::instance_normalize(train, estimators::scale_mode_of(policy));
        x = std::move(nt.history);
        y = std::move(nt.future);
    }
    const Eigen::Index L = train.lookback;
    const MatrixXd sxx = linalg::gram(x);
    const MatrixXd sxy = linalg::crossprod(x, y);

    auto objective = [&](const MatrixXd& w) {
        const MatrixXd r = y - x * w;
        return r.squaredNorm() + lambda * (r * w).squaredNorm();
    };
    auto solve_normal = [&](const MatrixXd& lhs) -> MatrixXd {
        Eigen::LDLT<MatrixXd> ldlt(lhs);
        MatrixXd w = ldlt.solve(sxy);
        const double scale = lhs.norm() * w.norm() + sxy.norm();
        if (ldlt.info() == Eigen::Success && w.allFinite() &&
            (lhs * w - sxy).norm() <= 1e-8 * scale) {
            return w;
        }
        // Degenerate (e.g. noise-free) normal matrix: add a trace-scaled ridge.
        const double ridge = 1e-10 * lhs.trace() / static_cast<double>(L);
        Eigen::LDLT<MatrixXd> jittered(lhs + ridge * MatrixXd::Identity(L, L));
        w = jittered.solve(sxy);
        if (jittered.info() != Eigen::Success || !w.allFinite()) {
            throw std::runtime_error(
                "fit_root_purge_irls: singular normal matrix even after ridge jitter");
        }
        return w;
    };

    MatrixXd w = linalg::least_squares(x, y);  // W_0 = OLS
    double current = objective(w);
    if (diagnostics) {
        diagnostics->objective.clear();
        diagnostics->objective.push_back(current);
        diagnostics->converged = false;
    }
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        const MatrixXd r = y - x * w;
        MatrixXd m0 = r.transpose() * r;
        m0 = 0.5 * (m0 + m0.transpose());
        const MatrixXd target = solve_normal(sxx + lambda * m0);

        // The raw fixed-point step can overshoot past the point where the
        // objective turns back up, so the update is damped: take the full
        // step when it does not increase J, otherwise halve toward the
        // current iterate until it descends.
        double t = 1.0;
        MatrixXd candidate;
        double cand_obj = current;
        bool descended = false;
        for (int halving = 0; halving < 60; ++halving) {
            candidate = w + t * (target - w);
            cand_obj = objective(candidate);
            if (cand_obj <= current) {
                descended = true;
                break;
            }
            t *= 0.5;
        }
        if (!descended) {
            if (diagnostics) diagnostics->converged = true;
            break;
        }
        const double step = (candidate - w).norm();
        w = std::move(candidate);
        current = cand_obj;
        if (diagnostics) diagnostics->objective.push_back(current);
        if (step < tol) {
            if (diagnostics) diagnostics->converged = true;
            ++iter;
            break;
        }
    }
    if (diagnostics) diagnostics->iterations = iter;
    return estimators::make_time_model(std::move(w), policy);
}

}  // namespace rootcast::rootpurge
