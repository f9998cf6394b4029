#include "rootcast/series.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace rootcast::series {

TimeSeries make_series(MatrixXd values, std::vector<std::string> channel_names,
                       std::optional<std::vector<std::string>> timestamps) {
    if (values.rows() < 1 || values.cols() < 1) {
        throw std::invalid_argument("make_series: need T >= 1 and m >= 1");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("make_series: series contains NaN or infinite values");
    }
    if (static_cast<Eigen::Index>(channel_names.size()) != values.cols()) {
        throw std::invalid_argument("make_series: channel name count does not match columns");
    }
    std::set<std::string> unique(channel_names.begin(), channel_names.end());
    if (static_cast<Eigen::Index>(unique.size()) != values.cols()) {
        throw std::invalid_argument("make_series: duplicate channel names");
    }
    if (timestamps && static_cast<Eigen::Index>(timestamps->size()) != values.rows()) {
        throw std::invalid_argument("make_series: timestamp count does not match length");
    }
    return TimeSeries{std::move(values), std::move(channel_names), std::move(timestamps)};
}

TimeSeries make_series(VectorXd values, std::string channel_name) {
    MatrixXd m(values.size(), 1);
    m.col(0) = values;
    return make_series(std::move(m), std::vector<std::string>{std::move(channel_name)});
}

SegmentSet build_segments(const TimeSeries& series, Eigen::Index channel,
                          Eigen::Index lookback, Eigen::Index horizon, SegmentMode mode) {
    if (lookback < 1 || horizon < 1) {
        throw std::invalid_argument("build_segments: lookback and horizon must be >= 1");
    }
    if (channel < 0 || channel >= series.channels()) {
        throw std::invalid_argument("build_segments: channel index out of range");
    }
    const Eigen::Index T = series.length();
    const Eigen::Index window = lookback + horizon;
    if (T < window) {
        throw std::invalid_argument("build_segments: series of length " + std::to_string(T) +
                                    " is too short; need at least T = L + H = " +
                                    std::to_string(window));
    }
    const VectorXd x = series.values.col(channel);

    SegmentSet out;
    out.lookback = lookback;
    out.horizon = horizon;
    out.mode = mode;

    if (mode == SegmentMode::hankel) {
        const Eigen::Index n = T - window + 1;
        out.history.resize(n, lookback);
        out.future.resize(n, horizon);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.history.row(i) = x.segment(i, lookback).transpose();
            out.future.row(i) = x.segment(i + lookback, horizon).transpose();
        }
    } else {
        const Eigen::Index n = T / window;  // tail remainder discarded
        out.history.resize(n, lookback);
        out.future.resize(n, horizon);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.history.row(i) = x.segment(i * window, lookback).transpose();
            out.future.row(i) = x.segment(i * window + lookback, horizon).transpose();
        }
    }
    return out;
}

NormState history_stats(const MatrixXd& history, ScaleMode scale_mode, double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("history_stats: epsilon must be positive");
    const Eigen::Index n = history.rows();
    const Eigen::Index L = history.cols();
    NormState state;
    state.epsilon = epsilon;
    state.means = history.rowwise().mean();
    state.scales = VectorXd::Ones(n);
    if (scale_mode == ScaleMode::mean_and_std) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double var =
                (history.row(i).array() - state.means[i]).square().sum() / static_cast<double>(L);
            state.scales[i] = std::sqrt(var) + epsilon;
        }
    }
    return state;
}

MatrixXd normalize_with(const MatrixXd& history, const NormState& state) {
    if (history.rows() != state.means.size()) {
        throw std::invalid_argument("normalize_with: row count does not match state");
    }
    MatrixXd out = history;
    out.colwise() -= state.means;
    out.array().colwise() /= state.scales.array();
    return out;
}

std::pair<SegmentSet, NormState> instance_normalize(const SegmentSet& segments,
                                                    ScaleMode scale_mode, double epsilon) {
    NormState state = history_stats(segments.history, scale_mode, epsilon);
    SegmentSet out = segments;
    out.history = normalize_with(segments.history, state);
    out.future = segments.future;
    out.future.colwise() -= state.means;
    out.future.array().colwise() /= state.scales.array();
    return {std::move(out), std::move(state)};
}

MatrixXd denormalize(const MatrixXd& forecast, const NormState& state) {
    if (forecast.rows() != state.means.size()) {
        throw std::invalid_argument("denormalize: forecast has " + std::to_string(forecast.rows()) +
                                    " rows but state records " + std::to_string(state.means.size()));
    }
    MatrixXd out = forecast;
    out.array().colwise() *= state.scales.array();
    out.colwise() += state.means;
    return out;
}

}  // namespace rootcast::series
