#ifndef ROOTCAST_SERIES_HPP
#define ROOTCAST_SERIES_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

// Time-series data model: the observation table, segmentation into
// history/future matrices, and per-window instance normalization. All types
// are immutable after construction and safe to share across threads.
namespace rootcast::series {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Length-T, m-channel observation table. Ingestion rejects NaN, so a
/// constructed TimeSeries never holds missing values.
struct TimeSeries {
    MatrixXd values;                                   // T x m
    std::vector<std::string> channel_names;            // m, no duplicates
    std::optional<std::vector<std::string>> timestamps;  // T ISO-8601 strings

    Eigen::Index length() const { return values.rows(); }
    Eigen::Index channels() const { return values.cols(); }
};

/// Validating constructor; throws std::invalid_argument on NaN entries,
/// empty data, or duplicate channel names.
TimeSeries make_series(MatrixXd values, std::vector<std::string> channel_names,
                       std::optional<std::vector<std::string>> timestamps = std::nullopt);

/// Single-channel convenience wrapper.
TimeSeries make_series(VectorXd values, std::string channel_name = "value");

enum class SegmentMode { hankel, stacked };

/// Paired history [N x L] and future [N x H] matrices. In hankel mode row i
/// of future starts one step after the last entry of row i of history.
struct SegmentSet {
    MatrixXd history;  // N x L
    MatrixXd future;   // N x H
    Eigen::Index lookback = 0;
    Eigen::Index horizon = 0;
    SegmentMode mode = SegmentMode::hankel;

    Eigen::Index count() const { return history.rows(); }
};

/// Slice one channel into history/future matrices. Hankel mode slides a
/// window of length L+H one step at a time (N = T - L - H + 1); stacked mode
/// partitions into non-overlapping L+H blocks and discards the tail.
SegmentSet build_segments(const TimeSeries& series, Eigen::Index channel,
                          Eigen::Index lookback, Eigen::Index horizon,
                          SegmentMode mode = SegmentMode::hankel);

enum class ScaleMode { mean_only, mean_and_std };

/// Per-row normalization statistics; scales[i] >= epsilon > 0 always holds.
struct NormState {
    VectorXd means;   // N
    VectorXd scales;  // N
    double epsilon = 1e-8;
};

constexpr double kNormEpsilon = 1e-8;

/// Subtract each history row's mean (and divide by its std + epsilon in
/// mean_and_std mode), applying the same statistics to the matching future
/// row. The returned NormState inverts the transform via denormalize.
std::pair<SegmentSet, NormState> instance_normalize(const SegmentSet& segments,
                                                    ScaleMode scale_mode = ScaleMode::mean_only,
                                                    double epsilon = kNormEpsilon);

/// Inverse of instance_normalize on a future-shaped block.
MatrixXd denormalize(const MatrixXd& forecast, const NormState& state);

/// Statistics of a history block alone, for normalizing fresh inputs at
/// forecast time with the same convention the training pass used.
NormState history_stats(const MatrixXd& history, ScaleMode scale_mode,
                        double epsilon = kNormEpsilon);

/// Apply recorded statistics to a history block (rows x L).
MatrixXd normalize_with(const MatrixXd& history, const NormState& state);

}  // namespace rootcast::series

#endif
