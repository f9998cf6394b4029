#ifndef ROOTCAST_DATA_HPP
#define ROOTCAST_DATA_HPP

#include "rootcast/series.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Synthetic signal generation, pure-noise generation, CSV ingestion, and
// chronological split policies. Generation is deterministic given the spec,
// including its seed.
namespace rootcast::data {

using Eigen::VectorXd;
using series::TimeSeries;

enum class SyntheticKind { trend_periodic, toy_quadratic, pure_noise, custom_recurrence };

/// Declarative synthetic-signal description.
///   trend_periodic:    sin(2t) + cos(5t) + 0.5t + sigma * eps
///   toy_quadratic:     0.01 t^2 + sin t + sigma * eps
///   pure_noise:        sigma * eps
///   custom_recurrence: y_n = sum_k coeffs[k] * y_{n-k-1} + sigma * eps
/// Samples are taken at t = t_start + i * dt.
struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::trend_periodic;
    double t_start = 0.0;
    double t_end = 200.0;
    double dt = 0.01;
    double sigma = 0.0;
    std::int64_t seed = 0;
    std::vector<double> coeffs;  // custom_recurrence only
    std::vector<double> init;    // custom_recurrence only, |init| == |coeffs|
};

TimeSeries generate_synthetic(const SyntheticSpec& spec);

/// Deterministic counter-based N(0,1) stream: value i depends only on
/// (seed, i), via splitmix64 and Box-Muller, so fixtures are reproducible
/// across platforms and languages.
class GaussianStream {
public:
    explicit GaussianStream(std::int64_t seed) : seed_(static_cast<std::uint64_t>(seed)) {}
    double at(std::uint64_t index) const;
    double next() { return at(counter_++); }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// Parse a header-first CSV into a TimeSeries. Columns other than
/// date_column become channels in header order; blank or non-numeric cells
/// are rejected with the offending row and column named.
TimeSeries load_csv(const std::string& path,
                    const std::optional<std::string>& date_column = std::nullopt);

enum class SplitPolicy { chronological };

struct SplitSpec {
    std::array<double, 3> ratios{0.6, 0.2, 0.2};  // train/val/test, sums to 1
    SplitPolicy policy = SplitPolicy::chronological;
};

/// Chronological split. The validation and test views are prefixed with the
/// preceding `lookback` points so their first forecastable window starts at
/// the split boundary; the prefix lengths are recorded so callers can tell
/// which points serve only as history.
struct Split {
    TimeSeries train;
    TimeSeries val;
    TimeSeries test;
    Eigen::Index val_prefix = 0;
    Eigen::Index test_prefix = 0;
};

Split split(const TimeSeries& series, const SplitSpec& spec, Eigen::Index lookback);

}  // namespace rootcast::data

#endif
