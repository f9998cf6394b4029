#include "rootcast/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rootcast::data {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1]: zero is excluded so log() below stays finite.
double uniform_open(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = splitmix64(splitmix64(seed) ^ counter);
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double GaussianStream::at(std::uint64_t index) const {
    const double u1 = uniform_open(seed_, 2 * index);
    const double u2 = uniform_open(seed_, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

TimeSeries generate_synthetic(const SyntheticSpec& spec) {
    if (spec.dt <= 0.0) throw std::invalid_argument("generate_synthetic: dt must be positive");
    if (spec.t_end <= spec.t_start) {
        throw std::invalid_argument("generate_synthetic: t_end must exceed t_start");
    }
    if (spec.sigma < 0.0) throw std::invalid_argument("generate_synthetic: sigma must be >= 0");

    const auto count =
        static_cast<Eigen::Index>(std::floor((spec.t_end - spec.t_start) / spec.dt + 1e-9)) + 1;
    GaussianStream noise(spec.seed);
    VectorXd y(count);

    switch (spec.kind) {
        case SyntheticKind::trend_periodic:
            for (Eigen::Index i = 0; i < count; ++i) {
                const double t = spec.t_start + spec.dt * static_cast<double>(i);
                y[i] = std::sin(2.0 * t) + std::cos(5.0 * t) + 0.5 * t;
                if (spec.sigma > 0.0) y[i] += spec.sigma * noise.at(static_cast<std::uint64_t>(i));
            }
            break;
        case SyntheticKind::toy_quadratic:
            for (Eigen::Index i = 0; i < count; ++i) {
                const double t = spec.t_start + spec.dt * static_cast<double>(i);
                y[i] = 0.01 * t * t + std::sin(t);
                if (spec.sigma > 0.0) y[i] += spec.sigma * noise.at(static_cast<std::uint64_t>(i));
            }
            break;
        case SyntheticKind::pure_noise:
            for (Eigen::Index i = 0; i < count; ++i) {
                y[i] = spec.sigma > 0.0 ? spec.sigma * noise.at(static_cast<std::uint64_t>(i)) : 0.0;
            }
            break;
        case SyntheticKind::custom_recurrence: {
            const auto p = static_cast<Eigen::Index>(spec.coeffs.size());
            if (p < 1 || spec.init.size() != spec.coeffs.size()) {
                throw std::invalid_argument(
                    "generate_synthetic: custom_recurrence needs |init| == |coeffs| >= 1");
            }
            if (count < p) throw std::invalid_argument("generate_synthetic: series shorter than order");
            for (Eigen::Index i = 0; i < p; ++i) y[i] = spec.init[static_cast<size_t>(i)];
            for (Eigen::Index i = p; i < count; ++i) {
                double v = 0.0;
                for (Eigen::Index k = 0; k < p; ++k) {
                    v += spec.coeffs[static_cast<size_t>(k)] * y[i - 1 - k];
                }
                y[i] = v;
            }
            // Observation noise on top of the clean dynamics, matching the
            // other kinds; the recurrence itself iterates noise-free.
            if (spec.sigma > 0.0) {
                for (Eigen::Index i = 0; i < count; ++i) {
                    y[i] += spec.sigma * noise.at(static_cast<std::uint64_t>(i));
                }
            }
            break;
        }
    }
    return series::make_series(std::move(y));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

TimeSeries load_csv(const std::string& path, const std::optional<std::string>& date_column) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_csv: cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("load_csv: empty file: " + path);
    const std::vector<std::string> header_raw = split_csv_line(line);

    std::vector<std::string> channel_names;
    Eigen::Index date_index = -1;
    for (size_t c = 0; c < header_raw.size(); ++c) {
        const std::string name = trim(header_raw[c]);
        if (date_column && name == *date_column) {
            date_index = static_cast<Eigen::Index>(c);
        } else {
            channel_names.push_back(name);
        }
    }
    if (date_column && date_index < 0) {
        throw std::invalid_argument("load_csv: date column '" + *date_column + "' not found in " + path);
    }
    if (channel_names.empty()) throw std::invalid_argument("load_csv: no channel columns in " + path);

    std::vector<std::string> timestamps;
    std::vector<double> cells;
    Eigen::Index rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header_raw.size()) {
            throw std::invalid_argument("load_csv: row " + std::to_string(line_no) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(header_raw.size()));
        }
        for (size_t c = 0; c < fields.size(); ++c) {
            if (static_cast<Eigen::Index>(c) == date_index) {
                timestamps.push_back(trim(fields[c]));
                continue;
            }
            const std::string cell = trim(fields[c]);
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() ||
                !std::isfinite(value)) {
                throw std::invalid_argument("load_csv: bad numeric cell at row " +
                                            std::to_string(line_no) + ", column '" +
                                            trim(header_raw[c]) + "' in " + path);
            }
            cells.push_back(value);
        }
        ++rows;
    }
    if (rows == 0) throw std::invalid_argument("load_csv: no data rows in " + path);

    const auto m = static_cast<Eigen::Index>(channel_names.size());
    Eigen::MatrixXd values(rows, m);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) values(r, c) = cells[static_cast<size_t>(r * m + c)];
    }
    std::optional<std::vector<std::string>> ts;
    if (date_index >= 0) ts = std::move(timestamps);
    return series::make_series(std::move(values), std::move(channel_names), std::move(ts));
}

namespace {

TimeSeries slice_series(const TimeSeries& s, Eigen::Index begin, Eigen::Index end) {
    TimeSeries out;
    out.values = s.values.middleRows(begin, end - begin);
    out.channel_names = s.channel_names;
    if (s.timestamps) {
        out.timestamps = std::vector<std::string>(s.timestamps->begin() + begin,
                                                  s.timestamps->begin() + end);
    }
    return out;
}

}  // namespace

Split split(const TimeSeries& series, const SplitSpec& spec, Eigen::Index lookback) {
    const double sum = spec.ratios[0] + spec.ratios[1] + spec.ratios[2];
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("split: ratios must sum to 1");
    }
    if (lookback < 0) throw std::invalid_argument("split: negative lookback");
    const Eigen::Index T = series.length();
    const auto n1 = static_cast<Eigen::Index>(std::floor(spec.ratios[0] * static_cast<double>(T)));
    const auto n2 = static_cast<Eigen::Index>(
        std::floor((spec.ratios[0] + spec.ratios[1]) * static_cast<double>(T)));

    const Eigen::Index val_len = n2 - n1;
    const Eigen::Index test_len = T - n2;
    auto check = [&](const char* name, double ratio, Eigen::Index len) {
        if (ratio > 0.0 && len < lookback + 1) {
            throw std::invalid_argument(std::string("split: ") + name + " split of length " +
                                        std::to_string(len) + " is too small for lookback " +
                                        std::to_string(lookback));
        }
    };
    check("train", spec.ratios[0], n1);
    check("val", spec.ratios[1], val_len);
    check("test", spec.ratios[2], test_len);

    Split out;
    out.train = slice_series(series, 0, n1);
    out.val_prefix = val_len > 0 ? std::min(lookback, n1) : 0;
    out.test_prefix = test_len > 0 ? std::min(lookback, n2) : 0;
    // Empty ratio slots yield zero-length views; using them downstream fails
    // with build_segments' too-short error.
    out.val = val_len > 0 ? slice_series(series, n1 - out.val_prefix, n2)
                          : slice_series(series, n1, n1);
    out.test = test_len > 0 ? slice_series(series, n2 - out.test_prefix, T)
                            : slice_series(series, n2, n2);
    return out;
}

}  // namespace rootcast::data
