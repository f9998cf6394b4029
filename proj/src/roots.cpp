#include "rootcast/roots.hpp"

#include "rootcast/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace rootcast::roots {

MatrixXd companion_matrix(const VectorXd& coeffs) {
    const Eigen::Index p = coeffs.size();
    if (p < 1) throw std::invalid_argument("companion_matrix: empty coefficient vector");
    MatrixXd c = MatrixXd::Zero(p, p);
    c.row(0) = coeffs.transpose();
    for (Eigen::Index i = 1; i < p; ++i) c(i, i - 1) = 1.0;
    return c;
}

RootSet recurrence_roots(const VectorXd& coeffs) {
    RootSet out;
    out.roots = linalg::eigenvalues(companion_matrix(coeffs));
    out.horizon_index = 1;
    out.source = RootSource::recurrence_coeffs;
    return out;
}

RootSet model_roots(const LinearModel& model, Eigen::Index horizon_index) {
    // History rows are chronological (oldest entry first), so the fitted
    // weight's first row multiplies the deepest lag; the polynomial wants
    // the most recent lag first.
    const MatrixXd flipped = estimators::effective_time_weight(model).colwise().reverse();
    return column_roots(flipped, horizon_index);
}

RootSet column_roots(const MatrixXd& weight, Eigen::Index horizon_index) {
    const Eigen::Index L = weight.rows();
    const Eigen::Index H = weight.cols();
    if (horizon_index < 1 || horizon_index > H) {
        throw std::invalid_argument("column_roots: horizon index " + std::to_string(horizon_index) +
                                    " outside [1, " + std::to_string(H) + "]");
    }
    // Degree L + j - 1 with j - 1 zero coefficients between the monic leading
    // term and the weight entries.
    const Eigen::Index degree = L + horizon_index - 1;
    VectorXd coeffs = VectorXd::Zero(degree);
    coeffs.tail(L) = weight.col(horizon_index - 1);
    RootSet out;
    out.roots = linalg::eigenvalues(companion_matrix(coeffs));
    out.horizon_index = horizon_index;
    out.source = RootSource::weight_column;
    return out;
}

double root_distance(const RootSet& a, const RootSet& b) {
    const Eigen::Index na = a.roots.size();
    const Eigen::Index nb = b.roots.size();
    if (na == 0 || nb == 0) throw std::invalid_argument("root_distance: empty root set");

    const VectorXcd& small = na <= nb ? a.roots : b.roots;
    const VectorXcd& large = na <= nb ? b.roots : a.roots;
    const Eigen::Index p = small.size();
    const Eigen::Index q = large.size();

    // Square problem padded with constant-cost dummy rows; dummies absorb the
    // unmatched members of the larger set without distorting the real rows.
    MatrixXd cost(q, q);
    double max_abs = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < q; ++j) {
            cost(i, j) = std::abs(small[i] - large[j]);
            max_abs = std::max(max_abs, cost(i, j));
        }
    }
    const double pad = 1e6 * (1.0 + max_abs);
    for (Eigen::Index i = p; i < q; ++i) cost.row(i).setConstant(pad);

    const std::vector<Eigen::Index> assignment = linalg::hungarian_match(cost);
    double total = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) total += cost(i, assignment[static_cast<size_t>(i)]);
    return total / static_cast<double>(p);
}

GeneralizationResult generalization_test(const LinearModel& model, const TimeSeries& probe,
                                         double tol) {
    if (probe.length() < model.lookback + model.horizon) {
        throw std::invalid_argument("generalization_test: probe of length " +
                                    std::to_string(probe.length()) + " is too short for L+H = " +
                                    std::to_string(model.lookback + model.horizon));
    }
    const series::SegmentSet segments =
        series::build_segments(probe, 0, model.lookback, model.horizon);
    GeneralizationResult out;
    out.mse = estimators::evaluate_mse(model, segments);
    const VectorXd x = probe.values.col(0);
    out.probe_variance = (x.array() - x.mean()).square().sum() / static_cast<double>(x.size());
    out.generalizes = out.mse < tol * out.probe_variance;
    return out;
}

std::string to_json(const RootSet& set) {
    nlohmann::json j;
    j["horizon"] = set.horizon_index;
    j["source"] = set.source == RootSource::weight_column ? "weight_column" : "recurrence_coeffs";
    nlohmann::json roots = nlohmann::json::array();
    for (Eigen::Index i = 0; i < set.roots.size(); ++i) {
        roots.push_back({set.roots[i].real(), set.roots[i].imag()});
    }
    j["roots"] = std::move(roots);
    return j.dump(2);
}

}  // namespace rootcast::roots
