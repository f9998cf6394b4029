// Acceptance suite: one check per shipped guarantee, each printed as a
// single PASS/FAIL line (SKIP when a gated dataset is absent). Exit code is
// the number of failures.

#include "rootcast/data.hpp"
#include "rootcast/estimators.hpp"
#include "rootcast/harness.hpp"
#include "rootcast/linalg.hpp"
#include "rootcast/roots.hpp"
#include "rootcast/rootpurge.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace rootcast;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using estimators::Domain;
using estimators::NormPolicy;

namespace {

struct Outcome {
    bool passed = false;
    bool skipped = false;
    std::string detail;
};

double series_variance(const VectorXd& x) {
    return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size());
}

MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::int64_t seed) {
    data::GaussianStream g(seed);
    MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = g.at(static_cast<std::uint64_t>(r * cols + c));
        }
    }
    return m;
}

series::SegmentSet raw_segments(MatrixXd history, MatrixXd future) {
    series::SegmentSet s;
    s.lookback = history.cols();
    s.horizon = future.cols();
    s.history = std::move(history);
    s.future = std::move(future);
    return s;
}

std::optional<std::string> find_etth1() {
    if (const char* dir = std::getenv("ROOTCAST_DATA_DIR")) {
        const auto path = std::filesystem::path(dir) / "ETTh1.csv";
        if (std::filesystem::exists(path)) return path.string();
    }
    for (const char* candidate :
         {"data/ETTh1.csv", "../data/ETTh1.csv", "../../data/ETTh1.csv"}) {
        if (std::filesystem::exists(candidate)) return std::string(candidate);
    }
    return std::nullopt;
}

series::SegmentSet stack_all(const std::vector<series::SegmentSet>& parts) {
    Eigen::Index rows = 0;
    for (const auto& p : parts) rows += p.count();
    series::SegmentSet out;
    out.lookback = parts[0].lookback;
    out.horizon = parts[0].horizon;
    out.history.resize(rows, out.lookback);
    out.future.resize(rows, out.horizon);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.history.middleRows(at, p.count()) = p.history;
        out.future.middleRows(at, p.count()) = p.future;
        at += p.count();
    }
    return out;
}

struct Etth1Splits {
    series::SegmentSet train, val, test;
};

Etth1Splits etth1_splits(const std::string& csv) {
    const auto ts = data::load_csv(csv, std::string("date"));
    const auto sp = data::split(ts, data::SplitSpec{}, 720);
    std::vector<series::SegmentSet> train_pc, val_pc, test_pc;
    for (Eigen::Index c = 0; c < ts.channels(); ++c) {
        train_pc.push_back(series::build_segments(sp.train, c, 720, 96));
        val_pc.push_back(series::build_segments(sp.val, c, 720, 96));
        test_pc.push_back(series::build_segments(sp.test, c, 720, 96));
    }
    return {stack_all(train_pc), stack_all(val_pc), stack_all(test_pc)};
}

// --------------------------------------------------------------------------
// 1. Noise-free exactness: OLS on an order-3 recurrence fits exactly.
// --------------------------------------------------------------------------
Outcome criterion_noise_free_exactness() {
    data::SyntheticSpec spec;
    spec.kind = data::SyntheticKind::custom_recurrence;
    const double c = std::cos(0.5);
    // roots {1, e^{+-0.5i}}: r^3 - (1+2c) r^2 + (1+2c) r - 1
    spec.coeffs = {1.0 + 2.0 * c, -(1.0 + 2.0 * c), 1.0};
    spec.init = {2.0, 2.4, 2.2};
    spec.t_end = 399.0;
    spec.dt = 1.0;
    const auto ts = data::generate_synthetic(spec);
    const double variance = series_variance(ts.values.col(0));

    double worst = 0.0;
    for (Eigen::Index L : {3, 8}) {
        const auto sp = data::split(ts, data::SplitSpec{}, L);
        for (Eigen::Index H : {1, 4}) {
            const auto train = series::build_segments(sp.train, 0, L, H);
            const auto test = series::build_segments(sp.test, 0, L, H);
            const auto model = estimators::fit_ols(train, NormPolicy::none);
            worst = std::max(worst, estimators::evaluate_mse(model, train) / variance);
            worst = std::max(worst, estimators::evaluate_mse(model, test) / variance);
        }
    }
    return {worst < 1e-10, false,
            "max train/test MSE over L in {3,8}, H in {1,4}: " + std::to_string(worst) +
                " x signal variance (limit 1e-10)"};
}

// --------------------------------------------------------------------------
// 2. Toy root generalization: 0.01 t^2 + sin t at unit steps, L=5, H=1.
// --------------------------------------------------------------------------
Outcome criterion_toy_roots() {
    data::SyntheticSpec spec;
    spec.kind = data::SyntheticKind::toy_quadratic;
    spec.t_end = 300.0;
    spec.dt = 1.0;  // unit sampling gives the e^{+-i} roots; see notes ledger
    const auto ts = data::generate_synthetic(spec);
    const auto model =
        estimators::fit_ols(series::build_segments(ts, 0, 5, 1), NormPolicy::none);

    VectorXd line_cos(200), detuned(200);
    for (Eigen::Index n = 0; n < 200; ++n) {
        line_cos[n] = static_cast<double>(n) + std::cos(static_cast<double>(n));
        detuned[n] = std::cos(1.1 * static_cast<double>(n));
    }
    const auto ok = roots::generalization_test(model, series::make_series(line_cos), 1e-6);
    const auto bad = roots::generalization_test(model, series::make_series(detuned), 0.01);

    roots::RootSet expected;
    expected.roots.resize(5);
    expected.roots << std::complex<double>(std::cos(1.0), std::sin(1.0)),
        std::complex<double>(std::cos(1.0), -std::sin(1.0)), std::complex<double>(1.0, 0.0),
        std::complex<double>(1.0, 0.0), std::complex<double>(1.0, 0.0);
    const double distance = roots::root_distance(roots::model_roots(model, 1), expected);

    const bool passed = ok.generalizes && !bad.generalizes && distance < 0.02;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "t+cos t MSE/var=%.2e (<1e-6), cos(1.1t) MSE/var=%.2e (>0.01), root distance "
                  "to {e^i, e^-i, 1,1,1}=%.4f (<0.02)",
                  ok.mse / ok.probe_variance, bad.mse / bad.probe_variance, distance);
    return {passed, false, detail};
}

// --------------------------------------------------------------------------
// 3. Eckart-Young identity on 50 random instances.
// --------------------------------------------------------------------------
Outcome criterion_eckart_young() {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index N = 10 + trial % 25;
        const Eigen::Index L = 3 + trial % 8;
        const Eigen::Index H = 2 + trial % 7;
        const auto train = raw_segments(gaussian(N, L, 100 + trial), gaussian(N, H, 200 + trial));
        const auto ols = estimators::fit_ols(train, NormPolicy::none);
        const auto svd = linalg::svd(ols.time_weight);
        const Eigen::Index rho = 1 + trial % std::min(L, H);
        const auto dwrr = estimators::fit_dwrr(train, rho, NormPolicy::none);
        double discarded = 0.0;
        for (Eigen::Index i = rho; i < svd.singular_values.size(); ++i) {
            discarded += svd.singular_values[i] * svd.singular_values[i];
        }
        const double deviation = (dwrr.time_weight - ols.time_weight).norm();
        worst = std::max(worst, std::abs(deviation - std::sqrt(discarded)) /
                                    std::max(1.0, ols.time_weight.norm()));
    }
    return {worst < 1e-10, false,
            "max |deviation - discarded energy| over 50 instances: " + std::to_string(worst) +
                " (limit 1e-10)"};
}

// --------------------------------------------------------------------------
// 4. Analytic purge gradient vs central finite differences.
// --------------------------------------------------------------------------
Outcome criterion_gradient() {
    double worst = 0.0;
    int cases = 0;
    const double step = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const Domain domain = trial % 2 == 0 ? Domain::time : Domain::frequency;
        const bool short_horizon = (trial / 2) % 2 == 0;
        const Eigen::Index L = short_horizon ? 6 : 4;
        const Eigen::Index H = short_horizon ? 3 : 7;
        const int order = 1 + trial % 3;

        const MatrixXd x = gaussian(5, L, 300 + trial);
        const MatrixXd y = gaussian(5, H, 400 + trial);
        estimators::LinearModel model;
        if (domain == Domain::time) {
            model = estimators::make_time_model(0.3 * gaussian(L, H, 500 + trial),
                                                NormPolicy::none);
        } else {
            MatrixXcd w =
                0.3 * (gaussian(L / 2 + 1, H / 2 + 1, 500 + trial).cast<std::complex<double>>() +
                       std::complex<double>(0, 1) *
                           gaussian(L / 2 + 1, H / 2 + 1, 600 + trial).cast<std::complex<double>>());
            model = estimators::make_frequency_model(std::move(w), L, H, NormPolicy::none);
        }
        rootpurge::PurgeConfig cfg;
        cfg.lambda = 0.3 + 0.1 * order;
        cfg.order = order;
        cfg.domain = domain;
        const auto analytic = rootpurge::purge_loss(model, x, y, cfg);

        double grad_scale = 0.0, max_diff = 0.0;
        auto probe = [&](double entry, auto&& bump) {
            auto plus = model, minus = model;
            bump(plus, step);
            bump(minus, -step);
            const double fd = (rootpurge::purge_loss(plus, x, y, cfg).loss -
                               rootpurge::purge_loss(minus, x, y, cfg).loss) /
                              (2.0 * step);
            max_diff = std::max(max_diff, std::abs(fd - entry));
            grad_scale = std::max(grad_scale, std::abs(entry));
        };
        if (domain == Domain::time) {
            for (Eigen::Index r = 0; r < L; ++r) {
                for (Eigen::Index cidx = 0; cidx < H; ++cidx) {
                    probe(analytic.time_gradient(r, cidx),
                          [&](estimators::LinearModel& m, double h) { m.time_weight(r, cidx) += h; });
                }
            }
        } else {
            for (Eigen::Index r = 0; r < model.freq_weight.rows(); ++r) {
                for (Eigen::Index cidx = 0; cidx < model.freq_weight.cols(); ++cidx) {
                    probe(analytic.freq_gradient(r, cidx).real(),
                          [&](estimators::LinearModel& m, double h) {
                              m.freq_weight(r, cidx) += std::complex<double>(h, 0);
                          });
                    probe(analytic.freq_gradient(r, cidx).imag(),
                          [&](estimators::LinearModel& m, double h) {
                              m.freq_weight(r, cidx) += std::complex<double>(0, h);
                          });
                }
            }
        }
        worst = std::max(worst, max_diff / (grad_scale + 1e-9));
        ++cases;
    }
    return {worst < 1e-5, false,
            "max relative gradient error over " + std::to_string(cases) +
                " configurations (both domains, H<L and H>=L, orders 1-3): " +
                std::to_string(worst) + " (limit 1e-5)"};
}

// --------------------------------------------------------------------------
// 5. Data-scaling on pure Gaussian noise.
// --------------------------------------------------------------------------
Outcome criterion_data_scaling() {
    data::SyntheticSpec base;
    base.kind = data::SyntheticKind::pure_noise;
    base.sigma = 1.0;

    nlohmann::json params;
    params["rank"] = 2;
    params["lambda"] = 0.5;
    params["domain"] = "frequency";
    params["max_epochs"] = 100;
    params["learning_rate"] = 1e-3;
    params["eval_length"] = Eigen::Index{4000};
    params["norm_policy"] = "none";

    std::vector<std::int64_t> seeds;
    for (int s = 0; s < 10; ++s) seeds.push_back(s);
    const auto result = harness::scaling_study(base, {2000, 8000, 32000}, {},
                                               {"ols", "rrr", "root_purge"}, seeds, 400, 20,
                                               params, "");

    std::map<std::pair<std::string, double>, double> mse, fro;
    std::map<std::pair<std::string, double>, int> count;
    for (const auto& p : result.size_curve) {
        mse[{p.estimator, p.x}] += p.test_mse;
        fro[{p.estimator, p.x}] += p.weight_fro * std::sqrt(p.x);
        count[{p.estimator, p.x}]++;
    }
    auto mean_mse = [&](const std::string& e, double x) { return mse[{e, x}] / count[{e, x}]; };

    double fro_min = 1e300, fro_max = 0.0;
    for (double t : {2000.0, 8000.0, 32000.0}) {
        const double v = fro[{"ols", t}] / count[{"ols", t}];
        fro_min = std::min(fro_min, v);
        fro_max = std::max(fro_max, v);
    }
    const double factor = fro_max / fro_min;

    bool regularized_ok = true;
    for (const std::string e : {"rrr", "root_purge"}) {
        for (double t : {2000.0, 8000.0, 32000.0}) {
            const double m = mean_mse(e, t);
            regularized_ok = regularized_ok && m > 0.9 && m < 1.1;
        }
    }
    const double ols_small = mean_mse("ols", 2000.0);
    const double ols_large = mean_mse("ols", 32000.0);
    const bool passed = factor < 2.0 && ols_large > 0.9 && ols_large < 1.1 && ols_small > 1.2 &&
                        regularized_ok;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "||W||_F sqrt(T) spread x%.3f (<2), OLS mse @2000=%.3f (>1.2) @32000=%.3f "
                  "(within 10%% of sigma^2=1), RRR/RootPurge within 10%% at every T: %s",
                  factor, ols_small, ols_large, regularized_ok ? "yes" : "no");
    return {passed, false, detail};
}

// --------------------------------------------------------------------------
// 6. Synthetic root recovery with Hungarian matching.
// --------------------------------------------------------------------------
Outcome criterion_root_recovery() {
    data::SyntheticSpec spec;
    spec.kind = data::SyntheticKind::trend_periodic;
    spec.t_end = 1000.0;
    spec.dt = 0.2;  // coarse enough that the six roots separate on the circle
    spec.sigma = 0.5;

    nlohmann::json params;
    params["norm_policy"] = "instance_mean";
    params["lambda"] = 0.5;
    params["learning_rate"] = 0.05;
    params["max_epochs"] = 2000;
    params["early_stop_patience"] = 0;
    params["domain"] = "frequency";

    const auto rows = harness::root_recovery_study(
        spec, 25, 25, {"ols", "rrr", "root_purge_irls", "gradient_plain"}, {0, 1, 2, 3, 4},
        params, "");
    std::map<std::string, double> mean;
    for (const auto& r : rows) mean[r.estimator] = r.mean_distance;

    const bool passed = mean["rrr"] <= 0.05 && mean["root_purge_irls"] <= 0.06 &&
                        mean["ols"] >= 0.04 && mean["ols"] <= 0.09 &&
                        mean["gradient_plain"] > mean["ols"];
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "mean distances: RRR=%.4f (<=0.05), RootPurge(IRLS)=%.4f (<=0.06), OLS=%.4f "
                  "(in [0.04,0.09]), gradient-plain=%.4f (> OLS)",
                  mean["rrr"], mean["root_purge_irls"], mean["ols"], mean["gradient_plain"]);
    return {passed, false, detail};
}

// --------------------------------------------------------------------------
// 7. IRLS descent and singular-value shrinkage.
// --------------------------------------------------------------------------
Outcome criterion_irls() {
    bool monotone = true, shrinks = true;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index L = 4 + trial % 4;
        MatrixXd x = gaussian(40, L, 700 + trial);
        MatrixXd y = 0.5 * x * gaussian(L, L, 800 + trial) + 0.8 * gaussian(40, L, 900 + trial);
        const auto train = raw_segments(std::move(x), std::move(y));
        rootpurge::IrlsDiagnostics diag;
        const auto model = rootpurge::fit_root_purge_irls(train, 0.5, 100, 1e-12,
                                                          NormPolicy::none, &diag);
        for (size_t i = 1; i < diag.objective.size(); ++i) {
            monotone = monotone && diag.objective[i] <= diag.objective[i - 1] + 1e-10;
        }
        const VectorXd s_star = linalg::svd(model.time_weight).singular_values;
        const VectorXd s_ols =
            linalg::svd(linalg::least_squares(train.history, train.future)).singular_values;
        for (Eigen::Index i = 0; i < L; ++i) {
            shrinks = shrinks && s_star[i] <= s_ols[i] + 1e-8;
        }
    }
    return {monotone && shrinks, false,
            std::string("objective non-increasing: ") + (monotone ? "yes" : "NO") +
                ", sigma_i(W*) <= sigma_i(W_OLS)+1e-8: " + (shrinks ? "yes" : "NO") +
                " on 20 random square instances"};
}

// --------------------------------------------------------------------------
// 8. Materialized time weights reproduce the frequency pipeline.
// --------------------------------------------------------------------------
Outcome criterion_freq_time_equivalence() {
    double worst = 0.0;
    for (const auto [L, H] : {std::pair<Eigen::Index, Eigen::Index>{16, 8},
                              std::pair<Eigen::Index, Eigen::Index>{720, 96}}) {
        MatrixXcd w =
            gaussian(L / 2 + 1, H / 2 + 1, 1000 + L).cast<std::complex<double>>() +
            std::complex<double>(0, 1) *
                gaussian(L / 2 + 1, H / 2 + 1, 2000 + L).cast<std::complex<double>>();
        const auto model = estimators::make_frequency_model(std::move(w), L, H, NormPolicy::none);
        const MatrixXd w_t = rootpurge::materialize_time_weight(model);
        for (int trial = 0; trial < 5; ++trial) {
            const MatrixXd rows = gaussian(4, L, 3000 + trial);
            const MatrixXd direct = rootpurge::freq_apply(model.freq_weight, rows, H);
            worst = std::max(worst, (rows * w_t - direct).norm() / (1.0 + direct.norm()));
        }
    }
    return {worst < 1e-10, false,
            "max relative mismatch over (L,H) in {(16,8),(720,96)}: " + std::to_string(worst) +
                " (limit 1e-10)"};
}

// --------------------------------------------------------------------------
// 9. ETTh1 benchmark reproduction (dataset-gated).
// --------------------------------------------------------------------------
Outcome criterion_etth1(const std::optional<std::string>& csv) {
    if (!csv) {
        return {true, true, "ETTh1.csv not found (set ROOTCAST_DATA_DIR or place data/ETTh1.csv)"};
    }
    const auto splits = etth1_splits(*csv);

    rootpurge::PurgeConfig cfg;
    cfg.domain = Domain::frequency;
    cfg.learning_rate = 0.05;
    cfg.max_epochs = 2000;
    cfg.early_stop_patience = 50;

    cfg.lambda = 0.0;
    const auto plain =
        rootpurge::train_root_purge(splits.train, splits.val, cfg, NormPolicy::instance_mean);
    const double plain_mse = estimators::evaluate_mse(plain, splits.test);

    cfg.lambda = 0.5;
    const auto purged =
        rootpurge::train_root_purge(splits.train, splits.val, cfg, NormPolicy::instance_mean);
    const double purge_mse = estimators::evaluate_mse(purged, splits.test);

    const auto sweep = estimators::rank_sweep(splits.train, splits.val, splits.test,
                                              estimators::RankMethod::rrr,
                                              NormPolicy::instance_mean);
    const double rrr_mse = sweep.test_mse[static_cast<size_t>(sweep.selected_rank - 1)];

    const bool passed = std::abs(plain_mse - 0.374) <= 0.01 &&
                        std::abs(purge_mse - 0.359) <= 0.01 && std::abs(rrr_mse - 0.367) <= 0.01;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "test MSE: plain lambda=0 %.4f (0.374 +- 0.01), root purge lambda=0.5 %.4f "
                  "(0.359 +- 0.01), RRR rank %lld %.4f (0.367 +- 0.01)",
                  plain_mse, purge_mse, static_cast<long long>(sweep.selected_rank), rrr_mse);
    return {passed, false, detail};
}

// --------------------------------------------------------------------------
// 10. Lambda-sensitivity shape.
// --------------------------------------------------------------------------
Outcome criterion_lambda_shape(const std::optional<std::string>& csv) {
    const std::vector<double> grid{1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0, 2.0};
    std::vector<double> curve(grid.size(), 0.0);
    std::string source;

    if (csv) {
        source = "ETTh1 H=96";
        const auto splits = etth1_splits(*csv);
        for (size_t i = 0; i < grid.size(); ++i) {
            rootpurge::PurgeConfig cfg;
            cfg.lambda = grid[i];
            cfg.domain = Domain::frequency;
            cfg.learning_rate = 0.05;
            cfg.max_epochs = 1000;
            cfg.early_stop_patience = 50;
            const auto model = rootpurge::train_root_purge(splits.train, splits.val, cfg,
                                                           NormPolicy::instance_mean);
            curve[i] = estimators::evaluate_mse(model, splits.test);
        }
    } else {
        source = "synthetic sigma=0.5 (square-case purge solver, 3 seeds)";
        const int n_seeds = 3;
        for (int seed = 0; seed < n_seeds; ++seed) {
            data::SyntheticSpec spec;
            spec.kind = data::SyntheticKind::trend_periodic;
            spec.t_end = 200.0;
            spec.dt = 0.2;
            spec.sigma = 0.5;
            spec.seed = seed;
            const auto ts = data::generate_synthetic(spec);
            const auto sp = data::split(ts, data::SplitSpec{{0.5, 0.25, 0.25}}, 48);
            const auto train = series::build_segments(sp.train, 0, 48, 48);
            const auto test = series::build_segments(sp.test, 0, 48, 48);
            for (size_t i = 0; i < grid.size(); ++i) {
                const auto model = rootpurge::fit_root_purge_irls(train, grid[i], 200, 1e-10,
                                                                  NormPolicy::instance_mean);
                curve[i] += estimators::evaluate_mse(model, test) / n_seeds;
            }
        }
    }

    size_t argmin = 0;
    for (size_t i = 1; i < curve.size(); ++i) {
        if (curve[i] < curve[argmin]) argmin = i;
    }
    const bool interior = argmin > 0 && argmin + 1 < curve.size();
    const bool edge_worse = curve.back() > curve[argmin];
    std::string values;
    for (double v : curve) values += (values.empty() ? "" : " ") + std::to_string(v).substr(0, 7);
    return {interior && edge_worse, false,
            source + ": MSE over lambda {1/32..2} = [" + values + "], min at lambda=" +
                std::to_string(grid[argmin]) + (interior ? " (interior)" : " (EDGE)") +
                ", lambda=2 exceeds min: " + (edge_worse ? "yes" : "NO")};
}

}  // namespace

int main() {
    const auto etth1 = find_etth1();

    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1. noise-free exactness (OLS on an order-3 recurrence)", criterion_noise_free_exactness},
        {"2. toy root generalization (quadratic + sine)", criterion_toy_roots},
        {"3. Eckart-Young identity for direct weight rank reduction", criterion_eckart_young},
        {"4. purge-loss analytic gradient vs finite differences", criterion_gradient},
        {"5. data-scaling on pure Gaussian noise", criterion_data_scaling},
        {"6. synthetic root recovery (Hungarian-matched distances)", criterion_root_recovery},
        {"7. IRLS descent and singular-value shrinkage", criterion_irls},
        {"8. frequency/time weight equivalence", criterion_freq_time_equivalence},
        {"9. ETTh1 benchmark reproduction [dataset-gated]",
         [&]() { return criterion_etth1(etth1); }},
        {"10. lambda-sensitivity curve shape", [&]() { return criterion_lambda_shape(etth1); }},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = fn();
        } catch (const std::exception& e) {
            outcome = {false, false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* verdict = outcome.skipped ? "SKIP" : (outcome.passed ? "PASS" : "FAIL");
        if (!outcome.skipped && !outcome.passed) ++failures;
        std::printf("[%s] %s (%.1fs)\n       %s\n", verdict, name.c_str(), elapsed,
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("acceptance: all criteria passed (gated criteria skip without the dataset)\n");
    } else {
        std::printf("acceptance: %d criterion(s) failed\n", failures);
    }
    return failures;
}
