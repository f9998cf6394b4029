#include "rootcast/harness.hpp"

#include "rootcast/linalg.hpp"
#include "rootcast/model_io.hpp"
#include "rootcast/roots.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace rootcast::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using series::SegmentSet;

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

namespace {

std::string estimator_name(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::ols: return "ols";
        case EstimatorKind::rrr: return "rrr";
        case EstimatorKind::dwrr: return "dwrr";
        case EstimatorKind::root_purge: return "root_purge";
        case EstimatorKind::root_purge_irls: return "root_purge_irls";
    }
    throw std::logic_error("estimator_name");
}

EstimatorKind estimator_from(const std::string& s) {
    if (s == "ols") return EstimatorKind::ols;
    if (s == "rrr") return EstimatorKind::rrr;
    if (s == "dwrr") return EstimatorKind::dwrr;
    if (s == "root_purge") return EstimatorKind::root_purge;
    if (s == "root_purge_irls") return EstimatorKind::root_purge_irls;
    throw std::invalid_argument("config: unknown estimator '" + s + "'");
}

std::string policy_name(NormPolicy p) {
    switch (p) {
        case NormPolicy::none: return "none";
        case NormPolicy::instance_mean: return "instance_mean";
        case NormPolicy::instance_mean_std: return "instance_mean_std";
    }
    throw std::logic_error("policy_name");
}

NormPolicy policy_from(const std::string& s) {
    if (s == "none") return NormPolicy::none;
    if (s == "instance_mean") return NormPolicy::instance_mean;
    if (s == "instance_mean_std") return NormPolicy::instance_mean_std;
    throw std::invalid_argument("config: unknown norm_policy '" + s + "'");
}

data::SyntheticKind synthetic_kind_from(const std::string& s) {
    if (s == "trend_periodic") return data::SyntheticKind::trend_periodic;
    if (s == "toy_quadratic") return data::SyntheticKind::toy_quadratic;
    if (s == "pure_noise") return data::SyntheticKind::pure_noise;
    if (s == "custom_recurrence") return data::SyntheticKind::custom_recurrence;
    throw std::invalid_argument("config: unknown synthetic kind '" + s + "'");
}

std::string synthetic_kind_name(data::SyntheticKind k) {
    switch (k) {
        case data::SyntheticKind::trend_periodic: return "trend_periodic";
        case data::SyntheticKind::toy_quadratic: return "toy_quadratic";
        case data::SyntheticKind::pure_noise: return "pure_noise";
        case data::SyntheticKind::custom_recurrence: return "custom_recurrence";
    }
    throw std::logic_error("synthetic_kind_name");
}

json synthetic_to_json(const data::SyntheticSpec& s) {
    json j;
    j["kind"] = synthetic_kind_name(s.kind);
    j["t_start"] = s.t_start;
    j["t_end"] = s.t_end;
    j["dt"] = s.dt;
    j["sigma"] = s.sigma;
    j["seed"] = s.seed;
    if (!s.coeffs.empty()) j["coeffs"] = s.coeffs;
    if (!s.init.empty()) j["init"] = s.init;
    return j;
}

data::SyntheticSpec synthetic_from_json(const json& j) {
    data::SyntheticSpec s;
    s.kind = synthetic_kind_from(j.at("kind").get<std::string>());
    if (j.contains("t_start")) s.t_start = j["t_start"].get<double>();
    if (j.contains("t_end")) s.t_end = j["t_end"].get<double>();
    if (j.contains("dt")) s.dt = j["dt"].get<double>();
    if (j.contains("sigma")) s.sigma = j["sigma"].get<double>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::int64_t>();
    if (j.contains("coeffs")) s.coeffs = j["coeffs"].get<std::vector<double>>();
    if (j.contains("init")) s.init = j["init"].get<std::vector<double>>();
    return s;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("name")) c.name = j["name"].get<std::string>();

    const json& d = j.at("dataset");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "csv") {
        c.dataset.kind = DatasetSource::Kind::csv;
        c.dataset.csv_path = d.at("path").get<std::string>();
        if (d.contains("date_column")) c.dataset.date_column = d["date_column"].get<std::string>();
        c.dataset.label = fs::path(c.dataset.csv_path).stem().string();
    } else if (kind == "synthetic") {
        c.dataset.kind = DatasetSource::Kind::synthetic;
        c.dataset.synthetic = synthetic_from_json(d.at("spec"));
        c.dataset.label = synthetic_kind_name(c.dataset.synthetic.kind);
    } else {
        throw std::invalid_argument("config: dataset.kind must be 'csv' or 'synthetic'");
    }
    if (d.contains("label")) c.dataset.label = d["label"].get<std::string>();

    if (j.contains("split")) {
        const auto r = j["split"].at("ratios").get<std::vector<double>>();
        if (r.size() != 3) throw std::invalid_argument("config: split.ratios needs 3 entries");
        c.split.ratios = {r[0], r[1], r[2]};
    }
    if (j.contains("lookback")) c.lookback = j["lookback"].get<Eigen::Index>();
    if (j.contains("horizons")) c.horizons = j["horizons"].get<std::vector<Eigen::Index>>();
    if (c.horizons.empty()) throw std::invalid_argument("config: horizons must be non-empty");
    if (j.contains("channel_strategy")) {
        const std::string s = j["channel_strategy"].get<std::string>();
        if (s == "ci") c.channel_strategy = ChannelStrategy::ci;
        else if (s == "inc") c.channel_strategy = ChannelStrategy::inc;
        else throw std::invalid_argument("config: channel_strategy must be 'ci' or 'inc'");
    }
    if (j.contains("estimator")) c.estimator = estimator_from(j["estimator"].get<std::string>());
    if (j.contains("norm_policy")) c.norm_policy = policy_from(j["norm_policy"].get<std::string>());
    if (j.contains("estimator_params")) c.estimator_params = j["estimator_params"];
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::int64_t>>();
    if (c.seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty");
    if (j.contains("outputs")) c.outputs = j["outputs"].get<std::string>();
    if (const char* env = std::getenv("ROOTCAST_OUTPUT_DIR")) c.outputs = env;
    if (j.contains("save_models")) c.save_models = j["save_models"].get<bool>();
    if (j.contains("save_spectrum")) c.save_spectrum = j["save_spectrum"].get<bool>();
    if (j.contains("spectrum_top_n")) c.spectrum_top_n = j["spectrum_top_n"].get<int>();
    if (j.contains("save_roots")) c.save_roots = j["save_roots"].get<bool>();
    if (j.contains("roots_horizon")) c.roots_horizon = j["roots_horizon"].get<Eigen::Index>();
    if (j.contains("workers")) c.workers = std::max(1, j["workers"].get<int>());
    if (j.contains("study")) c.study = j["study"];
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    json d;
    if (c.dataset.kind == DatasetSource::Kind::csv) {
        d["kind"] = "csv";
        d["path"] = c.dataset.csv_path;
        if (c.dataset.date_column) d["date_column"] = *c.dataset.date_column;
    } else {
        d["kind"] = "synthetic";
        d["spec"] = synthetic_to_json(c.dataset.synthetic);
    }
    d["label"] = c.dataset.label;
    j["dataset"] = std::move(d);
    j["split"] = {{"ratios", {c.split.ratios[0], c.split.ratios[1], c.split.ratios[2]}}};
    j["lookback"] = c.lookback;
    j["horizons"] = c.horizons;
    j["channel_strategy"] = c.channel_strategy == ChannelStrategy::ci ? "ci" : "inc";
    j["estimator"] = estimator_name(c.estimator);
    j["norm_policy"] = policy_name(c.norm_policy);
    j["estimator_params"] = c.estimator_params;
    j["seeds"] = c.seeds;
    j["outputs"] = c.outputs;
    j["save_models"] = c.save_models;
    j["save_spectrum"] = c.save_spectrum;
    j["spectrum_top_n"] = c.spectrum_top_n;
    j["save_roots"] = c.save_roots;
    j["roots_horizon"] = c.roots_horizon;
    j["workers"] = c.workers;
    j["study"] = c.study;
    return j;
}

void set_override(json& config, const std::string& dotted_key, const std::string& value) {
    json* node = &config;
    std::string rest = dotted_key;
    size_t dot;
    while ((dot = rest.find('.')) != std::string::npos) {
        node = &(*node)[rest.substr(0, dot)];
        rest = rest.substr(dot + 1);
    }
    json parsed = json::parse(value, nullptr, false);
    (*node)[rest] = parsed.is_discarded() ? json(value) : parsed;
}

std::string config_hash(const ExperimentConfig& config) {
    // Hash only the fields that determine the numbers; output location and
    // worker count are operational and must not split otherwise-identical
    // experiments.
    json j = config_to_json(config);
    j.erase("outputs");
    j.erase("workers");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SegmentSet stack_segments(const std::vector<SegmentSet>& parts) {
    if (parts.empty()) throw std::invalid_argument("stack_segments: nothing to stack");
    Eigen::Index rows = 0;
    for (const auto& p : parts) rows += p.count();
    SegmentSet out;
    out.lookback = parts[0].lookback;
    out.horizon = parts[0].horizon;
    out.mode = parts[0].mode;
    out.history.resize(rows, parts[0].lookback);
    out.future.resize(rows, parts[0].horizon);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.history.middleRows(at, p.count()) = p.history;
        out.future.middleRows(at, p.count()) = p.future;
        at += p.count();
    }
    return out;
}

/// Per-channel and channel-stacked segments of one train/val/test split.
struct PreparedSplits {
    std::vector<SegmentSet> train, val, test;  // per channel
    SegmentSet train_ci, val_ci, test_ci;
    Eigen::Index channels = 0;
};

PreparedSplits prepare_splits(const series::TimeSeries& full, const data::SplitSpec& split_spec,
                              Eigen::Index lookback, Eigen::Index horizon) {
    const data::Split sp = data::split(full, split_spec, lookback);
    PreparedSplits out;
    out.channels = full.channels();
    for (Eigen::Index c = 0; c < full.channels(); ++c) {
        out.train.push_back(series::build_segments(sp.train, c, lookback, horizon));
        out.val.push_back(series::build_segments(sp.val, c, lookback, horizon));
        out.test.push_back(series::build_segments(sp.test, c, lookback, horizon));
    }
    out.train_ci = stack_segments(out.train);
    out.val_ci = stack_segments(out.val);
    out.test_ci = stack_segments(out.test);
    return out;
}

rootpurge::PurgeConfig purge_config_from(const json& params, std::int64_t seed) {
    rootpurge::PurgeConfig cfg;
    if (params.contains("lambda")) cfg.lambda = params["lambda"].get<double>();
    if (params.contains("order")) cfg.order = params["order"].get<int>();
    if (params.contains("domain")) {
        const std::string d = params["domain"].get<std::string>();
        if (d == "time") cfg.domain = estimators::Domain::time;
        else if (d == "frequency") cfg.domain = estimators::Domain::frequency;
        else throw std::invalid_argument("purge config: unknown domain '" + d + "'");
    }
    if (params.contains("learning_rate")) cfg.learning_rate = params["learning_rate"].get<double>();
    if (params.contains("max_epochs")) cfg.max_epochs = params["max_epochs"].get<int>();
    if (params.contains("batch_size")) cfg.batch_size = params["batch_size"].get<Eigen::Index>();
    if (params.contains("early_stop_patience")) {
        cfg.early_stop_patience = params["early_stop_patience"].get<int>();
    }
    if (params.contains("init")) {
        const std::string i = params["init"].get<std::string>();
        if (i == "zeros") cfg.init = rootpurge::PurgeInit::zeros;
        else if (i == "ols_warm_start") cfg.init = rootpurge::PurgeInit::ols_warm_start;
        else throw std::invalid_argument("purge config: unknown init '" + i + "'");
    }
    if (params.contains("stop_gradient")) cfg.stop_gradient = params["stop_gradient"].get<bool>();
    cfg.seed = seed;
    return cfg;
}

struct FitOutcome {
    std::vector<LinearModel> models;  // one (CI) or one per channel (INC)
    double train_mse = 0.0;
    double val_mse = 0.0;
    double test_mse = 0.0;
    json artifacts = json::object();
};

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

/// Fit one estimator on one prepared split set and evaluate all three MSEs
/// in the original scale. `name` accepts the config estimators plus
/// "gradient_plain" (the purge trainer with lambda = 0) used by the studies.
FitOutcome fit_point(const std::string& name, ChannelStrategy strategy,
                     const PreparedSplits& splits, const json& params, std::int64_t seed,
                     NormPolicy policy) {
    FitOutcome out;

    const bool ci = strategy == ChannelStrategy::ci;
    const Eigen::Index groups = ci ? 1 : splits.channels;
    std::vector<double> train_mses, val_mses, test_mses;

    for (Eigen::Index g = 0; g < groups; ++g) {
        const SegmentSet& train = ci ? splits.train_ci : splits.train[static_cast<size_t>(g)];
        const SegmentSet& val = ci ? splits.val_ci : splits.val[static_cast<size_t>(g)];
        const SegmentSet& test = ci ? splits.test_ci : splits.test[static_cast<size_t>(g)];

        LinearModel model;
        double val_mse_override = -1.0;
        if (name == "ols") {
            model = estimators::fit_ols(train, policy);
        } else if (name == "rrr" || name == "dwrr") {
            const auto method =
                name == "rrr" ? estimators::RankMethod::rrr : estimators::RankMethod::dwrr;
            if (params.contains("rank") && params["rank"].is_number()) {
                const auto rank = params["rank"].get<Eigen::Index>();
                model = name == "rrr" ? estimators::fit_rrr(train, rank, policy)
                                      : estimators::fit_dwrr(train, rank, policy);
            } else {  // validation-selected rank
                const auto sweep = estimators::rank_sweep(train, val, test, method, policy);
                if (g == 0) {
                    out.artifacts["selected_rank"] = sweep.selected_rank;
                    out.artifacts["best_test_of_top3_val"] = estimators::best_test_among_top_val(sweep);
                }
                model = name == "rrr" ? estimators::fit_rrr(train, sweep.selected_rank, policy)
                                      : estimators::fit_dwrr(train, sweep.selected_rank, policy);
            }
        } else if (name == "root_purge" || name == "gradient_plain") {
            rootpurge::PurgeConfig cfg = purge_config_from(params, seed);
            if (name == "gradient_plain") cfg.lambda = 0.0;
            rootpurge::TrainDiagnostics diag;
            model = rootpurge::train_root_purge(train, val, cfg, policy, &diag);
            val_mse_override = diag.best_val_mse;
        } else if (name == "root_purge_irls") {
            const double lambda = params.value("lambda", 0.5);
            const int max_iters = params.value("max_iters", 100);
            const double tol = params.value("tol", 1e-10);
            model = rootpurge::fit_root_purge_irls(train, lambda, max_iters, tol, policy);
        } else {
            throw std::invalid_argument("fit_point: unknown estimator '" + name + "'");
        }

        train_mses.push_back(estimators::evaluate_mse(model, train));
        val_mses.push_back(val_mse_override >= 0.0 ? val_mse_override
                                                   : estimators::evaluate_mse(model, val));
        test_mses.push_back(estimators::evaluate_mse(model, test));
        out.models.push_back(std::move(model));
    }

    out.train_mse = mean_of(train_mses);
    out.val_mse = mean_of(val_mses);
    out.test_mse = mean_of(test_mses);
    return out;
}

/// Rank-sweep artifact: runs the sweep (CI: stacked; INC: averaged across
/// channels at each rank) and returns the curve plus the selected rank.
estimators::RankSweepResult sweep_point(estimators::RankMethod method, ChannelStrategy strategy,
                                        const PreparedSplits& splits, NormPolicy policy) {
    if (strategy == ChannelStrategy::ci) {
        return estimators::rank_sweep(splits.train_ci, splits.val_ci, splits.test_ci, method,
                                      policy);
    }
    estimators::RankSweepResult avg;
    for (Eigen::Index c = 0; c < splits.channels; ++c) {
        const auto sweep =
            estimators::rank_sweep(splits.train[static_cast<size_t>(c)],
                                   splits.val[static_cast<size_t>(c)],
                                   splits.test[static_cast<size_t>(c)], method, policy);
        if (c == 0) {
            avg = sweep;
        } else {
            for (size_t i = 0; i < avg.ranks.size(); ++i) {
                avg.val_mse[i] += sweep.val_mse[i];
                avg.test_mse[i] += sweep.test_mse[i];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(splits.channels);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < avg.ranks.size(); ++i) {
        avg.val_mse[i] *= inv;
        avg.test_mse[i] *= inv;
        if (avg.val_mse[i] < best) {
            best = avg.val_mse[i];
            avg.selected_rank = avg.ranks[i];
        }
    }
    return avg;
}

series::TimeSeries dataset_instance(const ExperimentConfig& config,
                                    const series::TimeSeries* cached_csv, std::int64_t seed) {
    if (config.dataset.kind == DatasetSource::Kind::csv) return *cached_csv;
    data::SyntheticSpec spec = config.dataset.synthetic;
    spec.seed = seed;
    return data::generate_synthetic(spec);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_rank_curve_csv(const fs::path& path, const estimators::RankSweepResult& sweep) {
    std::string text = "rank,val_mse,test_mse\n";
    for (size_t i = 0; i < sweep.ranks.size(); ++i) {
        text += std::to_string(sweep.ranks[i]) + "," + fmt_double(sweep.val_mse[i]) + "," +
                fmt_double(sweep.test_mse[i]) + "\n";
    }
    write_text(path, text);
}

}  // namespace

// ---------------------------------------------------------------------------
// run_experiment
// ---------------------------------------------------------------------------

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config) {
    const std::string hash = config_hash(config);
    const fs::path out_dir(config.outputs);
    fs::create_directories(out_dir);
    write_text(out_dir / "config.json", config_to_json(config).dump(2) + "\n");

    series::TimeSeries csv_cache;
    if (config.dataset.kind == DatasetSource::Kind::csv) {
        csv_cache = data::load_csv(config.dataset.csv_path, config.dataset.date_column);
    }

    // Expand the parameter grid: a lambda_grid or rank_grid key becomes one
    // grid point per value; anything else is a single point.
    std::vector<json> param_points;
    if (config.estimator_params.contains("lambda_grid")) {
        for (const auto& v : config.estimator_params["lambda_grid"]) {
            json p = config.estimator_params;
            p.erase("lambda_grid");
            p["lambda"] = v;
            param_points.push_back(std::move(p));
        }
    } else if (config.estimator_params.contains("rank_grid")) {
        for (const auto& v : config.estimator_params["rank_grid"]) {
            json p = config.estimator_params;
            p.erase("rank_grid");
            p["rank"] = v;
            param_points.push_back(std::move(p));
        }
    } else {
        param_points.push_back(config.estimator_params);
    }

    struct GridPoint {
        Eigen::Index horizon;
        std::int64_t seed;
        json params;
    };
    std::vector<GridPoint> grid;
    for (Eigen::Index h : config.horizons) {
        for (std::int64_t seed : config.seeds) {
            for (const json& p : param_points) grid.push_back({h, seed, p});
        }
    }

    std::vector<ResultRecord> records(grid.size());
    const std::string est_name = estimator_name(config.estimator);

    auto run_point = [&](size_t idx) {
        const GridPoint& gp = grid[idx];
        ResultRecord& rec = records[idx];
        rec.experiment = config.name;
        rec.dataset = config.dataset.label;
        rec.config_id = hash;
        rec.lookback = config.lookback;
        rec.horizon = gp.horizon;
        rec.estimator = est_name;
        rec.params = gp.params;
        rec.seed = gp.seed;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const series::TimeSeries ts = dataset_instance(config, &csv_cache, gp.seed);
            const PreparedSplits splits =
                prepare_splits(ts, config.split, config.lookback, gp.horizon);

            const bool wants_sweep = (config.estimator == EstimatorKind::rrr ||
                                      config.estimator == EstimatorKind::dwrr) &&
                                     !(gp.params.contains("rank") && gp.params["rank"].is_number());
            FitOutcome outcome;
            if (wants_sweep) {
                const auto method = config.estimator == EstimatorKind::rrr
                                        ? estimators::RankMethod::rrr
                                        : estimators::RankMethod::dwrr;
                const auto sweep = sweep_point(method, config.channel_strategy, splits,
                                               config.norm_policy);
                const std::string curve_name = "rank_curve_H" + std::to_string(gp.horizon) +
                                               "_seed" + std::to_string(gp.seed) + ".csv";
                write_rank_curve_csv(out_dir / curve_name, sweep);
                json params_fixed = gp.params;
                params_fixed["rank"] = sweep.selected_rank;
                outcome = fit_point(est_name, config.channel_strategy, splits, params_fixed,
                                    gp.seed, config.norm_policy);
                outcome.artifacts["rank_curve"] = curve_name;
                outcome.artifacts["selected_rank"] = sweep.selected_rank;
                outcome.artifacts["best_test_of_top3_val"] =
                    estimators::best_test_among_top_val(sweep);
            } else {
                outcome = fit_point(est_name, config.channel_strategy, splits, gp.params, gp.seed,
                                    config.norm_policy);
            }

            const std::string tag =
                "H" + std::to_string(gp.horizon) + "_seed" + std::to_string(gp.seed);
            if (config.save_models) {
                for (size_t m = 0; m < outcome.models.size(); ++m) {
                    const std::string file = outcome.models.size() == 1
                                                 ? "model_" + tag + ".json"
                                                 : "model_" + tag + "_c" + std::to_string(m) + ".json";
                    model_io::save_model(outcome.models[m], (out_dir / file).string());
                    outcome.artifacts["models"].push_back(file);
                }
            }
            if (config.save_spectrum) {
                const auto values = spectrum_report(outcome.models[0], config.spectrum_top_n);
                std::string text = "index,singular_value\n";
                for (size_t i = 0; i < values.size(); ++i) {
                    text += std::to_string(i + 1) + "," + fmt_double(values[i]) + "\n";
                }
                const std::string file = "spectrum_" + tag + ".csv";
                write_text(out_dir / file, text);
                outcome.artifacts["spectrum"] = file;
            }
            if (config.save_roots) {
                const auto set = roots::model_roots(outcome.models[0], config.roots_horizon);
                const std::string file = "roots_" + tag + ".json";
                write_text(out_dir / file, roots::to_json(set) + "\n");
                outcome.artifacts["roots"] = file;
            }

            rec.train_mse = outcome.train_mse;
            rec.val_mse = outcome.val_mse;
            rec.test_mse = outcome.test_mse;
            rec.artifacts = outcome.artifacts;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    if (config.workers <= 1 || grid.size() <= 1) {
        for (size_t i = 0; i < grid.size(); ++i) run_point(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        const int n_workers = std::min<int>(config.workers, static_cast<int>(grid.size()));
        for (int w = 0; w < n_workers; ++w) {
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
                    run_point(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    // Records are written in grid order so output bytes do not depend on
    // scheduling; timing goes to meta.jsonl keyed by record index.
    std::string records_text, meta_text;
    for (size_t i = 0; i < records.size(); ++i) {
        const ResultRecord& r = records[i];
        json j;
        j["experiment"] = r.experiment;
        j["dataset"] = r.dataset;
        j["config"] = r.config_id;
        j["lookback"] = r.lookback;
        j["horizon"] = r.horizon;
        j["estimator"] = r.estimator;
        j["params"] = r.params;
        j["seed"] = r.seed;
        if (r.ok()) {
            j["train_mse"] = r.train_mse;
            j["val_mse"] = r.val_mse;
            j["test_mse"] = r.test_mse;
            j["artifacts"] = r.artifacts;
        } else {
            j["error"] = r.error;
        }
        records_text += j.dump() + "\n";
        json m;
        m["record"] = i;
        m["wall_seconds"] = r.wall_seconds;
        m["written_at"] = iso_now();
        meta_text += m.dump() + "\n";
    }
    write_text(out_dir / "records.jsonl", records_text);
    write_text(out_dir / "meta.jsonl", meta_text);

    // summary.csv: per (dataset, estimator, params, L, H), mean/std over seeds.
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<const ResultRecord*>> groups;
    for (const auto& r : records) {
        if (!r.ok()) continue;
        const std::string key = r.dataset + "|" + r.estimator + "|" + r.params.dump() + "|" +
                                std::to_string(r.lookback) + "|" + std::to_string(r.horizon);
        if (groups.find(key) == groups.end()) group_order.push_back(key);
        groups[key].push_back(&r);
    }
    std::string summary =
        "dataset,estimator,params,lookback,horizon,n_seeds,"
        "train_mse_mean,train_mse_std,val_mse_mean,val_mse_std,test_mse_mean,test_mse_std\n";
    for (const auto& key : group_order) {
        const auto& rs = groups[key];
        std::vector<double> tr, va, te;
        for (const auto* r : rs) {
            tr.push_back(r->train_mse);
            va.push_back(r->val_mse);
            te.push_back(r->test_mse);
        }
        const ResultRecord* first = rs.front();
        summary += first->dataset + "," + first->estimator + ",\"" + first->params.dump() + "\"," +
                   std::to_string(first->lookback) + "," + std::to_string(first->horizon) + "," +
                   std::to_string(rs.size()) + "," + fmt_double(mean_of(tr)) + "," +
                   fmt_double(std_of(tr)) + "," + fmt_double(mean_of(va)) + "," +
                   fmt_double(std_of(va)) + "," + fmt_double(mean_of(te)) + "," +
                   fmt_double(std_of(te)) + "\n";
    }
    write_text(out_dir / "summary.csv", summary);
    return records;
}

// ---------------------------------------------------------------------------
// Reports and studies
// ---------------------------------------------------------------------------

std::vector<double> spectrum_report(const LinearModel& model, int top_n) {
    const Eigen::MatrixXd w = rootpurge::materialize_time_weight(model);
    const auto s = linalg::svd(w);
    const int count = std::min<int>(top_n, static_cast<int>(s.singular_values.size()));
    std::vector<double> out(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<size_t>(i)] = s.singular_values[i];
    return out;
}

namespace {

// Derived stream seeds keep train/val/test noise independent per base seed.
constexpr std::int64_t kValSeedOffset = 7'000'003;
constexpr std::int64_t kTestSeedOffset = 14'000'003;

PreparedSplits pure_noise_splits(const data::SyntheticSpec& base, Eigen::Index train_len,
                                 Eigen::Index eval_len, std::int64_t seed, Eigen::Index lookback,
                                 Eigen::Index horizon) {
    auto make = [&](Eigen::Index len, std::int64_t s) {
        data::SyntheticSpec spec = base;
        spec.seed = s;
        spec.t_start = 0.0;
        spec.dt = 1.0;
        spec.t_end = static_cast<double>(len - 1);
        return data::generate_synthetic(spec);
    };
    PreparedSplits out;
    out.channels = 1;
    out.train.push_back(series::build_segments(make(train_len, seed), 0, lookback, horizon));
    out.val.push_back(
        series::build_segments(make(eval_len, seed + kValSeedOffset), 0, lookback, horizon));
    out.test.push_back(
        series::build_segments(make(eval_len, seed + kTestSeedOffset), 0, lookback, horizon));
    out.train_ci = out.train[0];
    out.val_ci = out.val[0];
    out.test_ci = out.test[0];
    return out;
}

PreparedSplits signal_splits(const data::SyntheticSpec& base, std::optional<Eigen::Index> train_len,
                             std::int64_t seed, Eigen::Index lookback, Eigen::Index horizon,
                             const data::SplitSpec& ratios) {
    data::SyntheticSpec spec = base;
    spec.seed = seed;
    const series::TimeSeries ts = data::generate_synthetic(spec);
    data::Split sp = data::split(ts, ratios, lookback);
    if (train_len && *train_len < sp.train.length()) {
        // Keep the points adjacent to the validation boundary so shrinking the
        // training set does not shift the evaluation distribution.
        series::TimeSeries truncated;
        truncated.values = sp.train.values.bottomRows(*train_len);
        truncated.channel_names = sp.train.channel_names;
        sp.train = std::move(truncated);
    }
    PreparedSplits out;
    out.channels = 1;
    out.train.push_back(series::build_segments(sp.train, 0, lookback, horizon));
    out.val.push_back(series::build_segments(sp.val, 0, lookback, horizon));
    out.test.push_back(series::build_segments(sp.test, 0, lookback, horizon));
    out.train_ci = out.train[0];
    out.val_ci = out.val[0];
    out.test_ci = out.test[0];
    return out;
}

}  // namespace

ScalingStudyResult scaling_study(const data::SyntheticSpec& base,
                                 const std::vector<Eigen::Index>& train_sizes,
                                 const std::vector<double>& noise_levels,
                                 const std::vector<std::string>& estimator_names,
                                 const std::vector<std::int64_t>& seeds, Eigen::Index lookback,
                                 Eigen::Index horizon, const json& params,
                                 const std::string& outputs) {
    if (estimator_names.empty() || seeds.empty()) {
        throw std::invalid_argument("scaling_study: empty estimator or seed list");
    }
    const bool noise_kind = base.kind == data::SyntheticKind::pure_noise;
    const NormPolicy policy = policy_from(params.value("norm_policy", noise_kind
                                                           ? std::string("none")
                                                           : std::string("instance_mean")));
    const auto eval_len = params.value("eval_length", Eigen::Index{4000});
    const data::SplitSpec ratios{{0.5, 0.25, 0.25}};

    ScalingStudyResult result;
    auto run_cell = [&](const data::SyntheticSpec& spec, std::optional<Eigen::Index> size,
                        double x, std::int64_t seed, std::vector<ScalingPoint>& sink) {
        const PreparedSplits splits =
            noise_kind ? pure_noise_splits(spec, size.value_or(eval_len), eval_len, seed, lookback,
                                           horizon)
                       : signal_splits(spec, size, seed, lookback, horizon, ratios);
        for (const auto& name : estimator_names) {
            FitOutcome fit = fit_point(name, ChannelStrategy::ci, splits, params, seed, policy);
            ScalingPoint p;
            p.estimator = name;
            p.x = x;
            p.seed = seed;
            p.test_mse = fit.test_mse;
            p.weight_fro = rootpurge::materialize_time_weight(fit.models[0]).norm();
            sink.push_back(std::move(p));
        }
    };

    for (Eigen::Index size : train_sizes) {
        for (std::int64_t seed : seeds) {
            run_cell(base, size, static_cast<double>(size), seed, result.size_curve);
        }
    }
    for (double sigma : noise_levels) {
        data::SyntheticSpec spec = base;
        spec.sigma = sigma;
        for (std::int64_t seed : seeds) {
            run_cell(spec, std::nullopt, sigma, seed, result.noise_curve);
        }
    }

    if (!outputs.empty()) {
        fs::create_directories(outputs);
        auto dump = [&](const std::vector<ScalingPoint>& pts, const std::string& x_name,
                        const std::string& file) {
            std::string text = "estimator," + x_name + ",seed,test_mse,weight_fro\n";
            for (const auto& p : pts) {
                text += p.estimator + "," + fmt_double(p.x) + "," + std::to_string(p.seed) + "," +
                        fmt_double(p.test_mse) + "," + fmt_double(p.weight_fro) + "\n";
            }
            write_text(fs::path(outputs) / file, text);
        };
        dump(result.size_curve, "train_size", "scaling_size.csv");
        dump(result.noise_curve, "sigma", "scaling_noise.csv");
    }
    return result;
}

std::vector<RootRecoveryRow> root_recovery_study(const data::SyntheticSpec& spec,
                                                 Eigen::Index lookback, Eigen::Index horizon,
                                                 const std::vector<std::string>& estimator_names,
                                                 const std::vector<std::int64_t>& seeds,
                                                 const json& params, const std::string& outputs) {
    if (spec.sigma <= 0.0) {
        throw std::invalid_argument("root_recovery_study: spec needs sigma > 0 (noise-free is the reference)");
    }
    const NormPolicy policy = policy_from(params.value("norm_policy", std::string("none")));
    const data::SplitSpec ratios{{0.5, 0.25, 0.25}};
    const auto root_horizon = params.value("roots_horizon", Eigen::Index{1});

    // Reference: min-norm fit on the clean signal.
    data::SyntheticSpec clean = spec;
    clean.sigma = 0.0;
    const PreparedSplits clean_splits = signal_splits(clean, std::nullopt, spec.seed, lookback,
                                                      horizon, ratios);
    const LinearModel reference = estimators::fit_ols(clean_splits.train_ci, policy);
    const roots::RootSet reference_roots = roots::model_roots(reference, root_horizon);

    std::vector<RootRecoveryRow> rows;
    for (const auto& name : estimator_names) {
        RootRecoveryRow row;
        row.estimator = name;
        for (std::int64_t seed : seeds) {
            const PreparedSplits splits = signal_splits(spec, std::nullopt, seed, lookback,
                                                        horizon, ratios);
            const FitOutcome fit = fit_point(name, ChannelStrategy::ci, splits, params, seed,
                                             policy);
            const roots::RootSet learned = roots::model_roots(fit.models[0], root_horizon);
            row.per_seed.push_back(roots::root_distance(learned, reference_roots));
        }
        row.mean_distance = mean_of(row.per_seed);
        row.std_distance = std_of(row.per_seed);
        rows.push_back(std::move(row));
    }

    if (!outputs.empty()) {
        fs::create_directories(outputs);
        std::string text = "estimator,mean_distance,std_distance,n_seeds\n";
        for (const auto& r : rows) {
            text += r.estimator + "," + fmt_double(r.mean_distance) + "," +
                    fmt_double(r.std_distance) + "," + std::to_string(r.per_seed.size()) + "\n";
        }
        write_text(fs::path(outputs) / "root_recovery.csv", text);
    }
    return rows;
}

std::vector<CiIncRow> ci_inc_comparison(const ExperimentConfig& config) {
    series::TimeSeries csv_cache;
    if (config.dataset.kind == DatasetSource::Kind::csv) {
        csv_cache = data::load_csv(config.dataset.csv_path, config.dataset.date_column);
    }

    std::vector<CiIncRow> rows;
    for (Eigen::Index h : config.horizons) {
        for (const auto strategy : {ChannelStrategy::ci, ChannelStrategy::inc}) {
            for (const std::string method : {"plain", "root_purge"}) {
                std::vector<double> per_seed;
                for (std::int64_t seed : config.seeds) {
                    const series::TimeSeries ts = dataset_instance(config, &csv_cache, seed);
                    const PreparedSplits splits = prepare_splits(ts, config.split, config.lookback, h);
                    const FitOutcome fit =
                        fit_point(method == "plain" ? "gradient_plain" : "root_purge", strategy,
                                  splits, config.estimator_params, seed, config.norm_policy);
                    per_seed.push_back(fit.test_mse);
                }
                CiIncRow row;
                row.strategy = strategy == ChannelStrategy::ci ? "ci" : "inc";
                row.method = method;
                row.horizon = h;
                row.test_mse = mean_of(per_seed);
                rows.push_back(std::move(row));
            }
        }
    }

    fs::create_directories(config.outputs);
    std::string text = "strategy,method,horizon,test_mse\n";
    for (const auto& r : rows) {
        text += r.strategy + "," + r.method + "," + std::to_string(r.horizon) + "," +
                fmt_double(r.test_mse) + "\n";
    }
    write_text(fs::path(config.outputs) / "ci_inc.csv", text);
    return rows;
}

void run_study(const ExperimentConfig& config) {
    const std::string kind = config.study.value("kind", std::string());
    if (kind == "scaling") {
        const auto sizes = config.study.value("train_sizes", std::vector<Eigen::Index>{});
        const auto noises = config.study.value("noise_levels", std::vector<double>{});
        const auto names = config.study.value("estimators",
                                              std::vector<std::string>{"ols", "rrr", "root_purge"});
        scaling_study(config.dataset.synthetic, sizes, noises, names, config.seeds,
                      config.lookback, config.horizons.at(0), config.estimator_params,
                      config.outputs);
    } else if (kind == "root_recovery") {
        const auto names = config.study.value(
            "estimators",
            std::vector<std::string>{"ols", "rrr", "root_purge", "gradient_plain"});
        root_recovery_study(config.dataset.synthetic, config.lookback, config.horizons.at(0),
                            names, config.seeds, config.estimator_params, config.outputs);
    } else if (kind == "ci_inc") {
        ci_inc_comparison(config);
    } else if (kind == "lambda_sensitivity") {
        ExperimentConfig grid = config;
        grid.estimator = EstimatorKind::root_purge;
        grid.estimator_params["lambda_grid"] =
            config.study.value("lambda_grid", std::vector<double>{0.03125, 0.0625, 0.125, 0.25,
                                                                  0.5, 1.0, 2.0});
        run_experiment(grid);
    } else {
        throw std::invalid_argument("run_study: unknown study kind '" + kind + "'");
    }
}

}  // namespace rootcast::harness
