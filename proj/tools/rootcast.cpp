// Command-line front end: thin adapters over the library. Exit codes:
// 0 success, 1 configuration error (reported before any computation),
// 2 runtime failure.

#include "rootcast/data.hpp"
#include "rootcast/estimators.hpp"
#include "rootcast/harness.hpp"
#include "rootcast/model_io.hpp"
#include "rootcast/roots.hpp"
#include "rootcast/rootpurge.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using rootcast::harness::ExperimentConfig;

struct CliOptions {
    std::string subcommand;
    std::string config_path;
    std::vector<std::string> overrides;
    int workers = 0;  // 0 = keep config value
    bool quiet = false;
};

json load_config_json(const CliOptions& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + opts.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config file " + opts.config_path + " is not valid JSON: " +
                                    e.what());
    }
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("override '" + kv + "' is not of the form key=value");
        }
        rootcast::harness::set_override(j, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return j;
}

void echo_config(const ExperimentConfig& config) {
    fs::create_directories(config.outputs);
    std::ofstream out(fs::path(config.outputs) / "config.json");
    out << rootcast::harness::config_to_json(config).dump(2) << "\n";
}

rootcast::estimators::LinearModel obtain_model(const ExperimentConfig& config,
                                               const json& raw_config) {
    if (config.estimator_params.contains("model_path")) {
        return rootcast::model_io::load_model(
            config.estimator_params["model_path"].get<std::string>());
    }
    ExperimentConfig fit = config;
    fit.save_models = true;
    fit.horizons = {config.horizons.at(0)};
    fit.seeds = {config.seeds.at(0)};
    const auto records = rootcast::harness::run_experiment(fit);
    if (!records.at(0).ok()) throw std::runtime_error("model fit failed: " + records.at(0).error);
    const std::string file = records.at(0).artifacts.at("models").at(0).get<std::string>();
    (void)raw_config;
    return rootcast::model_io::load_model((fs::path(config.outputs) / file).string());
}

int dispatch(const CliOptions& opts, const json& raw, const ExperimentConfig& config) {
    using rootcast::harness::run_experiment;

    if (opts.subcommand == "train" || opts.subcommand == "purge") {
        const auto records = run_experiment(config);
        size_t failures = 0;
        for (const auto& r : records) {
            if (!r.ok()) {
                ++failures;
                std::cerr << "grid point failed: " << r.error << "\n";
            } else if (!opts.quiet) {
                std::cout << r.dataset << " H=" << r.horizon << " seed=" << r.seed
                          << " test_mse=" << r.test_mse << "\n";
            }
        }
        if (failures == records.size()) throw std::runtime_error("every grid point failed");
        if (!opts.quiet) std::cout << "results written to " << config.outputs << "\n";
        return 0;
    }
    if (opts.subcommand == "sweep-rank") {
        ExperimentConfig sweep = config;
        if (sweep.estimator != rootcast::harness::EstimatorKind::rrr &&
            sweep.estimator != rootcast::harness::EstimatorKind::dwrr) {
            sweep.estimator = rootcast::harness::EstimatorKind::rrr;
        }
        sweep.estimator_params.erase("rank");  // non-numeric rank triggers the sweep
        const auto records = run_experiment(sweep);
        for (const auto& r : records) {
            if (!r.ok()) throw std::runtime_error("sweep failed: " + r.error);
            if (!opts.quiet) {
                std::cout << "H=" << r.horizon << " selected_rank="
                          << r.artifacts.value("selected_rank", Eigen::Index{0})
                          << " test_mse=" << r.test_mse << "\n";
            }
        }
        return 0;
    }
    if (opts.subcommand == "eval") {
        echo_config(config);
        const auto model = obtain_model(config, raw);
        ExperimentConfig like = config;
        const auto ts = config.dataset.kind == rootcast::harness::DatasetSource::Kind::csv
                            ? rootcast::data::load_csv(config.dataset.csv_path,
                                                       config.dataset.date_column)
                            : rootcast::data::generate_synthetic(config.dataset.synthetic);
        const auto split = rootcast::data::split(ts, config.split, model.lookback);
        double mse_sum = 0.0;
        for (Eigen::Index c = 0; c < ts.channels(); ++c) {
            const auto segments = rootcast::series::build_segments(split.test, c, model.lookback,
                                                                   model.horizon);
            mse_sum += rootcast::estimators::evaluate_mse(model, segments);
        }
        const double mse = mse_sum / static_cast<double>(ts.channels());
        json out;
        out["test_mse"] = mse;
        std::ofstream f(fs::path(config.outputs) / "eval.json");
        f << out.dump(2) << "\n";
        if (!opts.quiet) std::cout << "test_mse=" << mse << "\n";
        (void)like;
        return 0;
    }
    if (opts.subcommand == "roots") {
        echo_config(config);
        const auto model = obtain_model(config, raw);
        Eigen::Index horizon_index = config.roots_horizon;
        if (raw.contains("horizon")) horizon_index = raw["horizon"].get<Eigen::Index>();
        const auto set = rootcast::roots::model_roots(model, horizon_index);
        std::ofstream f(fs::path(config.outputs) / "roots.json");
        f << rootcast::roots::to_json(set) << "\n";
        if (!opts.quiet) {
            std::cout << set.roots.size() << " roots written to "
                      << (fs::path(config.outputs) / "roots.json").string() << "\n";
        }
        return 0;
    }
    if (opts.subcommand == "synth") {
        echo_config(config);
        const auto ts = rootcast::data::generate_synthetic(config.dataset.synthetic);
        std::ofstream f(fs::path(config.outputs) / "synthetic.csv");
        for (size_t c = 0; c < ts.channel_names.size(); ++c) {
            f << (c ? "," : "") << ts.channel_names[c];
        }
        f << "\n";
        f.precision(17);
        for (Eigen::Index r = 0; r < ts.length(); ++r) {
            for (Eigen::Index c = 0; c < ts.channels(); ++c) {
                f << (c ? "," : "") << ts.values(r, c);
            }
            f << "\n";
        }
        if (!opts.quiet) {
            std::cout << ts.length() << " samples written to "
                      << (fs::path(config.outputs) / "synthetic.csv").string() << "\n";
        }
        return 0;
    }
    if (opts.subcommand == "spectrum") {
        echo_config(config);
        const auto model = obtain_model(config, raw);
        const auto values = rootcast::harness::spectrum_report(model, config.spectrum_top_n);
        std::ofstream f(fs::path(config.outputs) / "spectrum.csv");
        f << "index,singular_value\n";
        f.precision(17);
        for (size_t i = 0; i < values.size(); ++i) f << i + 1 << "," << values[i] << "\n";
        if (!opts.quiet) {
            std::cout << values.size() << " singular values written to "
                      << (fs::path(config.outputs) / "spectrum.csv").string() << "\n";
        }
        return 0;
    }
    if (opts.subcommand == "study") {
        echo_config(config);
        rootcast::harness::run_study(config);
        if (!opts.quiet) std::cout << "study results written to " << config.outputs << "\n";
        return 0;
    }
    throw std::logic_error("unhandled subcommand " + opts.subcommand);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rootcast: linear forecasting with characteristic-root restructuring"};
    app.require_subcommand(1);

    CliOptions opts;
    for (const auto& name : {"train", "eval", "sweep-rank", "purge", "roots", "synth",
                             "spectrum", "study"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
        sub->add_option("--overrides", opts.overrides,
                        "dotted-path overrides, e.g. estimator_params.lambda=0.5");
        sub->add_option("--workers", opts.workers, "concurrent grid points");
        sub->add_flag("--quiet", opts.quiet, "suppress progress output");
        sub->callback([&opts, name]() { opts.subcommand = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    // Configuration stage: any failure here exits 1 before computation starts.
    json raw;
    ExperimentConfig config;
    try {
        raw = load_config_json(opts);
        config = rootcast::harness::config_from_json(raw);
        if (opts.workers > 0) config.workers = opts.workers;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    try {
        return dispatch(opts, raw, config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
