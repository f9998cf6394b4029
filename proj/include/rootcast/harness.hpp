#ifndef ROOTCAST_HARNESS_HPP
#define ROOTCAST_HARNESS_HPP

#include "rootcast/data.hpp"
#include "rootcast/estimators.hpp"
#include "rootcast/rootpurge.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Experiment orchestration: the benchmark pipeline, lambda and rank grids,
// singular-value spectra, data-scaling and noise-robustness curves, the
// CI-vs-INC comparison, and the synthetic root-recovery study. Reruns with
// an identical config produce byte-identical records; wall-clock timings
// live in a separate metadata file.
namespace rootcast::harness {

using estimators::LinearModel;
using estimators::NormPolicy;

enum class EstimatorKind { ols, rrr, dwrr, root_purge, root_purge_irls };
enum class ChannelStrategy { ci, inc };

struct DatasetSource {
    enum class Kind { csv, synthetic };
    Kind kind = Kind::synthetic;
    std::string csv_path;
    std::optional<std::string> date_column;
    data::SyntheticSpec synthetic;
    std::string label;
};

struct ExperimentConfig {
    std::string name = "experiment";
    DatasetSource dataset;
    data::SplitSpec split;
    Eigen::Index lookback = 720;
    std::vector<Eigen::Index> horizons{96};
    ChannelStrategy channel_strategy = ChannelStrategy::ci;
    EstimatorKind estimator = EstimatorKind::ols;
    NormPolicy norm_policy = NormPolicy::instance_mean;
    nlohmann::json estimator_params = nlohmann::json::object();
    std::vector<std::int64_t> seeds{0};
    std::string outputs = "runs/experiment";
    bool save_models = false;
    bool save_spectrum = false;
    int spectrum_top_n = 336;
    bool save_roots = false;
    Eigen::Index roots_horizon = 1;
    int workers = 1;
    nlohmann::json study = nlohmann::json::object();
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Dotted-path override, e.g. set_override(j, "estimator_params.lambda", "0.5").
/// Values parse as JSON when possible and fall back to strings.
void set_override(nlohmann::json& config, const std::string& dotted_key, const std::string& value);

/// FNV-1a hash of the canonical config JSON, hex-encoded.
std::string config_hash(const ExperimentConfig& config);

struct ResultRecord {
    std::string experiment;
    std::string dataset;
    std::string config_id;
    Eigen::Index lookback = 0;
    Eigen::Index horizon = 0;
    std::string estimator;
    nlohmann::json params;
    std::int64_t seed = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double test_mse = 0.0;
    double wall_seconds = 0.0;  // written to meta.jsonl, not records.jsonl
    std::string error;          // non-empty when the grid point failed
    nlohmann::json artifacts = nlohmann::json::object();

    bool ok() const { return error.empty(); }
};

/// Execute the config's grid (horizon x seed x parameter grid), writing
/// config.json, records.jsonl, summary.csv, meta.jsonl, and any artifact
/// files under the output directory. A failed grid point is recorded
/// without aborting the others.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config);

/// Singular values of the materialized time-domain weight, descending.
std::vector<double> spectrum_report(const LinearModel& model, int top_n);

struct ScalingPoint {
    std::string estimator;
    double x = 0.0;  // training size or noise level
    std::int64_t seed = 0;
    double test_mse = 0.0;
    double weight_fro = 0.0;  // ||W||_F of the fitted model's time weight
};

struct ScalingStudyResult {
    std::vector<ScalingPoint> size_curve;   // x = training length, sigma fixed
    std::vector<ScalingPoint> noise_curve;  // x = sigma, training length fixed
};

/// MSE-vs-train-size (fixed sigma) and MSE-vs-sigma (fixed size) tables.
/// For pure-noise specs, train/val/test are independent streams; for signal
/// specs the train view is the last `size` points before the validation cut.
ScalingStudyResult scaling_study(const data::SyntheticSpec& base,
                                 const std::vector<Eigen::Index>& train_sizes,
                                 const std::vector<double>& noise_levels,
                                 const std::vector<std::string>& estimator_names,
                                 const std::vector<std::int64_t>& seeds, Eigen::Index lookback,
                                 Eigen::Index horizon, const nlohmann::json& params,
                                 const std::string& outputs);

struct RootRecoveryRow {
    std::string estimator;
    double mean_distance = 0.0;
    double std_distance = 0.0;
    std::vector<double> per_seed;
};

/// Hungarian-matched distance between each estimator's horizon-1 roots on
/// noisy data and the roots of a noise-free fit, mean and std over seeds.
std::vector<RootRecoveryRow> root_recovery_study(const data::SyntheticSpec& spec,
                                                 Eigen::Index lookback, Eigen::Index horizon,
                                                 const std::vector<std::string>& estimator_names,
                                                 const std::vector<std::int64_t>& seeds,
                                                 const nlohmann::json& params,
                                                 const std::string& outputs);

struct CiIncRow {
    std::string strategy;  // "ci" or "inc"
    std::string method;    // "plain" or "root_purge"
    Eigen::Index horizon = 0;
    double test_mse = 0.0;
};

/// {CI, INC} x {plain, root_purge} comparison per horizon. "plain" is the
/// same trainer with lambda = 0.
std::vector<CiIncRow> ci_inc_comparison(const ExperimentConfig& config);

/// Entry point for the `study` subcommand; dispatches on config.study.kind.
void run_study(const ExperimentConfig& config);

}  // namespace rootcast::harness

#endif
