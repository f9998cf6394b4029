#include "rootcast/model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rootcast::model_io {

namespace {

constexpr int kFormatVersion = 1;

using estimators::Domain;
using estimators::NormPolicy;

std::string policy_name(NormPolicy p) {
    switch (p) {
        case NormPolicy::none: return "none";
        case NormPolicy::instance_mean: return "instance_mean";
        case NormPolicy::instance_mean_std: return "instance_mean_std";
    }
    throw std::logic_error("policy_name: unknown policy");
}

NormPolicy policy_from(const std::string& s) {
    if (s == "none") return NormPolicy::none;
    if (s == "instance_mean") return NormPolicy::instance_mean;
    if (s == "instance_mean_std") return NormPolicy::instance_mean_std;
    throw std::invalid_argument("load_model: unknown norm_policy '" + s + "'");
}

}  // namespace

std::string to_json_string(const LinearModel& model) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["domain"] = model.domain == Domain::time ? "time" : "frequency";
    j["lookback"] = model.lookback;
    j["horizon"] = model.horizon;
    j["norm_policy"] = policy_name(model.norm_policy);
    nlohmann::json weight = nlohmann::json::array();
    if (model.domain == Domain::time) {
        for (Eigen::Index r = 0; r < model.time_weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < model.time_weight.cols(); ++c) {
                weight.push_back(model.time_weight(r, c));
            }
        }
    } else {
        for (Eigen::Index r = 0; r < model.freq_weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < model.freq_weight.cols(); ++c) {
                weight.push_back({model.freq_weight(r, c).real(), model.freq_weight(r, c).imag()});
            }
        }
    }
    j["weight"] = std::move(weight);
    return j.dump(2) + "\n";
}

namespace {

LinearModel parse_model(const nlohmann::json& j);

}  // namespace

LinearModel from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("load_model: malformed JSON: ") + e.what());
    }
    try {
        return parse_model(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("load_model: missing or mistyped field: ") +
                                    e.what());
    }
}

namespace {

LinearModel parse_model(const nlohmann::json& j) {
    if (!j.contains("format_version") || j["format_version"].get<int>() != kFormatVersion) {
        throw std::invalid_argument("load_model: unsupported or missing format_version");
    }
    const std::string domain = j.at("domain").get<std::string>();
    const auto lookback = j.at("lookback").get<Eigen::Index>();
    const auto horizon = j.at("horizon").get<Eigen::Index>();
    const NormPolicy policy = policy_from(j.at("norm_policy").get<std::string>());
    const nlohmann::json& weight = j.at("weight");

    if (domain == "time") {
        const auto expected = static_cast<size_t>(lookback) * static_cast<size_t>(horizon);
        if (weight.size() != expected) {
            throw std::invalid_argument("load_model: weight has " + std::to_string(weight.size()) +
                                        " entries, expected " + std::to_string(expected));
        }
        Eigen::MatrixXd w(lookback, horizon);
        size_t idx = 0;
        for (Eigen::Index r = 0; r < lookback; ++r) {
            for (Eigen::Index c = 0; c < horizon; ++c) w(r, c) = weight[idx++].get<double>();
        }
        return estimators::make_time_model(std::move(w), policy);
    }
    if (domain == "frequency") {
        const Eigen::Index rows = lookback / 2 + 1;
        const Eigen::Index cols = horizon / 2 + 1;
        const auto expected = static_cast<size_t>(rows) * static_cast<size_t>(cols);
        if (weight.size() != expected) {
            throw std::invalid_argument("load_model: weight has " + std::to_string(weight.size()) +
                                        " entries, expected " + std::to_string(expected));
        }
        Eigen::MatrixXcd w(rows, cols);
        size_t idx = 0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                const nlohmann::json& pair = weight[idx++];
                if (!pair.is_array() || pair.size() != 2) {
                    throw std::invalid_argument("load_model: frequency weights must be [re, im] pairs");
                }
                w(r, c) = std::complex<double>(pair[0].get<double>(), pair[1].get<double>());
            }
        }
        return estimators::make_frequency_model(std::move(w), lookback, horizon, policy);
    }
    throw std::invalid_argument("load_model: unknown domain '" + domain + "'");
}

}  // namespace

void save_model(const LinearModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path + " for writing");
    out << to_json_string(model);
    if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_model: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

}  // namespace rootcast::model_io
