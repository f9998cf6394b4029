#ifndef ROOTCAST_MODEL_IO_HPP
#define ROOTCAST_MODEL_IO_HPP

#include "rootcast/estimators.hpp"

#include <string>

// JSON model persistence. Weights are stored row-major, as plain reals for
// time-domain models and [re, im] pairs for frequency-domain models; a
// load -> save round trip is byte-identical.
namespace rootcast::model_io {

using estimators::LinearModel;

std::string to_json_string(const LinearModel& model);
LinearModel from_json_string(const std::string& text);

void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace rootcast::model_io

#endif
