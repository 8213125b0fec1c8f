#pragma once

#include <string>
#include <string_view>

#include "fairmon/markov.hpp"

namespace fairmon {

/// Reads {"states":[...], "transitions":[[...],...], "initial":[...],
/// "labels":{"state":"obs",...}}. Missing labels default to the state name.
/// The result is validated.
ObservationModel model_from_json(std::string_view text);

std::string model_to_json(const ObservationModel& m);

ObservationModel load_model(const std::string& path);

}  // namespace fairmon
