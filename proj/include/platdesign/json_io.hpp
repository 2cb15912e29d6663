#pragma once

#include <json.hpp>

#include "platdesign/config.hpp"
#include "platdesign/oc.hpp"
#include "platdesign/oracle.hpp"
#include "platdesign/ssd.hpp"
#include "platdesign/trial_sim.hpp"

namespace platdesign {

using Json = nlohmann::json;

Json to_json(const TauMethod& m);
TauMethod tau_method_from_json(const Json& j);

Json to_json(const Thresholds& t);
Thresholds thresholds_from_json(const Json& j);

Json to_json(const TauSampleSet& s);
TauSampleSet sample_set_from_json(const Json& j);

Json to_json(const AnchorModelSet& m);
AnchorModelSet models_from_json(const Json& j);

Json to_json(const DesignConfig& c);
DesignConfig config_from_json(const Json& j);

Json to_json(const OperatingCharacteristics& oc);
Json to_json(const Recommendation& r);
Json to_json(const DiscrepancyReport& r);

}  // namespace platdesign
