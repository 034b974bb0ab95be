#pragma once

#include <string>

#include <json.hpp>

#include "dvz/concentration.hpp"
#include "dvz/linf.hpp"
#include "dvz/nets.hpp"
#include "dvz/norms.hpp"
#include "dvz/sections.hpp"

namespace dvz {

using Json = nlohmann::json;

// Norm specs:
//   {"kind":"lp","p":3.0,"dim":128}          p may be the string "inf"
//   {"kind":"sum","dim":n,"terms":[{"w":1.0,"spec":{...}},...]}
//   {"kind":"wsup","dim":n,"weights":[...]}
// Parsing throws InputError on malformed input.
Json to_json(const NormSpec& spec);
NormSpec norm_from_json(const Json& j);

// Compact one-line form, used inside CSV cells.
std::string norm_json_string(const NormSpec& spec);

// {"k","eps","points":[[...],...],"seed","stream","budget"}; each inner array
// is one point.
Json to_json(const EpsNet& net);
EpsNet net_from_json(const Json& j);

Json to_json(const Frame& frame);
Frame frame_from_json(const Json& j);

Json to_json(const SectionCertificate& cert);
Json to_json(const SectionFailure& failure);
Json to_json(const SphereStatistics& stats);
Json to_json(const DistortionMeasurement& m);

// {"norm":{...},"vectors":[[...],...],"lower_norm_bound":x}; each inner
// array is one vector x_i.
Json to_json(const VectorSystem& system);
VectorSystem vector_system_from_json(const Json& j);

Json to_json(const BasisConstant& c);

// Doubles that may be infinite are written as "inf".
Json number_or_inf(double x);
double parse_number_or_inf(const Json& j);

}  // namespace dvz
