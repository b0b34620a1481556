#pragma once

#include <string>

#include "json.hpp"

namespace moocaug {

using Json = nlohmann::json;

// Canonical serialization used for every artifact the engine writes:
//  - object keys sorted bytewise (nlohmann's default std::map ordering)
//  - two-space indentation, one member per line, '\n' line ends
//  - floating-point numbers in fixed notation with 6 decimals; -0 prints as 0
//  - integers printed exactly
// Identical inputs produce identical bytes.
std::string canonical_dump(const Json& value);

// Rounds to the 6-decimal grid used by canonical_dump.
double round6(double x);

}  // namespace moocaug
