#pragma once

#include <string>

#include "json.hpp"

namespace dstori {

using Json = nlohmann::json;

/// %.17g; non-finite values print as "inf", "-inf", "nan".
std::string fmt_double(double v);

/// JSON text with every float at 17 significant digits and sorted keys, so
/// reports are byte-identical across runs.
std::string dump_json(const Json& j, int indent = 2);

/// Non-finite doubles are not JSON; they are stored as strings.
Json json_double(double v);
double json_to_double(const Json& j);

}  // namespace dstori
