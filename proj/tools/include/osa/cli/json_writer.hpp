#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>

namespace osa::cli {

using Json = nlohmann::ordered_json;

/// Pretty-prints with two-space indentation. Floating-point numbers use 17
/// significant digits; non-finite ones become null.
void write_json(std::ostream& out, const Json& doc);

}  // namespace osa::cli
