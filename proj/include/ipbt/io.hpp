#pragma once

// JSON encoding. Numbers are integers or "num/den" strings; never floating point.

#include <string>

#include <json.hpp>

#include "ipbt/environment.hpp"

namespace ipbt::io {

using Json = nlohmann::json;

/// Integers that fit in int64 become JSON integers; everything else a string.
Json to_json(const Rational& r);
Json to_json(const RationalVector& v);
Json to_json(const RationalMatrix& m);  // row-major nested arrays
Json to_json(const Allocation& g);      // {"q": ..., "t": ...}
Json to_json(const Environment& env);

/// Throws InputError("ParseError") on anything but an integer or a "n"/"n/d" string.
Rational rational_from_json(const Json& j, const std::string& where);

/// Shape and numeric checks only; validation happens in Environment::build.
EnvironmentData environment_data_from_json(const Json& j);
Environment environment_from_json(const Json& j);
Allocation allocation_from_json(const Environment& env, const Json& j);

/// Reads and parses a JSON file; throws InputError("ParseError") on failure.
Json read_json_file(const std::string& path);
Environment load_environment(const std::string& path);
Allocation load_allocation(const Environment& env, const std::string& path);

/// Sorted keys, two-space indent, trailing newline. Identical inputs give identical bytes.
std::string canonical_dump(const Json& j);

/// SHA-256 of the compact canonical serialization, lowercase hex.
std::string environment_digest(const Environment& env);

}  // namespace ipbt::io
