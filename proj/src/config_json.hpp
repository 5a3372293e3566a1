#pragma once

// JSON helpers shared by the scene, trace and pipeline readers. Not installed.

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cirsense/error.hpp"
#include "cirsense/types.hpp"

namespace cirsense::detail {

using json = nlohmann::json;

/// Throws Error(code) with "<pointer>: <message>".
[[noreturn]] void fail_at(ErrorCode code, const std::string& pointer, const std::string& message);

/// Rejects keys of `object` that are not listed.
void check_keys(const json& object, const std::string& pointer, std::initializer_list<std::string_view> allowed,
                ErrorCode code = ErrorCode::config);

const json& require(const json& object, const std::string& pointer, const std::string& key,
                    ErrorCode code = ErrorCode::config);
double number(const json& value, const std::string& pointer, ErrorCode code = ErrorCode::config);
double number_or(const json& object, const std::string& pointer, const std::string& key, double fallback,
                 ErrorCode code = ErrorCode::config);
long long integer(const json& value, const std::string& pointer, ErrorCode code = ErrorCode::config);
std::string text(const json& value, const std::string& pointer, ErrorCode code = ErrorCode::config);

json system_to_json(const SystemConfig& cfg);
SystemConfig system_from_json(const json& object, const std::string& pointer, ErrorCode code = ErrorCode::config);

}  // namespace cirsense::detail
