#pragma once

#include <filesystem>
#include <string>

#include "fwss/core.hpp"
#include "json.hpp"

namespace fwss {

// {"n": int, "ell": int, "t": "<decimal>", "a": ["<decimal>", ...]}
// Field order is free; unknown or missing fields are rejected.
nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);

Instance read_instance_file(const std::filesystem::path& path);
void write_instance_file(const std::filesystem::path& path, const Instance& instance);

std::string to_decimal(const BigInt& value);
BigInt parse_decimal(const std::string& text);

}  // namespace fwss
