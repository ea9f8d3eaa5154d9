#pragma once

#include <string>

#include "json.hpp"
#include "wmplace/design.hpp"

namespace wmp {

inline constexpr int kDocumentVersion = 1;

nlohmann::json rect_to_json(const Rect &r);
Rect rect_from_json(const nlohmann::json &j);

// Canonical design document, {"format": "wmplace-design", "version": 1, ...}.
nlohmann::json design_to_json(const Design &design);
Design design_from_json(const nlohmann::json &doc);

// Compact canonical text of design_to_json (sorted keys, no whitespace).
std::string design_dump(const Design &design);
// Lower-case hex SHA-256 of design_dump.
std::string design_fingerprint(const Design &design);

std::string sha256_hex(const std::string &data);

void save_design(const Design &design, const std::string &path);
Design load_design(const std::string &path);

}  // namespace wmp
