#pragma once

#include <string>

#include <json.hpp>

#include "ctori/intersect.hpp"
#include "ctori/matcore.hpp"
#include "ctori/topology.hpp"

namespace ctori {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// {"n": N, "entries": [[[re,im], ...], ...]} row-major.
json matrix_to_json(const CMat& m);

/// Parses the matrix format. With `check`, rejects matrices whose unitarity
/// defect exceeds `tol` (std::invalid_argument).
UnitaryMatrix matrix_from_json(const json& j, bool check = true, double tol = 1e-8);

json intersection_set_to_json(const IntersectionSet& set);
json index_report_to_json(const IndexReport& report);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ctori
