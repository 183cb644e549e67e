#pragma once

#include "regrich/exact.hpp"
#include "regrich/richness.hpp"
#include "regrich/rigidity.hpp"
#include "regrich/scanner.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace regrich {

using Json = nlohmann::json;

/// {"rows": r, "cols": c, "entries": [[re,im], ...]} row-major.
CMat matrix_from_json(const Json& j);
Json matrix_to_json(const CMat& M);

/// Exact mode: entries as [[num,den],[num,den]] pairs.
ExactMatrix exact_matrix_from_json(const Json& j);
bool json_matrix_is_exact(const Json& j);

/// {"A": matrix, "B": [matrix, ...]}.
Datum datum_from_json(const Json& j);
Json datum_to_json(const Datum& d);

/// {"matrices": [matrix, ...]} spanning set for a space.
std::vector<CMat> space_from_json(const Json& j);
std::optional<std::vector<ExactMatrix>> exact_space_from_json(const Json& j);

CVec vector_from_json(const Json& j);

ParamSystem system_from_json(const Json& j);

Json verdict_to_json(const TransitivityVerdict& v);
Json regularity_report_to_json(const RegularityReport& r);
Json rigidity_report_to_json(const RigidityReport& r);
Json scan_report_to_json(const ScanReport& r);

Json load_json_file(const std::string& path);

}  // namespace regrich
