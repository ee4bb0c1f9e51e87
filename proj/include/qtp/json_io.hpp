#pragma once

// JSON codecs for the value types that cross the CLI boundary.  One matrix
// format repo-wide: {"rows", "cols", "re", "im"} with row-major entry
// arrays; density operators add "dims".  nlohmann emits shortest
// round-trip decimals, so dump -> parse -> dump is byte-stable.

#include <string>

#include "json.hpp"
#include "qtp/linalg.hpp"
#include "qtp/pure.hpp"
#include "qtp/states.hpp"
#include "qtp/types.hpp"

namespace qtp::json_io {

using nlohmann::json;

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json vector_to_json(const Vector& v);  // matrix format with cols = 1
Vector vector_from_json(const json& j);

json density_to_json(const linalg::DensityOperator& op);
linalg::DensityOperator density_from_json(const json& j);

json ensemble_to_json(const states::EnsembleSpec& spec);
states::EnsembleSpec ensemble_from_json(const json& j);

// {"n1", "n2", "entries"} with entries[s][i][t] = [re, im].
json phase_table_to_json(const pure::PhaseTable& c);
pure::PhaseTable phase_table_from_json(const json& j);

// File helpers; malformed or unreadable input raises ParseError.
json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace qtp::json_io
