#pragma once

// JSON and CSV rendering for audit reports, plus the matrix/element JSON
// helpers shared with the config layer. All output is deterministic: key
// order is fixed, numbers use shortest-round-trip formatting in JSON and
// 17 significant digits in CSV.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cpcsys/audit.hpp"
#include "cpcsys/fdcstar.hpp"
#include "cpcsys/groupalg.hpp"

namespace cpcsys {

using ordered_json = nlohmann::ordered_json;

// {"rows": R, "cols": C, "entries": [[re, im], ...]} row-major.
ordered_json matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const ordered_json& j, const std::string& where);

// Field order per report: condition, system, k, r, elements, schedule,
// defects [{j, n, m, value}], tolerance, signed, verdict, seed, wall_ms.
ordered_json report_to_json(const DefectReport& report);
std::string reports_to_json(const std::vector<DefectReport>& reports);

// One row per evaluated tuple; elements joined by '|'.
std::string reports_to_csv(const std::vector<DefectReport>& reports);

// [{"element": [coords...], "re": ., "im": .}] in the element's own
// deterministic support order.
ordered_json group_algebra_to_json(const GroupAlgebraElement& a);

// {"blocks": [matrix...]} with the matrix schema above.
ordered_json element_to_json(const AlgElement& x);

}  // namespace cpcsys
