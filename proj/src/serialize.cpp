#include "cpcsys/serialize.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cpcsys {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Quotes a CSV field when it contains a comma, quote, or newline.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

ordered_json matrix_to_json(const Eigen::MatrixXcd& m) {
  ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  ordered_json entries = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      entries.push_back({m(r, c).real(), m(r, c).imag()});
    }
  }
  j["entries"] = std::move(entries);
  return j;
}

Eigen::MatrixXcd matrix_from_json(const ordered_json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("entries")) {
    throw std::invalid_argument(where + ": matrix needs rows, cols, entries");
  }
  for (const auto& item : j.items()) {
    if (item.key() != "rows" && item.key() != "cols" && item.key() != "entries") {
      throw std::invalid_argument(where + ": unknown key \"" + item.key() + "\"");
    }
  }
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const ordered_json& entries = j.at("entries");
  if (rows < 0 || cols < 0 || !entries.is_array() ||
      entries.size() != static_cast<std::size_t>(rows * cols)) {
    throw std::invalid_argument(where + ": entries length must be rows*cols");
  }
  Eigen::MatrixXcd m(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const ordered_json& e = entries[idx++];
      if (!e.is_array() || e.size() != 2) {
        throw std::invalid_argument(where + ": each entry is [re, im]");
      }
      m(r, c) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

ordered_json report_to_json(const DefectReport& report) {
  ordered_json j;
  j["condition"] = report.condition;
  j["system"] = report.system;
  j["k"] = report.k;
  j["r"] = report.r;
  j["elements"] = report.elements;
  ordered_json schedule = ordered_json::array();
  for (const StageTuple& t : report.schedule) {
    schedule.push_back({t.j, t.n, t.m});
  }
  j["schedule"] = std::move(schedule);
  ordered_json defects = ordered_json::array();
  for (const TupleDefect& d : report.defects) {
    ordered_json row;
    row["j"] = d.stages.j;
    row["n"] = d.stages.n;
    row["m"] = d.stages.m;
    row["value"] = d.value;
    defects.push_back(std::move(row));
  }
  j["defects"] = std::move(defects);
  j["tolerance"] = report.tolerance;
  j["signed"] = report.is_signed;
  j["verdict"] = report.verdict;
  j["seed"] = report.seed;
  j["wall_ms"] = report.wall_ms;
  return j;
}

std::string reports_to_json(const std::vector<DefectReport>& reports) {
  ordered_json arr = ordered_json::array();
  for (const DefectReport& r : reports) arr.push_back(report_to_json(r));
  return arr.dump(2) + "\n";
}

std::string reports_to_csv(const std::vector<DefectReport>& reports) {
  std::ostringstream out;
  out << "condition,system,k,r,elements,j,n,m,value,tolerance,signed,verdict,seed\n";
  for (const DefectReport& r : reports) {
    std::string elements;
    for (std::size_t i = 0; i < r.elements.size(); ++i) {
      if (i) elements += "|";
      elements += r.elements[i];
    }
    // Reports whose evaluation failed carry no tuples; emit one row so the
    // verdict is still visible in the flattened form.
    std::vector<TupleDefect> rows = r.defects;
    if (rows.empty()) rows.push_back({StageTuple{}, 0.0});
    for (const TupleDefect& d : rows) {
      out << csv_field(r.condition) << ',' << csv_field(r.system) << ',' << r.k << ','
          << r.r << ',' << csv_field(elements) << ',' << d.stages.j << ',' << d.stages.n
          << ',' << d.stages.m << ',' << fmt_double(d.value) << ','
          << fmt_double(r.tolerance) << ',' << (r.is_signed ? "true" : "false") << ','
          << csv_field(r.verdict) << ',' << r.seed << '\n';
    }
  }
  return out.str();
}

ordered_json group_algebra_to_json(const GroupAlgebraElement& a) {
  ordered_json arr = ordered_json::array();
  for (const auto& [g, c] : a.coeffs()) {
    ordered_json row;
    row["element"] = g;
    row["re"] = c.real();
    row["im"] = c.imag();
    arr.push_back(std::move(row));
  }
  return arr;
}

ordered_json element_to_json(const AlgElement& x) {
  ordered_json j;
  ordered_json blocks = ordered_json::array();
  for (int b = 0; b < x.algebra().block_count(); ++b) {
    blocks.push_back(matrix_to_json(x.block(b)));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

}  // namespace cpcsys
