#pragma once

// CSV tables: '.' decimals, ',' separator, LF line endings, mandatory header,
// numbers with 17 significant digits.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetdd/analysis.hpp"
#include "hetdd/cli/config.hpp"

namespace hetdd::cli {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* errors_header = "nu,method,err_omega1,err_omega2,peclet,resolved";

/// One line of errors.csv.
struct ErrorRow {
  double nu = 0.0;
  std::string method;
  double err_omega1 = 0.0;
  double err_omega2 = 0.0;
  double peclet = 0.0;
  bool resolved = true;

  bool operator==(const ErrorRow&) const = default;
};

inline ErrorRow to_row(const ErrorRecord& r) {
  return {r.nu, method_name(r.method), r.err_omega1, r.err_omega2, r.peclet, r.resolved};
}

inline std::string write_errors_csv(const std::vector<ErrorRow>& rows) {
  std::string out = std::string(errors_header) + "\n";
  for (const auto& r : rows)
    out += format_double(r.nu) + "," + r.method + "," + format_double(r.err_omega1) + "," +
           format_double(r.err_omega2) + "," + format_double(r.peclet) + "," + (r.resolved ? "1" : "0") + "\n";
  return out;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<ErrorRow> parse_errors_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != errors_header) throw CsvError("errors table: missing or wrong header");
  std::vector<ErrorRow> rows;
  std::size_t lineno = 1;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return d;
    } catch (const std::exception&) {
      throw CsvError("errors table line " + std::to_string(lineno) + ": bad number '" + s + "'");
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) throw CsvError("errors table line " + std::to_string(lineno) + ": expected 6 fields");
    if (f[5] != "0" && f[5] != "1") throw CsvError("errors table line " + std::to_string(lineno) + ": bad flag");
    rows.push_back({number(f[0]), f[1], number(f[2]), number(f[3]), number(f[4]), f[5] == "1"});
  }
  return rows;
}

/// Long-format field table: x,t,value,subdomain.
inline void write_field_rows(std::ostream& out, const Field& f, const char* subdomain) {
  for (std::size_t n = 0; n < f.time().levels(); ++n) {
    const std::string t = format_double(f.time().t(n));
    const auto row = f.row(n);
    for (std::size_t j = 0; j < f.grid().nodes(); ++j)
      out << format_double(f.grid().x(j)) << ',' << t << ',' << format_double(row[j]) << ',' << subdomain << '\n';
  }
}

inline void write_fields_csv(std::ostream& out, const CoupledSolution& sol) {
  out << "x,t,value,subdomain\n";
  write_field_rows(out, sol.u_ad, "omega1");
  write_field_rows(out, sol.u_a, "omega2");
}

/// Interface traces in exchange order: label,t,value.
inline void write_trace_csv(std::ostream& out, const CouplingDiagnostics& d) {
  out << "label,t,value\n";
  for (const auto& rec : d.interface)
    for (std::size_t n = 0; n < rec.trace.size(); ++n)
      out << rec.label << ',' << format_double(rec.trace.time().t(n)) << ',' << format_double(rec.trace[n]) << '\n';
}

}  // namespace hetdd::cli
