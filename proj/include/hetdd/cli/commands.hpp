#pragma once

// Subcommand bodies. Each throws a typed error; exit_code_for maps them to
// the process exit status.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hetdd/analysis.hpp"
#include "hetdd/cli/config.hpp"
#include "hetdd/cli/csv.hpp"
#include "hetdd/cli/svg.hpp"
#include "hetdd/verify.hpp"

namespace hetdd::cli {

enum ExitCode : int { ok = 0, config_failure = 2, validation_failure = 3, solver_failure = 4, io_failure = 5,
                      check_failure = 6 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + p.string() + "'");
}

inline std::filesystem::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  return dir;
}

/// Throws ValidationError naming the first violation.
inline void require_valid(const ProblemSpec& spec, const GridPolicy& g) {
  const auto report = validate(spec, g.grid(spec), g.time(spec));
  if (!report.ok()) throw ValidationError(report.violations.front());
}

struct SlopeRow {
  std::string method;
  std::string region;  // "omega1" or "omega2"
  SlopeFit fit;
  std::size_t points = 0;
};

inline std::string write_slopes_csv(const std::vector<SlopeRow>& rows) {
  std::string out = "method,region,slope,intercept,points,pair_slopes\n";
  for (const auto& r : rows) {
    std::string pairs;
    for (double p : r.fit.pair_slopes) pairs += (pairs.empty() ? "" : ";") + format_double(p);
    out += r.method + "," + r.region + "," + format_double(r.fit.slope) + "," + format_double(r.fit.intercept) + "," +
           std::to_string(r.points) + "," + pairs + "\n";
  }
  return out;
}

namespace detail {

inline void add_fit(std::vector<SlopeRow>& out, const std::string& m, const char* region,
                    const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> usable;
  for (const auto& p : pts)
    if (p.first > 0 && p.second > 0 && std::isfinite(p.first) && std::isfinite(p.second)) usable.push_back(p);
  if (usable.size() < 2) return;
  out.push_back({m, region, fit_slope(usable), usable.size()});
}

}  // namespace detail

/// Slopes of resolved rows per method, from a parsed errors table.
inline std::vector<SlopeRow> slopes_from_rows(const std::vector<ErrorRow>& rows) {
  std::vector<std::string> order;
  for (const auto& r : rows)
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  std::vector<SlopeRow> out;
  for (const auto& m : order) {
    std::vector<std::pair<double, double>> p1, p2;
    for (const auto& r : rows)
      if (r.method == m && r.resolved) p1.emplace_back(r.nu, r.err_omega1), p2.emplace_back(r.nu, r.err_omega2);
    detail::add_fit(out, m, "omega1", p1);
    detail::add_fit(out, m, "omega2", p2);
  }
  return out;
}

/// Same fits computed directly from in-memory sweep records.
inline std::vector<SlopeRow> slopes_from_records(const std::vector<ErrorRecord>& recs) {
  std::vector<std::string> order;
  for (const auto& r : recs)
    if (std::find(order.begin(), order.end(), method_name(r.method)) == order.end())
      order.push_back(method_name(r.method));
  std::vector<SlopeRow> out;
  for (const auto& m : order) {
    detail::add_fit(out, m, "omega1", series(recs, m, true));
    detail::add_fit(out, m, "omega2", series(recs, m, false));
  }
  return out;
}

inline SweepSpec sweep_spec(const RunConfig& rc, unsigned jobs) {
  SweepSpec s;
  s.problem = rc.problem;
  s.nu_list = rc.nu_list;
  s.methods = rc.methods;
  s.grid = rc.grid;
  s.options = rc.options;
  s.jobs = jobs;
  return s;
}

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Solves one configuration; writes fields, interface traces and manifest.
inline void cmd_solve(const RunConfig& rc, std::ostream& log) {
  require_valid(rc.problem, rc.grid);
  const Grid grid = rc.grid.grid(rc.problem);
  const TimeGrid time = rc.grid.time(rc.problem);
  const auto sol = solve_coupled(rc.problem, grid, time, rc.method, rc.options);
  const auto dir = ensure_dir(rc.output.dir);
  const std::string name = method_name(rc.method);
  {
    std::ostringstream f;
    write_fields_csv(f, sol);
    write_file(dir / ("fields_" + name + ".csv"), f.str());
  }
  {
    std::ostringstream t;
    write_trace_csv(t, sol.diagnostics);
    write_file(dir / "trace_interface.csv", t.str());
  }
  write_file(dir / "manifest.txt", manifest_text(manifest(rc)));
  for (const auto& w : sol.diagnostics.warnings) log << "warning: " << w << "\n";
  log << name << ": " << sol.diagnostics.iterations << " iteration(s), output in " << dir.string() << "\n";
}

/// Runs a viscosity sweep; writes errors.csv, slopes.csv and manifest.
inline std::vector<ErrorRecord> cmd_sweep(const RunConfig& rc, unsigned jobs, std::ostream& log) {
  if (rc.methods.empty()) throw ConfigError("sweep needs 'sweep.methods'");
  for (double nu : rc.nu_list) {
    ProblemSpec p = rc.problem;
    p.nu = nu;
    require_valid(p, rc.grid);
  }
  const auto recs = run_sweep(sweep_spec(rc, jobs));
  std::vector<ErrorRow> rows;
  for (const auto& r : recs) {
    rows.push_back(to_row(r));
    if (r.failure) log << "warning: nu=" << format_double(r.nu) << " " << method_name(r.method) << ": " << *r.failure << "\n";
  }
  const auto dir = ensure_dir(rc.output.dir);
  write_file(dir / "errors.csv", write_errors_csv(rows));
  write_file(dir / "slopes.csv", write_slopes_csv(slopes_from_records(recs)));
  write_file(dir / "manifest.txt", manifest_text(manifest(rc)));
  log << recs.size() << " rows written to " << (dir / "errors.csv").string() << "\n";
  return recs;
}

/// Recomputes slopes from an errors table.
inline std::vector<SlopeRow> cmd_slopes(const std::string& errors_path, const std::string& out_dir, std::ostream& log) {
  std::vector<ErrorRow> rows;
  try {
    rows = parse_errors_csv(read_file(errors_path));
  } catch (const CsvError& e) {
    throw ConfigError(e.what());
  }
  const auto fits = slopes_from_rows(rows);
  const std::string text = write_slopes_csv(fits);
  if (!out_dir.empty()) write_file(ensure_dir(out_dir) / "slopes.csv", text);
  log << text;
  return fits;
}

/// Draws both error panels from an errors table.
inline void cmd_plot(const std::string& errors_path, const std::string& out_dir, std::ostream& log) {
  std::vector<ErrorRow> rows;
  try {
    rows = parse_errors_csv(read_file(errors_path));
  } catch (const CsvError& e) {
    throw ConfigError(e.what());
  }
  const auto dir = ensure_dir(out_dir);
  write_file(dir / "errors_omega1.svg", render_svg(rows, true, "Error in the viscous subdomain"));
  write_file(dir / "errors_omega2.svg", render_svg(rows, false, "Error in the inviscid subdomain"));
  log << "wrote " << (dir / "errors_omega1.svg").string() << " and " << (dir / "errors_omega2.svg").string() << "\n";
}

inline void cmd_check(std::ostream& log) {
  bool all = true;
  for (const auto& r : verify::self_checks()) {
    log << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.pass;
  }
  if (!all) throw CheckFailure("self-check failed");
}

/// Runs body and maps its failure to an exit code, reporting on err.
inline int exit_code_for(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return config_failure;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return validation_failure;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return io_failure;
  } catch (const CheckFailure& e) {
    err << e.what() << "\n";
    return check_failure;
  } catch (const UnsupportedDerivative& e) {
    err << "validation error: " << e.what() << "\n";
    return validation_failure;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return solver_failure;
  }
}

}  // namespace hetdd::cli
