#pragma once

// Run configuration: sectioned key=value text, dotted overrides, and the
// sorted manifest that reproduces a run.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetdd/analysis.hpp"

namespace hetdd::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key map; keys are "section.key".
using KeyValues = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Parses "[section]" headers and "key = value" lines. '#' and ';' start
/// comments. Keys already containing a dot are taken as fully qualified,
/// which lets a manifest be read back as a config.
inline KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (key.find('.') == std::string::npos) {
      if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' outside a section");
      key = section + "." + key;
    }
    kv[key] = value;
  }
  return kv;
}

inline KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Applies "key=value" overrides on top of kv.
inline void apply_overrides(KeyValues& kv, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    const std::string key = trim(o.substr(0, eq));
    if (key.find('.') == std::string::npos) throw ConfigError("override key '" + key + "' needs a section prefix");
    kv[key] = trim(o.substr(eq + 1));
  }
}

struct OutputConfig {
  std::string dir = "out";
};

struct RunConfig {
  ProblemSpec problem;
  GridPolicy grid;
  CouplingMethod method = method::Factorization{1};
  method::NonVariational nonvar;  // iteration settings for every non-variational run
  std::size_t factorization_k = 1;
  SolverOptions options;
  std::vector<double> nu_list;
  std::vector<CouplingMethod> methods;
  OutputConfig output;
};

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1e15) throw ConfigError("key '" + key + "': '" + v + "' is not a count");
  return static_cast<std::size_t>(d);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "name(k1=v1,k2=v2)" or "name".
inline std::pair<std::string, std::map<std::string, double>> split_call(const std::string& key, const std::string& v) {
  const auto open = v.find('(');
  std::map<std::string, double> args;
  if (open == std::string::npos) return {trim(v), args};
  if (v.back() != ')') throw ConfigError("key '" + key + "': unbalanced parentheses in '" + v + "'");
  for (const auto& item : split_list(v.substr(open + 1, v.size() - open - 2))) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("key '" + key + "': argument '" + item + "' is not name=value");
    args[trim(item.substr(0, eq))] = to_double(key, trim(item.substr(eq + 1)));
  }
  return {trim(v.substr(0, open)), args};
}

}  // namespace detail

/// Parses the textual form produced by describe(); tabulated data has no text form.
inline DataSpec parse_data(const std::string& key, const std::string& v) {
  auto [name, args] = detail::split_call(key, v);
  auto take = [&, &args = args](const std::string& arg, double fallback) {
    const auto it = args.find(arg);
    if (it == args.end()) return fallback;
    const double out = it->second;
    args.erase(it);
    return out;
  };
  DataSpec d;
  if (name == "zero") {
    d = data::Zero{};
  } else if (name == "gaussian") {
    d = data::GaussianBump{take("x0", 0.0), take("scale", 100.0)};
  } else if (name == "paper") {
    d = data::PaperForcing{take("t0", 0.1)};
  } else if (name == "sine") {
    data::SineManufactured s;
    s.amplitude = take("amplitude", s.amplitude);
    s.decay = take("decay", s.decay);
    s.wavenumber = take("wavenumber", s.wavenumber);
    s.shift = take("shift", s.shift);
    d = s;
  } else if (name == "exp") {
    d = data::ExpEigen{take("alpha", 0.0), take("beta", 0.0)};
  } else {
    throw ConfigError("key '" + key + "': unknown data '" + name + "'");
  }
  if (!args.empty()) throw ConfigError("key '" + key + "': unknown argument '" + args.begin()->first + "'");
  return d;
}

inline CouplingMethod parse_method_or_throw(const std::string& key, const std::string& v) {
  auto m = parse_method(v);
  if (!m) throw ConfigError("key '" + key + "': unknown method '" + v + "'");
  return *m;
}

/// Resolves a key map into a RunConfig. Every key must be known.
inline RunConfig resolve(const KeyValues& kv) {
  static const std::vector<std::string> known = {
      "problem.sign", "problem.a",         "problem.nu",      "problem.c",         "problem.l1",
      "problem.l2",   "problem.t_final",   "problem.t0",      "problem.x0",        "problem.f",
      "problem.g1",   "problem.g2",        "problem.h",       "grid.n_cells",      "grid.dt_ratio",
      "method.name",  "method.theta",      "method.max_iters", "method.tol",       "method.stencil",
      "sweep.nu_list", "sweep.methods",    "output.dir"};
  for (const auto& [k, v] : kv)
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown key '" + k + "'");

  auto get = [&](const std::string& k) -> std::optional<std::string> {
    const auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto num = [&](const std::string& k, double fallback) {
    const auto v = get(k);
    return v ? detail::to_double(k, *v) : fallback;
  };

  RunConfig rc;
  auto& p = rc.problem;
  double sign = num("problem.sign", 1.0);
  if (sign != 1.0 && sign != -1.0) throw ConfigError("key 'problem.sign': must be 1 or -1");
  p.a = num("problem.a", sign);
  p.nu = num("problem.nu", 1e-3);
  p.c = num("problem.c", 1.0);
  p.l1 = num("problem.l1", 1.0);
  p.l2 = num("problem.l2", 1.0);
  p.t_final = num("problem.t_final", 1.0);
  const double t0 = num("problem.t0", 0.1);
  const double x0 = num("problem.x0", p.a > 0.0 ? -0.6 : 0.5);
  p.f = get("problem.f") ? parse_data("problem.f", *get("problem.f")) : DataSpec{data::PaperForcing{t0}};
  p.h = get("problem.h") ? parse_data("problem.h", *get("problem.h")) : DataSpec{data::GaussianBump{x0, 100.0}};
  p.g1 = get("problem.g1") ? parse_data("problem.g1", *get("problem.g1")) : DataSpec{data::Zero{}};
  p.g2 = get("problem.g2") ? parse_data("problem.g2", *get("problem.g2")) : DataSpec{data::Zero{}};

  rc.grid.n_cells = get("grid.n_cells") ? detail::to_count("grid.n_cells", *get("grid.n_cells")) : 4000;
  if (rc.grid.n_cells < 2) throw ConfigError("key 'grid.n_cells': needs at least two cells");
  rc.grid.dt_ratio = num("grid.dt_ratio", 1.0);
  if (!(rc.grid.dt_ratio > 0.0)) throw ConfigError("key 'grid.dt_ratio': must be positive");

  if (const auto th = get("method.theta"); th && *th != "auto") {
    rc.nonvar.theta = detail::to_double("method.theta", *th);
    if (!(*rc.nonvar.theta > 0.0 && *rc.nonvar.theta <= 1.0))
      throw ConfigError("key 'method.theta': must lie in (0, 1]");
  }
  if (const auto mi = get("method.max_iters")) rc.nonvar.max_iters = detail::to_count("method.max_iters", *mi);
  rc.nonvar.tol = num("method.tol", rc.nonvar.tol);
  if (!(rc.nonvar.tol > 0.0)) throw ConfigError("key 'method.tol': must be positive");
  const double stencil = num("method.stencil", 2.0);
  if (stencil == 1.0)
    rc.options.stencil = BoundaryStencil::OneSided1;
  else if (stencil == 2.0)
    rc.options.stencil = BoundaryStencil::OneSided2;
  else
    throw ConfigError("key 'method.stencil': must be 1 or 2");

  auto with_settings = [&](CouplingMethod m) {
    if (std::holds_alternative<method::NonVariational>(m)) m = rc.nonvar;
    return m;
  };
  rc.method = with_settings(parse_method_or_throw("method.name", get("method.name").value_or("factorization_k1")));
  if (const auto l = get("sweep.nu_list"))
    for (const auto& item : detail::split_list(*l)) rc.nu_list.push_back(detail::to_double("sweep.nu_list", item));
  if (const auto l = get("sweep.methods"))
    for (const auto& item : detail::split_list(*l))
      rc.methods.push_back(with_settings(parse_method_or_throw("sweep.methods", item)));
  rc.output.dir = get("output.dir").value_or("out");
  return rc;
}

/// Every resolved parameter as fully qualified keys. Reading this map back
/// through resolve() gives the same RunConfig.
inline KeyValues manifest(const RunConfig& rc) {
  KeyValues kv;
  const auto& p = rc.problem;
  kv["problem.a"] = format_double(p.a);
  kv["problem.nu"] = format_double(p.nu);
  kv["problem.c"] = format_double(p.c);
  kv["problem.l1"] = format_double(p.l1);
  kv["problem.l2"] = format_double(p.l2);
  kv["problem.t_final"] = format_double(p.t_final);
  kv["problem.f"] = describe(p.f);
  kv["problem.g1"] = describe(p.g1);
  kv["problem.g2"] = describe(p.g2);
  kv["problem.h"] = describe(p.h);
  kv["grid.n_cells"] = std::to_string(rc.grid.n_cells);
  kv["grid.dt_ratio"] = format_double(rc.grid.dt_ratio);
  kv["method.name"] = method_name(rc.method);
  kv["method.theta"] = rc.nonvar.theta ? format_double(*rc.nonvar.theta) : "auto";
  kv["method.max_iters"] = std::to_string(rc.nonvar.max_iters);
  kv["method.tol"] = format_double(rc.nonvar.tol);
  kv["method.stencil"] = rc.options.stencil == BoundaryStencil::OneSided1 ? "1" : "2";
  std::string nus, ms;
  for (double nu : rc.nu_list) nus += (nus.empty() ? "" : ",") + format_double(nu);
  for (const auto& m : rc.methods) ms += (ms.empty() ? "" : ",") + method_name(m);
  if (!nus.empty()) kv["sweep.nu_list"] = nus;
  if (!ms.empty()) kv["sweep.methods"] = ms;
  kv["output.dir"] = rc.output.dir;
  return kv;
}

inline std::string manifest_text(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

}  // namespace hetdd::cli
