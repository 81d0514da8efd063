// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <vector>

#include "mrflow/error.hpp"

namespace mrflow {

std::string_view to_string(ProblemKind p) noexcept {
  return p == ProblemKind::primordial ? "primordial" : "density_wave";
}

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

double parse_double(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  double v = 0.0;
  in >> v;
  if (in.fail() || !(in >> std::ws).eof()) throw ConfigError(key + ": not a number: '" + text + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  long v = 0;
  in >> v;
  if (in.fail() || !(in >> std::ws).eof()) throw ConfigError(key + ": not an integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": not a boolean: '" + text + "'");
}

std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <typename T, std::size_t N, typename Parse>
std::array<T, N> parse_array(const std::string& key, const std::string& text, Parse parse) {
  const auto w = words(text);
  if (w.size() != N) throw ConfigError(key + ": expected " + std::to_string(N) + " values");
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = static_cast<T>(parse(key, w[i]));
  return out;
}

template <typename T, std::size_t N, typename Format>
std::string join(const std::array<T, N>& a, Format format) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    if (i) out += ' ';
    out += format(a[i]);
  }
  return out;
}

struct Key {
  const char* name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string& key, const std::string&)> set;
};

#define MRFLOW_DOUBLE_KEY(name, member)                                                     \
  Key {                                                                                     \
    name, [](const RunConfig& c) { return format_double(c.member); },                      \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_double(k, v); } \
  }

#define MRFLOW_BOOL_KEY(name, member)                                                       \
  Key {                                                                                     \
    name, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); },      \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_bool(k, v); } \
  }

#define MRFLOW_STRING_KEY(name, member)                                                     \
  Key {                                                                                     \
    name, [](const RunConfig& c) { return c.member; },                                      \
        [](RunConfig& c, const std::string&, const std::string& v) { c.member = v; }        \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"problem.name", [](const RunConfig& c) { return std::string(to_string(c.problem)); },
          [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "primordial") {
              c.problem = ProblemKind::primordial;
            } else if (v == "density_wave") {
              c.problem = ProblemKind::density_wave;
            } else {
              throw ConfigError(k + ": unknown problem '" + v + "'");
            }
          }},
      Key{"mesh.cells", [](const RunConfig& c) { return join(c.cells, [](long v) { return std::to_string(v); }); },
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.cells = parse_array<long, 3>(k, v, parse_long);
          }},
      Key{"mesh.tasks", [](const RunConfig& c) { return std::to_string(c.tasks); },
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.tasks = static_cast<int>(parse_long(k, v));
          }},
      Key{"domain.lower", [](const RunConfig& c) { return join(c.lower, format_double); },
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.lower = parse_array<double, 3>(k, v, parse_double);
          }},
      Key{"domain.upper", [](const RunConfig& c) { return join(c.upper, format_double); },
          [](RunConfig& c, const std::string& k, const std::string& v) {
            c.upper = parse_array<double, 3>(k, v, parse_double);
          }},
      Key{"domain.boundaries",
          [](const RunConfig& c) {
            return join(c.boundaries, [](BoundaryCondition b) { return std::string(to_string(b)); });
          },
          [](RunConfig& c, const std::string& k, const std::string& v) {
            const auto w = words(v);
            if (w.size() == 1) {
              c.boundaries = all_boundaries(parse_boundary(w[0]));
            } else if (w.size() == 6) {
              for (int f = 0; f < 6; ++f) c.boundaries[f] = parse_boundary(w[f]);
            } else {
              throw ConfigError(k + ": expected 1 or 6 boundary names");
            }
          }},
      MRFLOW_DOUBLE_KEY("time.t0", t0),
      MRFLOW_DOUBLE_KEY("time.tf", tf),
      MRFLOW_DOUBLE_KEY("time.h_slow", h_slow),
      MRFLOW_DOUBLE_KEY("time.h_fast", h_fast),
      MRFLOW_DOUBLE_KEY("time.transient", transient),
      MRFLOW_BOOL_KEY("solver.fused_ops", vectors.fused_ops),
      MRFLOW_BOOL_KEY("solver.batched_reductions", vectors.batched_reductions),
      MRFLOW_DOUBLE_KEY("solver.rtol", tol.rtol),
      MRFLOW_DOUBLE_KEY("solver.atol", tol.atol),
      MRFLOW_STRING_KEY("solver.slow_table", slow_table),
      MRFLOW_STRING_KEY("solver.fast_table", fast_table),
      MRFLOW_BOOL_KEY("network.reactions", reactions),
      MRFLOW_DOUBLE_KEY("network.k1", network.k1),
      MRFLOW_DOUBLE_KEY("network.k2", network.k2),
      MRFLOW_DOUBLE_KEY("network.q", network.q),
      MRFLOW_DOUBLE_KEY("network.e_ref", network.e_ref),
      MRFLOW_DOUBLE_KEY("initial.rho0", initial.rho0),
      MRFLOW_DOUBLE_KEY("initial.T0", initial.T0),
      MRFLOW_DOUBLE_KEY("initial.gamma", initial.gamma),
      Key{"initial.seed", [](const RunConfig& c) { return std::to_string(c.seed); },
          [](RunConfig& c, const std::string& k, const std::string& v) {
            std::istringstream in(v);
            std::uint64_t s = 0;
            in >> s;
            if (in.fail() || !(in >> std::ws).eof()) throw ConfigError(k + ": not a seed: '" + v + "'");
            c.seed = s;
          }},
      Key{"initial.clumps", [](const RunConfig& c) { return std::to_string(c.clump_count); },
          [](RunConfig& c, const std::string& k, const std::string& v) { c.clump_count = parse_long(k, v); }},
      MRFLOW_DOUBLE_KEY("units.mass", units.mass),
      MRFLOW_DOUBLE_KEY("units.length", units.length),
      MRFLOW_DOUBLE_KEY("units.time", units.time),
      MRFLOW_STRING_KEY("output.csv", csv_path),
      MRFLOW_STRING_KEY("output.snapshot", snapshot_path),
  };
  return table;
}

#undef MRFLOW_DOUBLE_KEY
#undef MRFLOW_BOOL_KEY
#undef MRFLOW_STRING_KEY

}  // namespace

void RunConfig::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (cells[a] < 1) throw ConfigError("mesh.cells: must be positive");
    if (!(upper[a] > lower[a])) throw ConfigError("domain: upper must exceed lower");
  }
  if (tasks < 1) throw ConfigError("mesh.tasks: must be positive");
  if (!(tf > t0)) throw ConfigError("time.tf: must exceed time.t0");
  if (!(h_slow > 0.0)) throw ConfigError("time.h_slow: must be positive");
  if (!(h_fast > 0.0)) throw ConfigError("time.h_fast: must be positive");
  if (transient < 0.0) throw ConfigError("time.transient: must be nonnegative");
  if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) throw ConfigError("solver: tolerances must be positive");
  if (!(network.k1 >= 0.0) || !(network.k2 >= 0.0)) throw ConfigError("network: rates must be nonnegative");
  if (network.e_ref < 0.0) throw ConfigError("network.e_ref: must be nonnegative");
  if (!(initial.rho0 > 0.0) || !(initial.T0 > 0.0)) throw ConfigError("initial: rho0 and T0 must be positive");
  if (!(initial.gamma > 1.0)) throw ConfigError("initial.gamma: must exceed 1");
  if (!(units.mass > 0.0) || !(units.length > 0.0) || !(units.time > 0.0)) {
    throw ConfigError("units: scales must be positive");
  }
  if (clump_count < 0) throw ConfigError("initial.clumps: must be nonnegative");
  table_by_name(slow_table).validate();
  table_by_name(fast_table).validate();
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& k : keys()) {
    if (key == k.name) {
      k.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("configuration syntax: ") + e.what());
  }
  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      set_config_value(config, section + "." + key, value.get_value<std::string>());
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration '" + path + "'");
  return parse_config(in);
}

std::string emit_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : keys()) {
    const std::string name = k.name;
    const auto dot = name.find('.');
    const std::string s = name.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    out << name.substr(dot + 1) << " = " << k.get(config) << '\n';
  }
  return out.str();
}

}  // namespace mrflow
