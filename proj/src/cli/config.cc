/*
 Copyright 2026 The varlift Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "varlift/cli/config.h"

#include <fstream>

namespace varlift::cli {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

int get_int(const json& j, const char* key) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(key, "missing");
  if (!v->is_number_integer()) throw ConfigError(key, "must be an integer");
  return v->get<int>();
}

double as_double(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "must be a number");
  return v.get<double>();
}

std::vector<std::string> string_list(const json& v, const std::string& field,
                                     std::optional<std::size_t> size) {
  if (!v.is_array()) throw ConfigError(field, "must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ConfigError(field, "entries must be strings");
    out.push_back(e.get<std::string>());
  }
  if (size && out.size() != *size) {
    throw ConfigError(field, "expected " + std::to_string(*size) +
                                 " entries, got " + std::to_string(out.size()));
  }
  return out;
}

Grid string_grid(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "must be an array of arrays");
  Grid out;
  for (const auto& row : v) out.push_back(string_list(row, field, std::nullopt));
  return out;
}

Eigen::VectorXd vector_of(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "must be an array of numbers");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = as_double(v[i], field);
  return out;
}

Eigen::MatrixXd matrix_of(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "must be a non-empty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Eigen::MatrixXd out(v.size(), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols) {
      throw ConfigError(field, "rows must be arrays of equal length");
    }
    for (std::size_t k = 0; k < cols; ++k) out(i, k) = as_double(v[i][k], field);
  }
  return out;
}

InputSpec input_of(const json& v, const std::string& field) {
  if (!v.is_object()) throw ConfigError(field, "must be an object");
  InputSpec spec;
  if (const json* k = find(v, "kind")) {
    if (!k->is_string()) throw ConfigError(field + ".kind", "must be a string");
    spec.kind = k->get<std::string>();
  }
  const json* values = find(v, "values");
  if (!values) throw ConfigError(field + ".values", "missing");
  if (spec.kind == "constant") {
    spec.values.push_back(std::vector<double>());
    for (const auto& e : *values) spec.values[0].push_back(as_double(e, field + ".values"));
  } else if (spec.kind == "piecewise-constant" || spec.kind == "sampled-table") {
    const json* times = find(v, "times");
    if (!times || !times->is_array()) throw ConfigError(field + ".times", "missing");
    for (const auto& t : *times) spec.times.push_back(as_double(t, field + ".times"));
    if (!values->is_array()) throw ConfigError(field + ".values", "must be an array");
    for (const auto& row : *values) {
      if (!row.is_array()) throw ConfigError(field + ".values", "rows must be arrays");
      std::vector<double> r;
      for (const auto& e : row) r.push_back(as_double(e, field + ".values"));
      spec.values.push_back(std::move(r));
    }
    if (spec.values.size() != spec.times.size()) {
      throw ConfigError(field, "times and values differ in length");
    }
  } else {
    throw ConfigError(field + ".kind",
                      "unknown input kind '" + spec.kind +
                          "' (constant | piecewise-constant | sampled-table)");
  }
  return spec;
}

// Parses every expression of a list so syntax errors surface before any
// command runs.
void check_expressions(const std::vector<std::string>& list, int n) {
  for (const auto& s : list) expr::parse(s, n);
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

json canonical(const std::vector<std::string>& list, int n) {
  json out = json::array();
  for (const auto& s : list) out.push_back(expr::unparse(expr::parse(s, n)));
  return out;
}

json canonical_grid(const Grid& grid, int n) {
  json out = json::array();
  for (const auto& row : grid) out.push_back(canonical(row, n));
  return out;
}

json input_json(const InputSpec& spec) {
  json out{{"kind", spec.kind}};
  if (spec.kind == "constant") {
    out["values"] = spec.values.empty() ? json::array() : json(spec.values[0]);
  } else {
    out["times"] = spec.times;
    out["values"] = spec.values;
  }
  return out;
}

}  // namespace

SystemConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  SystemConfig cfg;
  cfg.n = get_int(j, "n");
  if (cfg.n < 1) throw ConfigError("n", "must be >= 1");
  cfg.m = find(j, "m") ? get_int(j, "m") : 0;
  if (cfg.m < 0) throw ConfigError("m", "must be >= 0");
  const int n = cfg.n;

  if (const json* v = find(j, "f")) {
    cfg.f = string_list(*v, "f", n);
    check_expressions(*cfg.f, n);
  }
  if (const json* v = find(j, "g")) {
    cfg.g = string_grid(*v, "g");
    if (!cfg.g.empty() && static_cast<int>(cfg.g.size()) != cfg.m) {
      throw ConfigError("g", "expected " + std::to_string(cfg.m) +
                                 " input fields, got " + std::to_string(cfg.g.size()));
    }
    for (const auto& col : cfg.g) {
      if (static_cast<int>(col.size()) != n) {
        throw ConfigError("g", "each input field needs " + std::to_string(n) +
                                   " components");
      }
      check_expressions(col, n);
    }
  }
  if (const json* v = find(j, "h")) {
    cfg.h = string_list(*v, "h", static_cast<std::size_t>(cfg.m));
    check_expressions(cfg.h, n);
  } else if (cfg.m > 0) {
    throw ConfigError("h", "missing (m = " + std::to_string(cfg.m) + ")");
  }
  if (const json* v = find(j, "Pi")) {
    cfg.Pi = string_grid(*v, "Pi");
    if (static_cast<int>(cfg.Pi->size()) != n) {
      throw ConfigError("Pi", "lower triangle needs " + std::to_string(n) + " rows");
    }
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>((*cfg.Pi)[i].size()) != i + 1) {
        throw ConfigError("Pi", "row " + std::to_string(i + 1) + " needs " +
                                    std::to_string(i + 1) + " entries");
      }
      check_expressions((*cfg.Pi)[i], n);
    }
  }
  if (const json* v = find(j, "P")) {
    if (!v->is_string()) throw ConfigError("P", "must be an expression string");
    cfg.P = v->get<std::string>();
    expr::parse(*cfg.P, n);
  }
  for (const char* key : {"U", "V"}) {
    if (const json* v = find(j, key)) {
      Grid grid = string_grid(*v, key);
      if (static_cast<int>(grid.size()) != n) {
        throw ConfigError(key, "must be " + std::to_string(n) + " x " + std::to_string(n));
      }
      for (const auto& row : grid) {
        if (static_cast<int>(row.size()) != n) {
          throw ConfigError(key, "must be " + std::to_string(n) + " x " + std::to_string(n));
        }
        check_expressions(row, n);
      }
      (key[0] == 'U' ? cfg.U : cfg.V) = std::move(grid);
    }
  }
  if (const json* v = find(j, "section")) {
    cfg.section = string_list(*v, "section", n);
    check_expressions(*cfg.section, n);
  }
  if (const json* v = find(j, "domain")) {
    if (!v->is_array() || static_cast<int>(v->size()) != n) {
      throw ConfigError("domain", "needs one [lo, hi] pair per dimension");
    }
    Box box{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
      const json& pair = (*v)[i];
      if (!pair.is_array() || pair.size() != 2) {
        throw ConfigError("domain", "entries must be [lo, hi] pairs");
      }
      box.lo[i] = as_double(pair[0], "domain");
      box.hi[i] = as_double(pair[1], "domain");
      if (!(box.lo[i] < box.hi[i])) {
        throw ConfigError("domain", "axis " + std::to_string(i + 1) +
                                        " is degenerate (need lo < hi)");
      }
    }
    cfg.domain = std::move(box);
  }
  if (const json* v = find(j, "samples")) {
    if (!v->is_object()) throw ConfigError("samples", "must be an object");
    if (find(*v, "random")) {
      cfg.random_count = get_int(*v, "random");
      if (*cfg.random_count < 1) throw ConfigError("samples.random", "must be >= 1");
    }
    if (find(*v, "grid")) {
      cfg.grid = get_int(*v, "grid");
      if (*cfg.grid < 1) throw ConfigError("samples.grid", "must be >= 1");
    }
    if (const json* s = find(*v, "seed")) {
      if (!s->is_number_unsigned() && !s->is_number_integer()) {
        throw ConfigError("samples.seed", "must be a non-negative integer");
      }
      cfg.seed = s->get<std::uint64_t>();
    }
  }
  auto state_vec = [&](const char* key, std::optional<Eigen::VectorXd>& dst) {
    if (const json* v = find(j, key)) dst = vector_of(*v, key);
  };
  state_vec("x0", cfg.x0);
  state_vec("dx0", cfg.dx0);
  state_vec("p0", cfg.p0);
  if (const json* v = find(j, "input")) cfg.input = input_of(*v, "input");
  if (const json* v = find(j, "du_var")) cfg.du_var = input_of(*v, "du_var");
  if (const json* v = find(j, "du_adj")) cfg.du_adj = input_of(*v, "du_adj");
  if (const json* v = find(j, "T")) cfg.T = as_double(*v, "T");
  if (const json* v = find(j, "dt")) cfg.dt = as_double(*v, "dt");
  if (const json* v = find(j, "A")) cfg.A = matrix_of(*v, "A");
  if (const json* v = find(j, "B")) cfg.B = matrix_of(*v, "B");
  if (const json* v = find(j, "C")) cfg.C = matrix_of(*v, "C");
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json resolved_config(const SystemConfig& cfg) {
  const int n = cfg.n;
  json out{{"n", n}, {"m", cfg.m}};
  if (cfg.f) out["f"] = canonical(*cfg.f, n);
  if (!cfg.g.empty()) out["g"] = canonical_grid(cfg.g, n);
  out["h"] = canonical(cfg.h, n);
  if (cfg.Pi) out["Pi"] = canonical_grid(*cfg.Pi, n);
  if (cfg.P) out["P"] = expr::unparse(expr::parse(*cfg.P, n));
  if (cfg.U) out["U"] = canonical_grid(*cfg.U, n);
  if (cfg.V) out["V"] = canonical_grid(*cfg.V, n);
  if (cfg.section) out["section"] = canonical(*cfg.section, n);
  if (cfg.domain) {
    json d = json::array();
    for (int i = 0; i < n; ++i) d.push_back({cfg.domain->lo[i], cfg.domain->hi[i]});
    out["domain"] = d;
    const SampleSpec spec = build_samples(cfg);
    out["samples"] = spec.random_count
                         ? json{{"random", *spec.random_count}, {"seed", spec.seed}}
                         : json{{"grid", spec.grid}};
  }
  if (cfg.x0) out["x0"] = vector_json(*cfg.x0);
  if (cfg.dx0) out["dx0"] = vector_json(*cfg.dx0);
  if (cfg.p0) out["p0"] = vector_json(*cfg.p0);
  if (cfg.input) out["input"] = input_json(*cfg.input);
  if (cfg.du_var) out["du_var"] = input_json(*cfg.du_var);
  if (cfg.du_adj) out["du_adj"] = input_json(*cfg.du_adj);
  if (cfg.T) out["T"] = *cfg.T;
  if (cfg.dt) out["dt"] = *cfg.dt;
  if (cfg.A) out["A"] = matrix_json(*cfg.A);
  if (cfg.B) out["B"] = matrix_json(*cfg.B);
  if (cfg.C) out["C"] = matrix_json(*cfg.C);
  return out;
}

systems::ControlAffineSystem build_system(const SystemConfig& cfg) {
  if (!cfg.f) throw ConfigError("f", "missing");
  std::vector<expr::SmoothMap> g;
  for (const auto& col : cfg.g) g.push_back(expr::SmoothMap::parse(col, cfg.n));
  std::vector<expr::SmoothMap> h;
  for (const auto& s : cfg.h) h.push_back(expr::SmoothMap::parse_scalar(s, cfg.n));
  return systems::ControlAffineSystem(expr::SmoothMap::parse(*cfg.f, cfg.n),
                                      std::move(g), std::move(h));
}

expr::MetricField build_metric(const SystemConfig& cfg) {
  if (!cfg.Pi) throw ConfigError("Pi", "missing (required by this command)");
  return expr::MetricField::parse_lower(*cfg.Pi, cfg.n);
}

expr::SmoothMap build_potential(const SystemConfig& cfg) {
  if (!cfg.P) throw ConfigError("P", "missing (required by this command)");
  return expr::SmoothMap::parse_scalar(*cfg.P, cfg.n);
}

geometry::SubbundleUV build_subbundle(const SystemConfig& cfg) {
  if (!cfg.U) throw ConfigError("U", "missing (required by this command)");
  if (!cfg.V) throw ConfigError("V", "missing (required by this command)");
  return {expr::MatrixMap::parse(*cfg.U, cfg.n), expr::MatrixMap::parse(*cfg.V, cfg.n)};
}

expr::SmoothMap build_section(const SystemConfig& cfg) {
  if (!cfg.section) throw ConfigError("section", "missing (required by this command)");
  return expr::SmoothMap::parse(*cfg.section, cfg.n);
}

SampleSpec build_samples(const SystemConfig& cfg) {
  if (!cfg.domain) throw ConfigError("domain", "missing (required for sampling)");
  if (cfg.random_count) {
    return SampleSpec::random(*cfg.domain, *cfg.random_count, cfg.seed);
  }
  return SampleSpec::grid_of(*cfg.domain, cfg.grid.value_or(5));
}

sim::InputSignal build_input(const std::optional<InputSpec>& spec, int channels,
                             const char* field) {
  if (!spec) return sim::InputSignal::zero(channels);
  auto row = [&](const std::vector<double>& r) {
    if (static_cast<int>(r.size()) != channels) {
      throw ConfigError(field, "expected " + std::to_string(channels) +
                                   " channels, got " + std::to_string(r.size()));
    }
    return Eigen::Map<const Eigen::VectorXd>(r.data(), r.size()).eval();
  };
  if (spec->kind == "constant") return sim::InputSignal::constant(row(spec->values.at(0)));
  std::vector<Eigen::VectorXd> values;
  for (const auto& r : spec->values) values.push_back(row(r));
  try {
    if (spec->kind == "piecewise-constant") {
      return sim::InputSignal::piecewise_constant(spec->times, std::move(values));
    }
    return sim::InputSignal::sampled_table(spec->times, std::move(values));
  } catch (const DimensionError& e) {
    throw ConfigError(field, e.what());
  }
}

std::map<std::string, json> builtin_examples() {
  std::map<std::string, json> out;
  out["double_integrator"] = json::parse(R"json({
    "n": 2, "m": 1,
    "f": ["x2", "0"],
    "g": [["0", "1"]],
    "h": ["x1"],
    "Pi": [["sqrt(2)"], ["1", "sqrt(2)"]],
    "P": "0.5*(sqrt(2)*x1^2 + 2*x1*x2 + sqrt(2)*x2^2)",
    "U": [["sqrt(2)", "1"], ["1", "sqrt(2)"]],
    "V": [["1", "0"], ["0", "1"]],
    "section": ["1", "0"],
    "domain": [[-2, 2], [-2, 2]],
    "samples": {"random": 50, "seed": 7},
    "x0": [1, 2], "dx0": [0.5, -1],
    "input": {"kind": "constant", "values": [0.0]},
    "T": 5, "dt": 0.001
  })json");
  out["scalar_linear"] = json::parse(R"json({
    "n": 1, "m": 1,
    "f": ["-x1"],
    "g": [["1"]],
    "h": ["x1"],
    "Pi": [["sqrt(2) - 1"]],
    "P": "(sqrt(2) - 1)*x1^2/2",
    "section": ["1"],
    "domain": [[-2, 2]],
    "samples": {"random": 50, "seed": 7},
    "x0": [1], "dx0": [1],
    "T": 1, "dt": 0.001
  })json");
  out["cubic"] = json::parse(R"json({
    "n": 1, "m": 1,
    "f": ["-x1^3"],
    "h": ["x1"],
    "Pi": [["1/(4*x1^2)"]],
    "domain": [[0.5, 2]],
    "samples": {"random": 50, "seed": 7},
    "x0": [1], "dx0": [1],
    "T": 1, "dt": 0.001
  })json");
  out["rotation"] = json::parse(R"json({
    "n": 2, "m": 0,
    "f": ["x2", "-x1"],
    "Pi": [["1"], ["0", "1"]],
    "section": ["x1", "x2"],
    "domain": [[0.5, 2], [0.5, 2]],
    "samples": {"grid": 5},
    "x0": [1, 0], "dx0": [0.5, -0.25],
    "T": 10, "dt": 0.001
  })json");
  return out;
}

}  // namespace varlift::cli
