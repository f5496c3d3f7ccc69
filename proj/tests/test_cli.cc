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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "doctest.h"
#include "varlift/cli/commands.h"
#include "varlift/cli/json_out.h"

using namespace varlift;
using namespace varlift::cli;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("varlift_test_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_config(const std::string& name, const json& j) {
  const fs::path p = scratch_dir() / (name + ".json");
  std::ofstream(p) << j.dump(2);
  return p.string();
}

json example(const std::string& name) { return builtin_examples().at(name); }

CommonOptions opts_for(const std::string& path) {
  CommonOptions o;
  o.config_path = path;
  return o;
}

json parsed(const CommandResult& r) { return json::parse(r.out); }

}  // namespace

TEST_CASE("json output format") {
  json j{{"b", 0.1}, {"a", {1.0, NAN, 3}}, {"c", "s"}};
  const std::string s = dump_json(j, 0);
  CHECK(s == "{\"a\":[1.0,null,3],\"b\":0.10000000000000001,\"c\":\"s\"}\n");
  CHECK(dump_json(json::object()) == "{}\n");
}

TEST_CASE("config validation names the offending field") {
  auto field_of = [](const json& j) -> std::string {
    try {
      parse_config(j);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  json base = example("double_integrator");
  CHECK(field_of(base).empty());

  json j = base;
  j.erase("n");
  CHECK(field_of(j) == "n");
  j = base;
  j["f"] = {"x2"};
  CHECK(field_of(j) == "f");
  j = base;
  j["g"] = json::array({json::array({"1"})});
  CHECK(field_of(j) == "g");
  j = base;
  j["h"] = json::array();
  CHECK(field_of(j) == "h");
  j = base;
  j["Pi"] = json::array({json::array({"1", "2"}), json::array({"1", "2"})});
  CHECK(field_of(j) == "Pi");
  j = base;
  j["domain"] = {{0, 0}, {0, 1}};
  CHECK(field_of(j) == "domain");
  j = base;
  j["input"] = {{"kind", "sine"}, {"values", {1}}};
  CHECK(field_of(j) == "input.kind");

  j = base;
  j["f"] = {"x3", "0"};
  CHECK_THROWS_AS(parse_config(j), ParseError);
}

TEST_CASE("resolved config echo is canonical and re-parsable") {
  const SystemConfig cfg = parse_config(example("double_integrator"));
  const json echo = resolved_config(cfg);
  CHECK(echo["f"] == json({"x2", "0"}));
  CHECK(echo["samples"]["seed"] == 7);
  CHECK(echo["samples"]["random"] == 50);
  const json again = resolved_config(parse_config(echo));
  CHECK(dump_json(echo) == dump_json(again));
}

TEST_CASE("check riccati exit codes") {
  const std::string good = write_config("di", example("double_integrator"));
  auto r = cmd_check("riccati", [&] {
    auto o = opts_for(good);
    o.tol = 1e-8;
    return o;
  }());
  CHECK(r.exit_code == kExitPass);
  json rep = parsed(r);
  CHECK(rep["check"] == "riccati");
  CHECK(rep["pass"] == true);
  CHECK(rep["records"].size() == 50);
  CHECK(rep["seed"] == 7);
  CHECK(rep.contains("config"));
  CHECK(rep["max_residual"].get<double>() <= 1e-8);

  json ident = example("double_integrator");
  ident["Pi"] = json::array({json::array({"1"}), json::array({"0", "1"})});
  r = cmd_check("riccati", opts_for(write_config("di_identity", ident)));
  CHECK(r.exit_code == kExitFail);
  rep = parsed(r);
  CHECK(rep["pass"] == false);
  CHECK(rep["max_residual"].get<double>() == doctest::Approx(2.0));

  json missing = example("double_integrator");
  missing.erase("Pi");
  r = cmd_check("riccati", opts_for(write_config("di_missing", missing)));
  CHECK(r.exit_code == kExitError);
  CHECK(r.err.find("Pi") != std::string::npos);

  CHECK(cmd_check("nonsense", opts_for(good)).exit_code == kExitError);
  CHECK(cmd_check("riccati", opts_for("/nonexistent/none.json")).exit_code == kExitError);
}

TEST_CASE("other checks over the corpus") {
  const std::string di = write_config("di", example("double_integrator"));
  CHECK(cmd_check("hjb", opts_for(di)).exit_code == kExitPass);
  CHECK(cmd_check("integrability", opts_for(di)).exit_code == kExitPass);
  CHECK(cmd_check("lagrangian", opts_for(di)).exit_code == kExitPass);
  CHECK(cmd_check("input-invariance", opts_for(di)).exit_code == kExitPass);
  CHECK(cmd_check("lyapunov", opts_for(di)).exit_code == kExitError);

  const std::string cubic = write_config("cubic", example("cubic"));
  CHECK(cmd_check("lyapunov", opts_for(cubic)).exit_code == kExitPass);
  CHECK(cmd_check("hjb", opts_for(cubic)).exit_code == kExitError);

  json bad = example("double_integrator");
  bad["Pi"] = json::array({json::array({"1"}), json::array({"x1", "1"})});
  const auto r = cmd_check("integrability", opts_for(write_config("di_bad_pi", bad)));
  CHECK(r.exit_code == kExitFail);
  CHECK(parsed(r)["max_residual"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("flags override sampling") {
  const std::string di = write_config("di", example("double_integrator"));
  auto o = opts_for(di);
  o.grid = 3;
  json rep = parsed(cmd_check("riccati", o));
  CHECK(rep["records"].size() == 9);
  CHECK(rep["seed"].is_null());
  o = opts_for(di);
  o.random_count = 5;
  o.seed = 123;
  rep = parsed(cmd_check("riccati", o));
  CHECK(rep["records"].size() == 5);
  CHECK(rep["seed"] == 123);
}

TEST_CASE("reports are byte-deterministic") {
  const std::string di = write_config("di", example("double_integrator"));
  const auto a = cmd_check("riccati", opts_for(di));
  const auto b = cmd_check("riccati", opts_for(di));
  CHECK(a.out == b.out);
  auto o = opts_for(di);
  o.seed = 8;
  CHECK(cmd_check("riccati", o).out != a.out);
}

TEST_CASE("simulate") {
  const std::string sc = write_config("scalar", example("scalar_linear"));
  auto r = cmd_simulate(opts_for(sc));
  CHECK(r.exit_code == kExitPass);
  json rep = parsed(r);
  CHECK(rep["final_state"][0].get<double>() == doctest::Approx(0.3678794).epsilon(1e-7));
  CHECK(rep["blew_up"] == false);

  const std::string di = write_config("di", example("double_integrator"));
  auto o = opts_for(di);
  o.system = "diffham";
  const fs::path csv = scratch_dir() / "diffham.csv";
  o.out = csv.string();
  r = cmd_simulate(o);
  CHECK(r.exit_code == kExitPass);
  rep = parsed(r);
  CHECK(rep["pairing"]["nonincreasing"] == true);
  CHECK(rep["graph_drift"]["max"].get<double>() <= 1e-7);
  CHECK(rep["graph_drift"]["verdict"] == "consistent");
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x1,x2,dx1,dx2,p1,p2,y1,dyvar1,dyadj1");

  json no_dx = example("double_integrator");
  no_dx.erase("dx0");
  o = opts_for(write_config("di_no_dx", no_dx));
  o.system = "prolonged";
  CHECK(cmd_simulate(o).exit_code == kExitError);

  o = opts_for(di);
  o.system = "warp";
  CHECK(cmd_simulate(o).exit_code == kExitError);

  json esc = example("cubic");
  esc["f"] = {"x1^3"};
  o = opts_for(write_config("escape", esc));
  o.T = 2;
  r = cmd_simulate(o);
  CHECK(r.exit_code == kExitFail);
  rep = parsed(r);
  CHECK(rep["blew_up"] == true);
  CHECK(rep["truncation_time"].get<double>() < 1.0);
}

TEST_CASE("solve-lqr") {
  auto r = cmd_solve_lqr(opts_for(write_config("di", example("double_integrator"))));
  CHECK(r.exit_code == kExitPass);
  json rep = parsed(r);
  const double s2 = std::sqrt(2.0);
  CHECK(rep["P"][0][0].get<double>() == doctest::Approx(s2).epsilon(1e-9));
  CHECK(rep["P"][0][1].get<double>() == doctest::Approx(1).epsilon(1e-9));
  CHECK(rep["P"][1][1].get<double>() == doctest::Approx(s2).epsilon(1e-9));
  for (const auto& e : rep["closed_loop_eigenvalues"]) CHECK(e[0].get<double>() < 0);

  r = cmd_solve_lqr(opts_for(write_config("scalar", example("scalar_linear"))));
  CHECK(r.exit_code == kExitPass);
  CHECK(parsed(r)["P"][0][0].get<double>() == doctest::Approx(s2 - 1).epsilon(1e-10));

  json cubic = example("scalar_linear");
  cubic["f"] = {"-x1^3"};
  r = cmd_solve_lqr(opts_for(write_config("cubic_lqr", cubic)));
  CHECK(r.exit_code == kExitError);
  CHECK(r.err.find("not linear") != std::string::npos);

  json explicit_abc{{"n", 1}, {"A", {{0.0}}}, {"B", {{1.0}}}, {"C", {{1.0}}}};
  r = cmd_solve_lqr(opts_for(write_config("abc", explicit_abc)));
  CHECK(r.exit_code == kExitPass);
  CHECK(parsed(r)["P"][0][0].get<double>() == doctest::Approx(1).epsilon(1e-10));

  json unstab{{"n", 2},
              {"A", {{1.0, 0.0}, {0.0, 1.0}}},
              {"B", {{1.0}, {0.0}}},
              {"C", {{1.0, 1.0}}}};
  CHECK(cmd_solve_lqr(opts_for(write_config("unstab", unstab))).exit_code == kExitFail);
}

TEST_CASE("eigsec") {
  json sc = example("scalar_linear");
  auto r = cmd_eigsec(opts_for(write_config("scalar", sc)));
  CHECK(r.exit_code == kExitPass);
  json rep = parsed(r);
  for (const auto& g : rep["gamma"]) CHECK(g.get<double>() == doctest::Approx(1.0));

  r = cmd_eigsec(opts_for(write_config("di", example("double_integrator"))));
  CHECK(r.exit_code == kExitPass);
  rep = parsed(r);
  for (const auto& g : rep["gamma"]) CHECK(g.get<double>() == 0.0);

  sc["section"] = {"x1"};
  sc["samples"] = {{"grid", 5}};
  r = cmd_eigsec(opts_for(write_config("scalar_zero", sc)));
  CHECK(r.exit_code == kExitError);

  auto o = opts_for(write_config("di", example("double_integrator")));
  o.kind = "left";
  r = cmd_eigsec(o);
  CHECK(r.exit_code == kExitFail);
  o.kind = "sideways";
  CHECK(cmd_eigsec(o).exit_code == kExitError);
}

TEST_CASE("examples export") {
  const auto all = cmd_examples(std::nullopt);
  CHECK(all.exit_code == kExitPass);
  const json j = json::parse(all.out);
  CHECK(j.size() == 4);
  for (const char* name : {"double_integrator", "scalar_linear", "cubic", "rotation"}) {
    CHECK(j.contains(name));
    CHECK_NOTHROW(parse_config(j[name]));
  }
  const fs::path dir = scratch_dir() / "corpus";
  CHECK(cmd_examples(dir.string()).exit_code == kExitPass);
  CHECK(fs::exists(dir / "rotation.json"));
}
