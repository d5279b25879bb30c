#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "saddle/config.hpp"
#include "saddle/error.hpp"
#include "saddle/io.hpp"
#include "saddle/runner.hpp"
#include "test_support.hpp"

using namespace saddle;
using namespace saddle::testing;

namespace {

std::string config_error(std::string_view text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError");
  return {};
}

const char* kSquareDomain = R"("domain": {"name": "sq", "n": 2, "angles": [1.5707963267948966, 1.5707963267948966, 1.5707963267948966, 1.5707963267948966]})";

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("saddle_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(-2.5e-12) == "-2.5e-12");
  CHECK(format_number(123456789012.0) == "1.23456789e+11");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(round9(1.0 / 3.0) == 0.333333333);
  CHECK(round9(2.0) == 2.0);
}

TEST_CASE("OBJ output") {
  ObjMesh m;
  m.positions = {{0, 0, 0}, {1, 0, 0.5}, {0, 1, -0.25}};
  m.triangles = {{0, 1, 2}};
  CHECK(to_obj(m, "tri") == "# tri\nv 0 0 0\nv 1 0 0.5\nv 0 1 -0.25\nf 1 2 3\n");
  CHECK(to_obj(m) == "v 0 0 0\nv 1 0 0.5\nv 0 1 -0.25\nf 1 2 3\n");
}

TEST_CASE("graph OBJ clamps to the cap") {
  auto mesh = mesh_of(square(), 0.25, 1.0);
  const GraphSolution s = solve_capped(mesh, 3.0, 1e-9);
  const ObjMesh o = graph_obj(s);
  REQUIRE(o.positions.size() == mesh->node_count());
  CHECK(o.triangles.size() == mesh->triangle_count());
  for (std::size_t i = 0; i < o.positions.size(); ++i) {
    CHECK(std::abs(o.positions[i].z) <= 3.0);
    CHECK(o.positions[i].x == mesh->nodes[i].x);
  }
}

TEST_CASE("CSV tables") {
  CsvTable t({"a", "b", "c"});
  t.row().cell("x").cell(1).cell(0.5);
  t.row().cell("y").cell(-2).cell(1e-10);
  CHECK(t.str() == "a,b,c\nx,1,0.5\ny,-2,1e-10\n");
  const std::vector<EdgeFlux> rows{{0, 1, 0.999, 0.001}, {1, -1, -0.998, 0.002}};
  CHECK(edge_flux_csv(rows) == "edge,marking,flux,defect\n0,1,0.999,0.001\n1,-1,-0.998,0.002\n");
}

TEST_CASE("write_text reports unwritable paths") {
  const auto dir = scratch_dir("write");
  write_text(dir / "a.txt", "hello\n");
  std::ifstream f(dir / "a.txt");
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == "hello\n");
  try {
    write_text(dir / "missing" / "a.txt", "x");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("minimal solve config") {
  const ExperimentConfig c = parse_config(std::string("{\"mode\": \"solve\", ") + kSquareDomain + "}");
  CHECK(c.mode == Mode::Solve);
  REQUIRE(c.domain);
  CHECK(c.domain->name == "sq");
  CHECK(c.mesh.h == 0.05);
  CHECK(c.caps == std::vector<double>{2, 3, 4, 5, 6});
  CHECK(c.output == "out");
  CHECK_FALSE(c.sequence);
}

TEST_CASE("full config") {
  const std::string text = std::string(R"({
  "mode": "flux-report",
  "name": "demo",
  )") + kSquareDomain + R"(,
  "mesh": {"h": 0.1, "g": 0.5, "refine": 1},
  "solver": {"caps": [1, 2, 4], "tol": 1e-8, "cauchy_tol": 1e-2, "core_margin": 0.2,
             "max_newton_iterations": 50, "initial": "zero-interior"},
  "probes": [[0.5, 0.5], [0.25, 0.75]],
  "output": "elsewhere"
})";
  const ExperimentConfig c = parse_config(text);
  CHECK(c.mode == Mode::FluxReport);
  CHECK(c.name == "demo");
  CHECK(c.mesh.h == 0.1);
  CHECK(c.mesh.g == 0.5);
  CHECK(c.refine == 1);
  CHECK(c.caps == std::vector<double>{1, 2, 4});
  CHECK(c.js.tol == 1e-8);
  CHECK(c.js.cauchy_tol == 1e-2);
  CHECK(c.js.core_margin == 0.2);
  CHECK(c.js.solve.max_newton_iterations == 50);
  CHECK(c.js.solve.initial == InitialGuess::ZeroInterior);
  REQUIRE(c.probes.size() == 2);
  CHECK(near(c.probes[1], {0.25, 0.75}, 0.0));
  CHECK(c.output == "elsewhere");
}

TEST_CASE("sequence config") {
  const std::string text = R"({
  "mode": "sequence",
  "sequence": {
    "members": [
      {"parameter": 0.4, "domain": {"n": 3, "angles": [1.3707963267948966, 0.4, 1.3707963267948966, 1.3707963267948966, 0.4, 1.3707963267948966]}},
      {"parameter": 0.2, "domain": {"n": 3, "angles": [1.4707963267948966, 0.2, 1.4707963267948966, 1.4707963267948966, 0.2, 1.4707963267948966]}}
    ],
    "limit_tol": 0.2,
    "anchor": [0.5, 0.5],
    "window": {"center": [0.5, 0.4], "side": 0.3, "resolution": 5}
  }
})";
  const ExperimentConfig c = parse_config(text);
  REQUIRE(c.sequence);
  CHECK(c.sequence->parameters == std::vector<double>{0.4, 0.2});
  CHECK(c.sequence->members.size() == 2);
  CHECK(c.sequence->limit_tol == 0.2);
  REQUIRE(c.sequence->anchor);
  CHECK_FALSE(c.sequence->second_anchor);
  CHECK(c.sequence->window.resolution == 5);
  CHECK(near(c.sequence->window.center, {0.5, 0.4}, 0.0));
}

TEST_CASE("domain files resolve against the config directory") {
  const auto dir = scratch_dir("domain");
  write_text(dir / "sq.domain", "name = file-square\nn = 2\nangles = [1.5707963267948966, 1.5707963267948966, "
                                "1.5707963267948966, 1.5707963267948966]\n");
  write_text(dir / "cfg.json", R"({"mode": "export", "domain": "sq.domain"})");
  const ExperimentConfig c = load_config(dir / "cfg.json");
  REQUIRE(c.domain);
  CHECK(c.domain->name == "file-square");
  CHECK(c.mode == Mode::Export);
  write_text(dir / "bad.json", R"({"mode": "export", "domain": "nope.domain"})");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), Error);
  CHECK_THROWS_AS(load_config(dir / "absent.json"), Error);
}

TEST_CASE("config errors carry line and column") {
  CHECK(config_error("{\n  \"mode\": \"solve\",\n  \"colour\": 1\n}") == "cfg.json:3:3: unknown key 'colour' in config");
  CHECK(config_error(std::string("{\"mode\": \"solve\", ") + kSquareDomain + ",\n \"mesh\": {\"h\": 2}}") ==
        "cfg.json:2:11: 'h' = 2 outside [0.001, 0.5]");
  CHECK(config_error("{\"mode\": \"draw\"}") == "cfg.json:1:2: unknown mode 'draw'");
  CHECK(config_error("{}") == "cfg.json:1:1: missing 'mode'");
  CHECK(config_error("{\"mode\": \"solve\"}").find("needs a 'domain'") != std::string::npos);
  CHECK(config_error("{\"mode\": \"solve\",\n\n  oops}").rfind("cfg.json:3:", 0) == 0);
  CHECK(config_error("{\"mode\": \"solve\", \"domain\": {\"n\": 2, \"angles\": [1, 1, 1, 1]}}").find("NonClosing") !=
        std::string::npos);
  CHECK(config_error(std::string("{\"mode\": \"solve\", ") + kSquareDomain + ", \"solver\": {\"caps\": [3, 2]}}")
            .find("increasing") != std::string::npos);
  CHECK(config_error(std::string("{\"mode\": \"solve\", ") + kSquareDomain + ", \"sequence\": {}}")
            .find("only valid in mode 'sequence'") != std::string::npos);
  CHECK(config_error("{\"mode\": \"sequence\", \"sequence\": {\"members\": []}}").find("at least two") !=
        std::string::npos);
  CHECK(config_error(std::string("{\"mode\": \"solve\", ") + kSquareDomain + ", \"solver\": {\"initial\": \"random\"}}")
            .find("'initial' must be") != std::string::npos);
}

TEST_CASE("mode names") {
  CHECK(to_string(Mode::Solve) == "solve");
  CHECK(to_string(Mode::FluxReport) == "flux-report");
  CHECK(to_string(Mode::Sequence) == "sequence");
  CHECK(to_string(Mode::Compare) == "compare");
  CHECK(to_string(Mode::Export) == "export");
}

TEST_CASE("error records") {
  const Error e(ErrorKind::NoStabilization, "jssolver", "core moved");
  CHECK(error_record(e) == "{\n  \"kind\": \"NoStabilization\",\n  \"module\": \"jssolver\",\n  \"message\": \"core moved\"\n}\n");
}

TEST_CASE("export run writes the mesh") {
  const auto dir = scratch_dir("export");
  ExperimentConfig c = parse_config(std::string("{\"mode\": \"export\", ") + kSquareDomain + ", \"mesh\": {\"h\": 0.25}}");
  const RunResult r = run_experiment(c, {dir, 1});
  CHECK(std::filesystem::exists(dir / "mesh.obj"));
  CHECK(std::filesystem::exists(dir / "mesh.json"));
  CHECK(r.files.size() == 2);
}

TEST_CASE("compare requires the unit square") {
  const auto dir = scratch_dir("compare");
  ExperimentConfig c = parse_config(
      R"({"mode": "compare", "domain": {"n": 3, "angles": [1.0471975511965976, 1.0471975511965976, 1.0471975511965976, 1.0471975511965976, 1.0471975511965976, 1.0471975511965976]}})");
  try {
    run_experiment(c, {dir, 1});
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
  }
}
