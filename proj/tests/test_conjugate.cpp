#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "saddle/conjugate.hpp"
#include "saddle/error.hpp"
#include "test_support.hpp"

using namespace saddle;
using namespace saddle::testing;

namespace {

double path_length(const std::vector<Vec2>& path) {
  double out = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) out += distance(path[k - 1], path[k]);
  return out;
}

std::vector<Vec2> closed_square(Vec2 lo, double side) {
  return {lo, lo + Vec2{side, 0}, lo + Vec2{side, side}, lo + Vec2{0, side}, lo};
}

}  // namespace

TEST_CASE("flat graph has a constant conjugate") {
  auto m = mesh_of(hexagon(), 0.1);
  const GraphSolution s = solve_capped(m, 0.0, 1e-9);
  const ConjugateField c = conjugate_function(s);
  for (double v : c.psi) CHECK(v == 0.0);
  CHECK(c.loop_defect == 0.0);
  const std::vector<Vec2> path{{0.2, 0.3}, {0.8, 1.1}};
  CHECK(flux(s, path) == 0.0);
}

TEST_CASE("flat graph conjugate surface is the rotated domain") {
  auto m = mesh_of(square(), 0.1);
  const GraphSolution s = solve_capped(m, 0.0, 1e-9);
  const ConjugateSurface c = conjugate_surface(s);
  for (std::size_t i = 0; i < m->node_count(); ++i) {
    const Vec2 q = m->nodes[i];
    CHECK(c.positions[i].x == doctest::Approx(q.y).scale(1.0).epsilon(1e-12));
    CHECK(c.positions[i].y == doctest::Approx(-q.x).scale(1.0).epsilon(1e-12));
    CHECK(c.positions[i].z == 0.0);
  }
  for (double d : c.loop_defects) CHECK(d <= 1e-12);
}

TEST_CASE("conjugate vertex values alternate between 0 and 1") {
  for (const char* key : {"square", "hexagon"}) {
    const MarkedPolygon p = std::string(key) == "square" ? square() : hexagon();
    const GraphSolution& s = js_solution(key, p, 0.05);
    const ConjugateField c = conjugate_function(s);
    CHECK(c.psi[c.anchor] == 0.0);
    CHECK(c.loop_defect <= 1e-10);
    for (int k = 0; k < p.edge_count(); ++k) CHECK(c.psi[k] == doctest::Approx(k % 2 == 0 ? 0.0 : 1.0).epsilon(0.02).scale(1.0));
    for (double v : c.psi) {
      CHECK(v >= -0.02);
      CHECK(v <= 1.02);
    }
  }
}

TEST_CASE("edge fluxes match the markings") {
  for (const char* key : {"square", "hexagon"}) {
    const MarkedPolygon p = std::string(key) == "square" ? square() : hexagon();
    const GraphSolution& s = js_solution(key, p, 0.05);
    const auto report = edge_flux_report(s);
    REQUIRE(report.size() == static_cast<std::size_t>(p.edge_count()));
    double total = 0.0;
    for (const EdgeFlux& e : report) {
      CHECK(e.marking == p.marking(e.edge));
      CHECK(e.defect <= 0.02);
      CHECK(e.defect == doctest::Approx(std::abs(e.flux - e.marking)));
      total += e.flux;
    }
    CHECK(std::abs(total) <= 1e-6);
  }
}

TEST_CASE("closed loops carry no flux") {
  const GraphSolution& s = js_solution("square", square(), 0.05);
  CHECK(std::abs(flux(s, closed_square({0.3, 0.3}, 0.4))) <= 1e-3);
  CHECK(std::abs(flux(s, closed_square({0.05, 0.05}, 0.9))) <= 1e-3);
  const std::vector<Vec2> triangle{{0.1, 0.2}, {0.9, 0.4}, {0.4, 0.85}, {0.1, 0.2}};
  CHECK(std::abs(flux(s, triangle)) <= 1e-3);
}

TEST_CASE("homotopic paths have the same flux") {
  const GraphSolution& s = js_solution("hexagon", hexagon(), 0.05);
  const std::vector<Vec2> direct{{0.2, 0.3}, {0.9, 1.4}};
  const std::vector<Vec2> detour{{0.2, 0.3}, {1.1, 0.5}, {1.2, 1.0}, {0.9, 1.4}};
  const std::vector<Vec2> other{{0.2, 0.3}, {-0.2, 0.9}, {0.4, 1.5}, {0.9, 1.4}};
  const double f = flux(s, direct);
  CHECK(flux(s, detour) == doctest::Approx(f).epsilon(1e-3).scale(1.0));
  CHECK(flux(s, other) == doctest::Approx(f).epsilon(1e-3).scale(1.0));
  std::vector<Vec2> back(direct.rbegin(), direct.rend());
  CHECK(flux(s, back) == doctest::Approx(-f).scale(1.0).epsilon(1e-12));
}

TEST_CASE("flux through a path never exceeds its length") {
  const GraphSolution& s = js_solution("square", square(), 0.05);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vec2> path;
    const int k = 2 + trial % 4;
    for (int j = 0; j < k; ++j) path.push_back({u(rng), u(rng)});
    CHECK(std::abs(flux(s, path)) <= path_length(path) + 0.02);
  }
}

TEST_CASE("conjugate is affine along the boundary edges") {
  const GraphSolution& s = js_solution("square", square(), 0.05);
  const ConjugateField c = conjugate_function(s);
  const TriMesh& m = *s.mesh;
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    if (m.tags[i].kind != NodeKind::Edge) continue;
    const int e = m.tags[i].id;
    const double t = distance(m.nodes[i], m.polygon.vertex(e));
    const double expect = e % 2 == 0 ? t : 1.0 - t;
    CHECK(std::abs(c.psi[i] - expect) <= 0.03);
  }
}

TEST_CASE("paths leaving the polygon are rejected") {
  const GraphSolution& s = js_solution("square", square(), 0.05);
  const std::vector<Vec2> path{{0.5, 0.5}, {1.5, 0.5}};
  try {
    flux(s, path);
    FAIL("expected PathOutsideDomain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PathOutsideDomain);
  }
}

TEST_CASE("conjugate surface carries psi as its height") {
  const GraphSolution& s = js_solution("hexagon", hexagon(), 0.05);
  const ConjugateField f = conjugate_function(s);
  const ConjugateSurface c = conjugate_surface(s);
  REQUIRE(c.positions.size() == f.psi.size());
  for (std::size_t i = 0; i < f.psi.size(); ++i) CHECK(c.positions[i].z == f.psi[i]);
  CHECK(c.period.x == 0.0);
  CHECK(c.period.y == 0.0);
  CHECK(c.period.z == 2.0);
  CHECK(c.loop_defects[2] <= 1e-10);
}

TEST_CASE("vertex curves lie in horizontal planes") {
  const GraphSolution& s = js_solution("hexagon", hexagon(), 0.05);
  const ConjugateSurface c = conjugate_surface(s);
  const TriMesh& m = *s.mesh;
  const auto nodes = vertex_curve_nodes(m);
  CHECK(nodes.size() == 3 * static_cast<std::size_t>(m.polygon.edge_count()));
  for (int k = 0; k < m.polygon.edge_count(); ++k) {
    const double level = k % 2 == 0 ? 0.0 : 1.0;
    CHECK(std::abs(c.positions[k].z - level) <= 0.02);
  }
}

TEST_CASE("closedness of the horizontal forms improves under refinement") {
  auto coarse = std::make_shared<const TriMesh>(triangulate(square(), 0.1, 0.25));
  auto fine = std::make_shared<const TriMesh>(refine(*coarse));
  const ConjugateSurface a = conjugate_surface(solve_capped(coarse, 4.0, 1e-10));
  const ConjugateSurface b = conjugate_surface(solve_capped(fine, 4.0, 1e-10));
  CHECK(b.core_loop_defects[0] < a.core_loop_defects[0]);
  CHECK(b.core_loop_defects[1] < a.core_loop_defects[1]);
  CHECK(b.core_loop_defects[0] < 0.05);
}

TEST_CASE("saddle tower piece doubles the surface") {
  const GraphSolution& s = js_solution("square", square(), 0.05);
  const ConjugateSurface c = conjugate_surface(s);
  const TowerPiece t = saddle_tower_piece(c);
  CHECK(t.period.z == 2.0);
  CHECK(t.welded >= 1);
  CHECK(t.positions.size() == 2 * c.positions.size() - t.welded);
  CHECK(t.triangles.size() == 2 * s.mesh->triangle_count());
  // the mirror half is the reflection across x3 = 0
  const std::size_t n = c.positions.size();
  for (std::size_t i = n; i < t.positions.size(); ++i) CHECK(t.positions[i].z <= kWeldTolerance);
}

TEST_CASE("flux saturates on the divergence line of the special rectangle") {
  auto m = mesh_of(rectangle(), 0.05);
  const GraphSolution s = solve_capped(m, 6.0, 1e-9);
  const std::vector<Vec2> line{{0.05, 1.0}, {0.95, 1.0}};
  CHECK(std::abs(flux(s, line)) / 0.9 > 0.95);
  // the square midline carries a strictly smaller share
  const GraphSolution& q = js_solution("square", square(), 0.05);
  const std::vector<Vec2> mid{{0.05, 0.5}, {0.95, 0.5}};
  CHECK(std::abs(flux(q, mid)) / 0.9 < 0.8);
}
