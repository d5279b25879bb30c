#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "saddle/error.hpp"
#include "saddle/meshing.hpp"
#include "test_support.hpp"

using namespace saddle;
using namespace saddle::testing;

namespace {

std::set<std::pair<int, int>> edges_of(const TriMesh& m) {
  std::set<std::pair<int, int>> out;
  for (const Triangle& t : m.triangles)
    for (int k = 0; k < 3; ++k) out.insert({std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3])});
  return out;
}

double shortest_boundary_edge(const TriMesh& m) {
  double best = 1e300;
  for (const BoundaryEdge& be : m.boundary_edges) best = std::min(best, distance(m.nodes[be.a], m.nodes[be.b]));
  return best;
}

}  // namespace

TEST_CASE("target size follows the grading rule") {
  const MarkedPolygon p = square();
  CHECK(target_size(p, {0.5, 0.5}, 0.1, 0.25) == doctest::Approx(0.1));
  CHECK(target_size(p, {0.15, 0.0}, 0.1, 0.25) == doctest::Approx(0.05));
  CHECK(target_size(p, {0.01, 0.0}, 0.1, 0.25) == doctest::Approx(0.025));
  CHECK(target_size(p, {0.01, 0.0}, 0.1, 1.0) == doctest::Approx(0.1));
}

TEST_CASE("uniform square mesh at h = 0.25") {
  const TriMesh m = triangulate(square(), 0.25, 1.0);
  CHECK_NOTHROW(validate(m));
  CHECK(m.triangle_count() >= 32);
  CHECK(m.triangle_count() <= 64);
  for (std::size_t i = 0; i < m.node_count(); ++i)
    if (m.is_boundary_node(i)) CHECK(square().boundary_distance(m.nodes[i]) < 1e-12);
}

TEST_CASE("graded square mesh shrinks towards the corners") {
  const TriMesh m = triangulate(square(), 0.1, 0.25);
  CHECK_NOTHROW(validate(m));
  const double smallest = shortest_boundary_edge(m);
  CHECK(smallest >= 0.0125);
  CHECK(smallest <= 0.03);
  // boundary pieces away from the corners are close to h
  double longest = 0.0;
  for (const BoundaryEdge& be : m.boundary_edges) longest = std::max(longest, distance(m.nodes[be.a], m.nodes[be.b]));
  CHECK(longest <= 0.1 * 1.2 + 1e-12);
}

TEST_CASE("rectangle mesh contains the collinear vertices") {
  const TriMesh m = triangulate(rectangle(), 0.1, 0.5);
  CHECK_NOTHROW(validate(m));
  for (int i = 0; i < 6; ++i) {
    CHECK(near(m.nodes[i], rectangle().vertex(i), 1e-12));
    CHECK(m.tags[i].kind == NodeKind::Vertex);
  }
}

TEST_CASE("mesh invariants on several domains") {
  for (const MarkedPolygon& p : {square(), hexagon(), octagon(), rectangle(), h_domain(0.2), h_domain(0.05)}) {
    for (double h : {0.1, 0.05}) {
      const TriMesh m = triangulate(p, h, 0.25);
      CHECK_NOTHROW(validate(m));
      CHECK(m.total_area() == doctest::Approx(p.area()).epsilon(1e-12));
      CHECK(m.min_angle_degrees() >= 20.0);
      // boundary tags partition the boundary and carry the polygon markings
      std::vector<double> covered(p.edge_count(), 0.0);
      for (const BoundaryEdge& be : m.boundary_edges) {
        CHECK(be.marking == p.marking(be.polygon_edge));
        covered[be.polygon_edge] += distance(m.nodes[be.a], m.nodes[be.b]);
      }
      for (double c : covered) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("documented node ordering") {
  const TriMesh m = triangulate(hexagon(), 0.1, 0.25);
  std::size_t i = 0;
  for (; i < 6; ++i) CHECK(m.tags[i].kind == NodeKind::Vertex);
  int edge = 0;
  for (; i < m.node_count() && m.tags[i].kind == NodeKind::Edge; ++i) {
    CHECK(m.tags[i].id >= edge);
    edge = m.tags[i].id;
  }
  for (; i < m.node_count(); ++i) CHECK(m.tags[i].kind == NodeKind::Interior);
}

TEST_CASE("triangulation is deterministic") {
  const TriMesh a = triangulate(octagon(), 0.07, 0.3);
  const TriMesh b = triangulate(octagon(), 0.07, 0.3);
  REQUIRE(a.node_count() == b.node_count());
  CHECK(a.triangles == b.triangles);
  for (std::size_t i = 0; i < a.node_count(); ++i) {
    CHECK(a.nodes[i].x == b.nodes[i].x);
    CHECK(a.nodes[i].y == b.nodes[i].y);
  }
}

TEST_CASE("refine splits every triangle into four") {
  const TriMesh m = triangulate(hexagon(), 0.2, 0.5);
  const TriMesh r = refine(m);
  CHECK_NOTHROW(validate(r));
  CHECK(r.triangle_count() == 4 * m.triangle_count());
  CHECK(r.node_count() == m.node_count() + edges_of(m).size());
  CHECK(r.h == doctest::Approx(m.h / 2));
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    CHECK(r.nodes[i].x == m.nodes[i].x);
    CHECK(r.nodes[i].y == m.nodes[i].y);
    CHECK(r.tags[i].kind == m.tags[i].kind);
  }
  CHECK(r.min_angle_degrees() == doctest::Approx(m.min_angle_degrees()).epsilon(1e-9));
  CHECK(r.total_area() == doctest::Approx(m.total_area()).epsilon(1e-12));
}

TEST_CASE("refining twice gives the 1 to 16 split") {
  const TriMesh m = triangulate(square(), 0.25, 1.0);
  const TriMesh r2 = refine(refine(m));
  CHECK(r2.triangle_count() == 16 * m.triangle_count());
  // every grandchild lies inside its ancestor with a sixteenth of its area
  double total = 0.0;
  for (std::size_t t = 0; t < 16; ++t) total += r2.triangle_area(t);
  CHECK(total == doctest::Approx(m.triangle_area(0)).epsilon(1e-12));
  std::set<std::pair<long, long>> positions;
  for (const Vec2& q : r2.nodes) positions.insert({std::lround(q.x * 1e9), std::lround(q.y * 1e9)});
  CHECK(positions.size() == r2.node_count());
}

TEST_CASE("bad parameters are rejected") {
  CHECK_THROWS_AS(triangulate(square(), 0.0, 0.5), Error);
  CHECK_THROWS_AS(triangulate(square(), 0.6, 0.5), Error);
  CHECK_THROWS_AS(triangulate(square(), 0.1, 0.0), Error);
  CHECK_THROWS_AS(triangulate(square(), 0.1, 1.5), Error);
}

TEST_CASE("validate reports broken meshes") {
  TriMesh m = triangulate(square(), 0.25, 1.0);
  std::swap(m.triangles[0][0], m.triangles[0][1]);
  try {
    validate(m);
    FAIL("expected MeshFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MeshFailure);
  }
}

TEST_CASE("locator finds the containing triangle") {
  const TriMesh m = triangulate(hexagon(), 0.1, 0.25);
  const TriangleLocator loc(m);
  for (std::size_t t = 0; t < m.triangle_count(); t += 7) {
    const Triangle& tri = m.triangles[t];
    const Vec2 c = (m.nodes[tri[0]] + m.nodes[tri[1]] + m.nodes[tri[2]]) / 3.0;
    const auto found = loc.locate(c);
    REQUIRE(found);
    CHECK(*found == t);
    const auto b = loc.barycentric(t, c);
    for (double w : b) CHECK(w == doctest::Approx(1.0 / 3.0));
  }
  CHECK_FALSE(loc.locate({5.0, 5.0}));
  // a shared edge resolves to the lower triangle index
  const Triangle& t0 = m.triangles[0];
  const Vec2 mid = 0.5 * (m.nodes[t0[0]] + m.nodes[t0[1]]);
  CHECK(*loc.locate(mid) == 0);
}
