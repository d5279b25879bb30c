#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "saddle/geometry.hpp"
#include "saddle/jssolver.hpp"
#include "saddle/meshing.hpp"

namespace saddle {

/// Conjugate function psi of a minimal graph, integrated from the per-triangle
/// one-form dpsi = (u_x dx2 - u_y dx1) / W.
///
/// The form is integrated over a spanning tree of the edge-midpoint graph
/// (midpoints of edges sharing a triangle are joined). Nodal values average
/// the affine extensions from the incident triangles.
struct ConjugateField {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<double> psi;
  int anchor = 0;  ///< node at (0,0); psi is exactly 0 there
  double loop_defect = 0.0;             ///< max |circulation| over fundamental loops
  double loop_defect_per_length = 0.0;  ///< max |circulation| / length over loops around interior nodes
};

ConjugateField conjugate_function(const GraphSolution& s);

/// Line integral of dpsi along the polyline. Pieces lying on a mesh edge use
/// the triangle to their left, falling back to the right on the boundary.
/// Where the path passes from one triangle to another the jump of the
/// midpoint potential is added, so closed paths pick up only the loop
/// defects they enclose. Throws PathOutsideDomain when a vertex of the path
/// leaves the polygon.
double flux(const GraphSolution& s, std::span<const Vec2> path);

struct EdgeFlux {
  int edge = 0;
  int marking = 1;
  double flux = 0.0;
  double defect = 0.0;  ///< |flux - marking|
};

/// Flux of dpsi across every polygon edge, counterclockwise.
std::vector<EdgeFlux> edge_flux_report(const GraphSolution& s);

/// Conjugate immersion (x1*, x2*, x3*) with x3* = psi, on the mesh of the graph.
struct ConjugateSurface {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<Vec3> positions;
  std::array<double, 3> loop_defects{};       ///< per form, over loops around interior nodes
  std::array<double, 3> core_loop_defects{};  ///< same, restricted to core nodes
  Vec3 period{0.0, 0.0, 2.0};
};

/// Loop defects are max |circulation| / loop length. Core nodes are those at
/// distance >= core_margin from the boundary.
ConjugateSurface conjugate_surface(const GraphSolution& s, double core_margin = 0.15);

/// Nodes on the images of the vertical boundary pieces over the polygon
/// vertices: each vertex node and its two boundary neighbours.
std::vector<std::size_t> vertex_curve_nodes(const TriMesh& m);

/// Fundamental piece of the saddle tower: the conjugate surface together with
/// its mirror image across x3 = 0, welded along the symmetry plane.
struct TowerPiece {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> triangles;
  Vec3 period{0.0, 0.0, 2.0};
  std::size_t welded = 0;  ///< nodes shared by both halves
};

inline constexpr double kWeldTolerance = 1e-6;

TowerPiece saddle_tower_piece(const ConjugateSurface& c);

}  // namespace saddle
