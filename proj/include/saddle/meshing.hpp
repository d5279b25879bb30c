#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "saddle/geometry.hpp"
#include "saddle/polygon.hpp"

namespace saddle {

/// Radius of the disks around polygon vertices inside which elements shrink.
inline constexpr double kGradingRadius = 0.3;
inline constexpr double kMinAngleDegrees = 20.0;

enum class NodeKind : std::uint8_t { Interior, Edge, Vertex };

struct NodeTag {
  NodeKind kind = NodeKind::Interior;
  int id = -1;  ///< polygon edge for Edge nodes, polygon vertex for Vertex nodes
};

struct BoundaryEdge {
  int a = 0;  ///< follows the counterclockwise boundary direction
  int b = 0;
  int polygon_edge = 0;
  int marking = 1;
};

using Triangle = std::array<int, 3>;

/// Conforming triangulation of a marked polygon.
///
/// Node ordering: node i is polygon vertex i for i < 2n, followed by the
/// nodes interior to each polygon edge (edge by edge, along the edge), then
/// interior nodes. `refine` keeps the parent ordering as a prefix and appends
/// edge midpoints in order of first appearance.
struct TriMesh {
  MarkedPolygon polygon;
  std::vector<Vec2> nodes;
  std::vector<NodeTag> tags;
  std::vector<Triangle> triangles;  ///< counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;
  double g = 1.0;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  double triangle_area(std::size_t t) const;
  /// Smallest interior angle over all triangles, in degrees.
  double min_angle_degrees() const;
  double total_area() const;
  bool is_boundary_node(std::size_t i) const { return tags[i].kind != NodeKind::Interior; }
  int vertex_node(int polygon_vertex) const { return polygon.wrap(polygon_vertex); }
  std::size_t edge_count() const;
};

/// Target edge length at q: h * max(g, min(1, d/r0)), d the distance to the
/// nearest polygon vertex.
double target_size(const MarkedPolygon& p, Vec2 q, double h, double g);

/// Delaunay refinement honoring the grading rule and the 20 degree angle
/// bound. Deterministic in (p, h, g). Throws MeshFailure when the quality
/// bound cannot be reached.
TriMesh triangulate(const MarkedPolygon& p, double h, double g);

/// Uniform 1->4 split through edge midpoints.
TriMesh refine(const TriMesh& m);

/// Throws MeshFailure describing the first violated mesh invariant.
void validate(const TriMesh& m);

/// Point location with a uniform bucket grid. Ties on shared edges resolve
/// to the lowest triangle index.
class TriangleLocator {
 public:
  explicit TriangleLocator(const TriMesh& mesh);

  std::optional<std::size_t> locate(Vec2 q) const;
  /// Barycentric coordinates of q in triangle t.
  std::array<double, 3> barycentric(std::size_t t, Vec2 q) const;

 private:
  bool contains(std::size_t t, Vec2 q) const;

  const TriMesh* mesh_;
  Vec2 origin_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace saddle
