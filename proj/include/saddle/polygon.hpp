#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saddle/geometry.hpp"

namespace saddle {

inline constexpr double kGeometryTol = 1e-9;
inline constexpr double kAngleSumTol = 1e-10;

/// Convex polygon with 2n unit edges marked alternately +inf / -inf.
///
/// Edge i joins vertex i to vertex i+1 (mod 2n) and carries marking
/// (-1)^i, so edge 0 from (0,0) to (1,0) is always a +inf edge. Instances
/// are only produced by the factories below and are immutable.
class MarkedPolygon {
 public:
  /// Builds the polygon whose edge directions turn by angles[i] at vertex
  /// i+1. Throws BadMarkingParity, NotConvex or NonClosing.
  static MarkedPolygon from_turning_angles(std::span<const double> angles, int n);

  /// Validates raw vertices (normalized, unit edges, convex, ccw) and
  /// converts them through their turning angles.
  static MarkedPolygon from_vertices(std::span<const Vec2> vertices);

  int n() const { return n_; }
  int edge_count() const { return 2 * n_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  Vec2 vertex(int i) const { return vertices_[wrap(i)]; }
  int marking(int edge) const { return (wrap(edge) % 2 == 0) ? 1 : -1; }
  std::vector<int> markings() const;

  /// Turning angle at every vertex, ordered like the constructor input
  /// (entry i is the turn at vertex i+1).
  std::vector<double> turning_angles() const;

  double area() const;
  bool contains(Vec2 q, double eps = kGeometryTol) const;
  double boundary_distance(Vec2 q) const;
  double nearest_vertex_distance(Vec2 q) const;

  int wrap(int i) const {
    const int m = edge_count();
    return ((i % m) + m) % m;
  }

 private:
  MarkedPolygon(std::vector<Vec2> vertices, int n) : vertices_(std::move(vertices)), n_(n) {}

  std::vector<Vec2> vertices_;
  int n_ = 0;
};

/// True iff the polygon is a parallelogram with sides 1 and n-1 (n >= 3).
bool is_special(const MarkedPolygon& p);

/// Named set of turning angles, as read from a domain spec file.
struct DomainSpec {
  std::string name;
  int n = 0;
  std::vector<double> angles;

  MarkedPolygon polygon() const { return MarkedPolygon::from_turning_angles(angles, n); }
};

/// Parses the `key = value` domain spec format. `source` names the input in
/// error messages.
DomainSpec parse_domain_spec(std::string_view text, std::string_view source = "<domain>");
DomainSpec read_domain_spec(const std::string& path);
std::string format_domain_spec(const DomainSpec& spec);

enum class LimitKind { BoundedPolygon, Halfplane, Strip, UnboundedPolygon, Line, Halfline };

std::string_view to_string(LimitKind kind);

struct LimitVertex {
  Vec2 position;
  bool even = true;
  int chain = 0;  ///< boundary component; adjacency never crosses chains
};

struct Ray {
  Vec2 origin;
  Vec2 direction;
};

/// Estimated limit of a sequence of normalized marked polygons.
struct LimitDomain {
  LimitKind kind = LimitKind::BoundedPolygon;
  std::vector<LimitVertex> vertices;
  std::vector<Ray> rays;
  /// Two parallel half lines plus one unit edge.
  bool special_unbounded = false;
  /// Bounded limit that is a special polygon.
  bool special_bounded = false;
  /// Present for bounded limits only.
  std::optional<MarkedPolygon> polygon;

  bool special() const { return special_unbounded || special_bounded; }
  /// Vertices i and j are joined by a boundary edge.
  bool adjacent(std::size_t i, std::size_t j) const;
};

/// Limit domain of the tail of a finite sequence. A vertex stabilizes when
/// its last two positions differ by less than `tol`; the remaining boundary
/// escapes when the farthest vertex distance grows monotonically past 1/tol.
/// Throws Undecided when neither rule applies.
LimitDomain classify_limit(std::span<const MarkedPolygon> seq, double tol);

/// Limit domain of a single (constant) polygon.
LimitDomain limit_of(const MarkedPolygon& p);

/// Every non-adjacent pair of different parity is more than one unit apart.
bool parity_distance_condition(const LimitDomain& d);

}  // namespace saddle
