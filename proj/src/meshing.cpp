#include "saddle/meshing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include "saddle/error.hpp"

namespace saddle {

namespace {

constexpr const char* kModule = "meshing";

// Quality target used while refining; the invariant checked afterwards is
// the weaker kMinAngleDegrees.
constexpr double kRefineAngleDegrees = 25.0;
constexpr std::size_t kMaxInsertions = 400000;
// Longest edge allowed relative to the local target size.
constexpr double kSizeSlack = 1.2;

[[noreturn]] void mesh_failure(const std::string& what) { throw Error(ErrorKind::MeshFailure, kModule, what); }

double min_angle(Vec2 a, Vec2 b, Vec2 c) {
  auto angle = [](Vec2 p, Vec2 q, Vec2 r) { return std::atan2(std::abs(cross(q - p, r - p)), dot(q - p, r - p)); };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

Vec2 unit(Vec2 v) { return v / norm(v); }

bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Evaluated on the lexicographically sorted triple so that swapping any two
// arguments negates the result exactly.
long double orient_ld(Vec2 a, Vec2 b, Vec2 c) {
  bool flip = false;
  if (lex_less(b, a)) std::swap(a, b), flip = !flip;
  if (lex_less(c, b)) std::swap(b, c), flip = !flip;
  if (lex_less(b, a)) std::swap(a, b), flip = !flip;
  const long double r =
      static_cast<long double>(b.x - a.x) * (c.y - a.y) - static_cast<long double>(b.y - a.y) * (c.x - a.x);
  return flip ? -r : r;
}

// Positive when d lies strictly inside the circumcircle of ccw (a, b, c).
long double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const long double adx = a.x - d.x, ady = a.y - d.y;
  const long double bdx = b.x - d.x, bdy = b.y - d.y;
  const long double cdx = c.x - d.x, cdy = c.y - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

/// Incremental Bowyer-Watson triangulation inside a super triangle.
class Delaunay {
 public:
  struct Tri {
    int v[3];
    int nbr[3];  // nbr[k] lies across the edge opposite v[k]
    bool alive;
  };

  Delaunay(Vec2 lo, Vec2 hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double r = 50.0 * std::max({hi.x - lo.x, hi.y - lo.y, 1.0});
    pts.push_back(c + Vec2{-2.0 * r, -r});
    pts.push_back(c + Vec2{2.0 * r, -r});
    pts.push_back(c + Vec2{0.0, 2.0 * r});
    tris.push_back({{0, 1, 2}, {-1, -1, -1}, true});
  }

  bool is_super(int v) const { return v < 3; }
  bool touches_super(const Tri& t) const { return is_super(t.v[0]) || is_super(t.v[1]) || is_super(t.v[2]); }

  int insert(Vec2 p) {
    const int seed = locate(p);
    const int pi = static_cast<int>(pts.size());
    pts.push_back(p);
    created.clear();

    marks_.resize(tris.size(), 0);
    const int member = ++stamp_;
    const int checked = ++stamp_;
    auto is_member = [&](int t) { return t >= 0 && marks_[t] == member; };
    std::vector<int> cavity{seed};
    marks_[seed] = member;
    for (std::size_t i = 0; i < cavity.size(); ++i) {
      const Tri& t = tris[cavity[i]];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.nbr[k];
        if (nb < 0 || marks_[nb] == member || marks_[nb] == checked) continue;
        const Tri& u = tris[nb];
        if (incircle(pts[u.v[0]], pts[u.v[1]], pts[u.v[2]], p) > 0) {
          marks_[nb] = member;
          cavity.push_back(nb);
        } else {
          marks_[nb] = checked;
        }
      }
    }

    // Shrink (or grow at the seed) until every boundary edge sees p.
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < cavity.size() && !changed; ++i) {
        const int ti = cavity[i];
        const Tri& t = tris[ti];
        for (int k = 0; k < 3; ++k) {
          const int nb = t.nbr[k];
          if (is_member(nb)) continue;
          const int a = t.v[(k + 1) % 3];
          const int b = t.v[(k + 2) % 3];
          if (orient_ld(pts[a], pts[b], p) > 0) continue;
          if (ti != seed) {
            marks_[ti] = 0;
            cavity.erase(cavity.begin() + static_cast<std::ptrdiff_t>(i));
          } else if (nb >= 0) {
            marks_[nb] = member;
            cavity.push_back(nb);
          } else {
            mesh_failure("point lies outside the triangulated region");
          }
          changed = true;
          break;
        }
      }
    }

    struct Edge {
      int a, b, outside;
    };
    std::vector<Edge> rim;
    for (int ti : cavity) {
      const Tri& t = tris[ti];
      for (int k = 0; k < 3; ++k)
        if (!is_member(t.nbr[k])) rim.push_back({t.v[(k + 1) % 3], t.v[(k + 2) % 3], t.nbr[k]});
    }
    for (int ti : cavity) tris[ti].alive = false;

    std::unordered_map<int, int> starts_at;
    std::unordered_map<int, int> ends_at;
    for (const Edge& e : rim) {
      const int ti = static_cast<int>(tris.size());
      if (orient_ld(pts[e.a], pts[e.b], p) <= 0) mesh_failure("degenerate cavity while inserting a point");
      tris.push_back({{e.a, e.b, pi}, {-1, -1, e.outside}, true});
      if (e.outside >= 0) {
        Tri& o = tris[e.outside];
        for (int k = 0; k < 3; ++k)
          if (o.v[(k + 1) % 3] == e.b && o.v[(k + 2) % 3] == e.a) o.nbr[k] = ti;
      }
      starts_at[e.a] = ti;
      ends_at[e.b] = ti;
      created.push_back(ti);
    }
    for (int ti : created) {
      Tri& t = tris[ti];
      t.nbr[0] = starts_at.at(t.v[1]);
      t.nbr[1] = ends_at.at(t.v[0]);
    }
    hint_ = created.empty() ? hint_ : created.back();
    marks_.resize(tris.size(), 0);
    return pi;
  }

  int locate(Vec2 p) const {
    int t = hint_;
    if (t < 0 || !tris[t].alive) t = last_alive();
    const std::size_t limit = 4 * tris.size() + 64;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri& tri = tris[t];
      bool moved = false;
      for (int j = 0; j < 3; ++j) {
        const int k = static_cast<int>((j + step) % 3);
        const int a = tri.v[(k + 1) % 3];
        const int b = tri.v[(k + 2) % 3];
        if (orient_ld(pts[a], pts[b], p) < 0) {
          if (tri.nbr[k] < 0) mesh_failure("point outside the super triangle");
          t = tri.nbr[k];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    for (std::size_t i = 0; i < tris.size(); ++i) {
      const Tri& tri = tris[i];
      if (!tri.alive) continue;
      if (orient_ld(pts[tri.v[0]], pts[tri.v[1]], p) >= 0 && orient_ld(pts[tri.v[1]], pts[tri.v[2]], p) >= 0 &&
          orient_ld(pts[tri.v[2]], pts[tri.v[0]], p) >= 0)
        return static_cast<int>(i);
    }
    mesh_failure("point location failed");
  }

  std::vector<Vec2> pts;
  std::vector<Tri> tris;
  std::vector<int> created;

 private:
  int last_alive() const {
    for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
      if (tris[i].alive) return i;
    return 0;
  }

  int hint_ = 0;
  int stamp_ = 0;
  std::vector<int> marks_;
};

struct Segment {
  int a, b;
  bool alive;
};

bool encroaches(Vec2 a, Vec2 b, Vec2 p) {
  const double len2 = dot(b - a, b - a);
  return dot(a - p, b - p) < -1e-12 * len2;
}

bool inside_polygon(const std::vector<Vec2>& poly, Vec2 q) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > q.y) != (b.y > q.y) && q.x < a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y)) in = !in;
  }
  return in;
}

// Every polygon edge gets the same band of triangles: the boundary nodes, a
// row of layer nodes at half the local spacing, and one node on the angle
// bisector at each vertex. Refinement happens only inside the front formed by
// the layer rows, so the first ring of triangles around each marked edge is
// congruent from edge to edge. The saturated flux of the capped problem is
// set by that ring, and the +/- balance of the Jenkins-Serrin data depends on
// it matching exactly.
class Refiner {
 public:
  Refiner(const MarkedPolygon& poly, double h, double g)
      : poly_(poly), h_(h), g_(g), dt_(bbox_lo(poly), bbox_hi(poly)) {
    tags_.assign(3, NodeTag{});
    params_.assign(3, 0.0);
  }

  TriMesh run() {
    const int m = poly_.edge_count();
    for (int i = 0; i < m; ++i) add_point(poly_.vertex(i), {NodeKind::Vertex, i}, 0.0);
    std::vector<std::vector<double>> samples(m);
    for (int e = 0; e < m; ++e) {
      samples[e] = edge_samples(e);
      for (double t : samples[e]) add_point(edge_point(e, t), {NodeKind::Edge, e}, t);
    }

    std::vector<int> front;
    for (int k = 0; k < m; ++k) {
      const int prev = poly_.wrap(k - 1);
      const double first = samples[k].front();
      const double last = 1.0 - samples[prev].back();
      const Vec2 bisector = unit(inward_normal(k) + inward_normal(prev));
      front.push_back(add_point(poly_.vertex(k) + 0.5 * std::min(first, last) * bisector, {}, 0.0));
      const auto& ts = samples[k];
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const double before = ts[j] - (j == 0 ? 0.0 : ts[j - 1]);
        const double after = (j + 1 == ts.size() ? 1.0 : ts[j + 1]) - ts[j];
        front.push_back(add_point(edge_point(k, ts[j]) + 0.25 * (before + after) * inward_normal(k), {}, 0.0));
      }
    }
    for (int pi : front) front_.push_back(dt_.pts[pi]);
    for (std::size_t i = 0; i < front.size(); ++i) segs_.push_back({front[i], front[(i + 1) % front.size()], true});
    for (std::size_t s = 0; s < segs_.size(); ++s)
      for (std::size_t p = 3; p < dt_.pts.size(); ++p)
        if (encroaches(dt_.pts[segs_[s].a], dt_.pts[segs_[s].b], dt_.pts[p])) {
          seg_queue_.push_back(static_cast<int>(s));
          break;
        }

    for (std::size_t t = 0; t < dt_.tris.size(); ++t) tri_queue_.push_back(static_cast<int>(t));
    drain_segments();

    while (!tri_queue_.empty()) {
      const int ti = tri_queue_.front();
      tri_queue_.pop_front();
      const auto& tri = dt_.tris[ti];
      if (!tri.alive || dt_.touches_super(tri)) continue;
      const Vec2 a = dt_.pts[tri.v[0]];
      const Vec2 b = dt_.pts[tri.v[1]];
      const Vec2 c = dt_.pts[tri.v[2]];
      if (!inside_polygon(front_, (a + b + c) / 3.0)) continue;
      const bool skinny = min_angle(a, b, c) < kRefineAngleDegrees * kPi / 180.0;
      if (!skinny && !too_large(a, b, c)) continue;
      const Vec2 cc = circumcenter(a, b, c);
      std::vector<int> hit;
      for (std::size_t s = 0; s < segs_.size(); ++s)
        if (segs_[s].alive && encroaches(dt_.pts[segs_[s].a], dt_.pts[segs_[s].b], cc))
          hit.push_back(static_cast<int>(s));
      if (hit.empty() && !inside_polygon(front_, cc)) hit.push_back(nearest_segment(cc));
      // A well-shaped triangle is not worth splitting a front piece that
      // already meets its own size target.
      if (!skinny && !hit.empty() &&
          std::all_of(hit.begin(), hit.end(), [&](int s) { return !segment_too_large(segs_[s]); }))
        continue;
      if (!hit.empty()) {
        for (int s : hit) seg_queue_.push_back(s);
        drain_segments();
        tri_queue_.push_back(ti);
        continue;
      }
      add_point(cc, {}, 0.0);
      drain_segments();
    }
    return finish();
  }

 private:
  static Vec2 bbox_lo(const MarkedPolygon& p) {
    Vec2 lo = p.vertex(0);
    for (const Vec2& v : p.vertices()) lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    return lo;
  }
  static Vec2 bbox_hi(const MarkedPolygon& p) {
    Vec2 hi = p.vertex(0);
    for (const Vec2& v : p.vertices()) hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    return hi;
  }

  Vec2 edge_point(int e, double t) const {
    const Vec2 a = poly_.vertex(e);
    const Vec2 b = poly_.vertex(e + 1);
    return a + t * (b - a);
  }

  Vec2 inward_normal(int e) const { return perp(unit(poly_.vertex(e + 1) - poly_.vertex(e))); }

  // Interior parameters along edge e equidistributing 1/size; at least one.
  std::vector<double> edge_samples(int e) const {
    constexpr int kSteps = 2000;
    std::vector<double> cumulative(kSteps + 1, 0.0);
    for (int k = 0; k < kSteps; ++k) {
      const double t = (k + 0.5) / kSteps;
      cumulative[k + 1] = cumulative[k] + 1.0 / (kSteps * target_size(poly_, edge_point(e, t), h_, g_));
    }
    const int pieces = std::max(2, static_cast<int>(std::ceil(cumulative.back() - 1e-9)));
    std::vector<double> out;
    for (int j = 1; j < pieces; ++j) {
      const double goal = cumulative.back() * j / pieces;
      const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), goal);
      const int k = static_cast<int>(it - cumulative.begin());
      const double w = (goal - cumulative[k - 1]) / (cumulative[k] - cumulative[k - 1]);
      out.push_back((k - 1 + w) / kSteps);
    }
    return out;
  }

  bool too_large(Vec2 a, Vec2 b, Vec2 c) const {
    const double longest = std::max({distance(a, b), distance(b, c), distance(c, a)});
    return longest > kSizeSlack * target_size(poly_, (a + b + c) / 3.0, h_, g_);
  }

  bool segment_too_large(const Segment& s) const {
    const Vec2 a = dt_.pts[s.a];
    const Vec2 b = dt_.pts[s.b];
    return distance(a, b) > kSizeSlack * target_size(poly_, 0.5 * (a + b), h_, g_);
  }

  int add_point(Vec2 p, NodeTag tag, double param) {
    if (dt_.pts.size() - 3 > kMaxInsertions) mesh_failure("insertion budget exhausted; quality bound unreachable");
    const int pi = dt_.insert(p);
    tags_.push_back(tag);
    params_.push_back(param);
    for (int t : dt_.created) tri_queue_.push_back(t);
    for (std::size_t s = 0; s < segs_.size(); ++s)
      if (segs_[s].alive && encroaches(dt_.pts[segs_[s].a], dt_.pts[segs_[s].b], p))
        seg_queue_.push_back(static_cast<int>(s));
    return pi;
  }

  int nearest_segment(Vec2 q) const {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < segs_.size(); ++s) {
      if (!segs_[s].alive) continue;
      const double d = point_segment_distance(q, dt_.pts[segs_[s].a], dt_.pts[segs_[s].b]);
      if (d < dist) {
        dist = d;
        best = static_cast<int>(s);
      }
    }
    return best;
  }

  void drain_segments() {
    while (!seg_queue_.empty()) {
      const int s = seg_queue_.front();
      seg_queue_.pop_front();
      if (!segs_[s].alive) continue;
      const Segment seg = segs_[s];
      segs_[s].alive = false;
      const int mid = add_point(0.5 * (dt_.pts[seg.a] + dt_.pts[seg.b]), {}, 0.0);
      for (const Segment half : {Segment{seg.a, mid, true}, Segment{mid, seg.b, true}}) {
        segs_.push_back(half);
        const Vec2 a = dt_.pts[half.a];
        const Vec2 b = dt_.pts[half.b];
        for (std::size_t p = 3; p < dt_.pts.size(); ++p)
          if (encroaches(a, b, dt_.pts[p])) {
            seg_queue_.push_back(static_cast<int>(segs_.size() - 1));
            break;
          }
      }
    }
  }

  TriMesh finish() {
    const int m = poly_.edge_count();
    const std::size_t np = dt_.pts.size();
    std::vector<int> index(np, -1);
    TriMesh mesh{poly_, {}, {}, {}, {}, h_, g_};
    auto emit = [&](int pi) {
      index[pi] = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(dt_.pts[pi]);
      mesh.tags.push_back(tags_[pi]);
    };
    for (int i = 0; i < m; ++i) emit(3 + i);
    std::vector<std::vector<int>> on_edge(m);
    for (std::size_t pi = 3; pi < np; ++pi)
      if (tags_[pi].kind == NodeKind::Edge) on_edge[tags_[pi].id].push_back(static_cast<int>(pi));
    for (int e = 0; e < m; ++e) {
      auto& list = on_edge[e];
      std::sort(list.begin(), list.end(), [&](int a, int b) { return params_[a] < params_[b]; });
      for (int pi : list) emit(pi);
    }
    for (std::size_t pi = 3; pi < np; ++pi)
      if (tags_[pi].kind == NodeKind::Interior) emit(static_cast<int>(pi));

    for (int e = 0; e < m; ++e) {
      int prev = index[3 + e];
      for (int pi : on_edge[e]) {
        mesh.boundary_edges.push_back({prev, index[pi], e, poly_.marking(e)});
        prev = index[pi];
      }
      mesh.boundary_edges.push_back({prev, index[3 + poly_.wrap(e + 1)], e, poly_.marking(e)});
    }
    for (const auto& t : dt_.tris) {
      if (!t.alive || dt_.touches_super(t)) continue;
      mesh.triangles.push_back({index[t.v[0]], index[t.v[1]], index[t.v[2]]});
    }
    validate(mesh);
    return mesh;
  }

  const MarkedPolygon& poly_;
  double h_;
  double g_;
  Delaunay dt_;
  std::vector<NodeTag> tags_;
  std::vector<double> params_;
  std::vector<Segment> segs_;
  std::vector<Vec2> front_;
  std::deque<int> seg_queue_;
  std::deque<int> tri_queue_;
};

}  // namespace

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return 0.5 * orient(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
}

double TriMesh::min_angle_degrees() const {
  double best = 180.0;
  for (const auto& t : triangles)
    best = std::min(best, min_angle(nodes[t[0]], nodes[t[1]], nodes[t[2]]) * 180.0 / kPi);
  return best;
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
  return sum;
}

std::size_t TriMesh::edge_count() const {
  // Euler: each interior edge is shared by two triangles, boundary edges by one.
  return (3 * triangles.size() + boundary_edges.size()) / 2;
}

double target_size(const MarkedPolygon& p, Vec2 q, double h, double g) {
  return h * std::max(g, std::min(1.0, p.nearest_vertex_distance(q) / kGradingRadius));
}

TriMesh triangulate(const MarkedPolygon& p, double h, double g) {
  if (!(h > 0.0 && h <= 0.5)) throw Error(ErrorKind::InvalidArgument, kModule, "h must lie in (0, 0.5]");
  if (!(g > 0.0 && g <= 1.0)) throw Error(ErrorKind::InvalidArgument, kModule, "g must lie in (0, 1]");
  return Refiner(p, h, g).run();
}

TriMesh refine(const TriMesh& m) {
  TriMesh out{m.polygon, m.nodes, m.tags, {}, {}, 0.5 * m.h, m.g};
  std::map<std::pair<int, int>, int> boundary_lookup;
  for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) {
    const auto& be = m.boundary_edges[i];
    boundary_lookup[{std::min(be.a, be.b), std::max(be.a, be.b)}] = static_cast<int>(i);
  }
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back(0.5 * (m.nodes[a] + m.nodes[b]));
    if (auto be = boundary_lookup.find(key); be != boundary_lookup.end())
      out.tags.push_back({NodeKind::Edge, m.boundary_edges[be->second].polygon_edge});
    else
      out.tags.push_back({NodeKind::Interior, -1});
    midpoint.emplace(key, id);
    return id;
  };
  out.triangles.reserve(4 * m.triangles.size());
  for (const auto& t : m.triangles) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({ca, bc, t[2]});
    out.triangles.push_back({ab, bc, ca});
  }
  for (const auto& be : m.boundary_edges) {
    const int c = midpoint.at({std::min(be.a, be.b), std::max(be.a, be.b)});
    out.boundary_edges.push_back({be.a, c, be.polygon_edge, be.marking});
    out.boundary_edges.push_back({c, be.b, be.polygon_edge, be.marking});
  }
  return out;
}

void validate(const TriMesh& m) {
  const MarkedPolygon& p = m.polygon;
  for (int i = 0; i < p.edge_count(); ++i)
    if (m.nodes.size() <= static_cast<std::size_t>(i) || distance(m.nodes[i], p.vertex(i)) > kGeometryTol ||
        m.tags[i].kind != NodeKind::Vertex)
      mesh_failure("polygon vertex " + std::to_string(i) + " is not mesh node " + std::to_string(i));
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    if (!(m.triangle_area(t) > 0.0)) mesh_failure("triangle " + std::to_string(t) + " is not counterclockwise");
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const double d = p.boundary_distance(m.nodes[i]);
    if (m.is_boundary_node(i) && d > kGeometryTol)
      mesh_failure("boundary node " + std::to_string(i) + " is off the polygon boundary");
    if (!p.contains(m.nodes[i])) mesh_failure("node " + std::to_string(i) + " lies outside the polygon");
  }
  std::vector<double> covered(p.edge_count(), 0.0);
  for (const auto& be : m.boundary_edges) {
    if (be.marking != p.marking(be.polygon_edge)) mesh_failure("boundary edge marking mismatch");
    const Vec2 a = p.vertex(be.polygon_edge);
    const Vec2 b = p.vertex(be.polygon_edge + 1);
    if (point_segment_distance(m.nodes[be.a], a, b) > kGeometryTol ||
        point_segment_distance(m.nodes[be.b], a, b) > kGeometryTol)
      mesh_failure("boundary edge does not lie on its polygon edge");
    covered[be.polygon_edge] += distance(m.nodes[be.a], m.nodes[be.b]);
  }
  for (int e = 0; e < p.edge_count(); ++e)
    if (std::abs(covered[e] - 1.0) > kGeometryTol) mesh_failure("boundary tags do not cover polygon edge " + std::to_string(e));
  if (std::abs(m.total_area() - p.area()) > kGeometryTol) mesh_failure("triangle areas do not sum to the polygon area");
  if (m.min_angle_degrees() < kMinAngleDegrees) mesh_failure("minimum angle below 20 degrees");
}

// ---------------------------------------------------------------------------

TriangleLocator::TriangleLocator(const TriMesh& mesh) : mesh_(&mesh) {
  Vec2 lo = mesh.nodes.front();
  Vec2 hi = lo;
  for (const Vec2& v : mesh.nodes) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  const double area = std::max(mesh.total_area(), 1e-12);
  cell_ = 2.0 * std::sqrt(area / std::max<std::size_t>(mesh.triangles.size(), 1));
  origin_ = lo - Vec2{cell_, cell_} * 0.5;
  nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - origin_.x) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - origin_.y) / cell_)) + 1);
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    Vec2 tlo = mesh.nodes[tri[0]];
    Vec2 thi = tlo;
    for (int k = 1; k < 3; ++k) {
      const Vec2 v = mesh.nodes[tri[k]];
      tlo = {std::min(tlo.x, v.x), std::min(tlo.y, v.y)};
      thi = {std::max(thi.x, v.x), std::max(thi.y, v.y)};
    }
    const double pad = 1e-9;
    const int i0 = std::clamp(static_cast<int>(std::floor((tlo.x - pad - origin_.x) / cell_)), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor((thi.x + pad - origin_.x) / cell_)), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor((tlo.y - pad - origin_.y) / cell_)), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor((thi.y + pad - origin_.y) / cell_)), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

std::array<double, 3> TriangleLocator::barycentric(std::size_t t, Vec2 q) const {
  const auto& tri = mesh_->triangles[t];
  const Vec2 a = mesh_->nodes[tri[0]];
  const Vec2 b = mesh_->nodes[tri[1]];
  const Vec2 c = mesh_->nodes[tri[2]];
  const double total = orient(a, b, c);
  return {orient(q, b, c) / total, orient(a, q, c) / total, orient(a, b, q) / total};
}

bool TriangleLocator::contains(std::size_t t, Vec2 q) const {
  const auto l = barycentric(t, q);
  return l[0] >= -1e-9 && l[1] >= -1e-9 && l[2] >= -1e-9;
}

std::optional<std::size_t> TriangleLocator::locate(Vec2 q) const {
  const int i = static_cast<int>(std::floor((q.x - origin_.x) / cell_));
  const int j = static_cast<int>(std::floor((q.y - origin_.y) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
  for (std::size_t t : cells_[static_cast<std::size_t>(j) * nx_ + i])
    if (contains(t, q)) return t;
  return std::nullopt;
}

}  // namespace saddle
