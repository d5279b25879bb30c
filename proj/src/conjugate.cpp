#include "saddle/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "saddle/error.hpp"

namespace saddle {

namespace {

constexpr const char* kModule = "conjugate";

struct MeshEdge {
  int a, b;       // a < b
  int left = -1;  // triangle to the left of a -> b
  int right = -1;
};

struct Topology {
  std::vector<MeshEdge> edges;
};

Topology build_topology(const TriMesh& m) {
  Topology out;
  std::map<std::pair<int, int>, int> index;
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      const int p = m.triangles[t][k];
      const int q = m.triangles[t][(k + 1) % 3];
      const std::pair<int, int> key{std::min(p, q), std::max(p, q)};
      auto [it, fresh] = index.emplace(key, static_cast<int>(out.edges.size()));
      if (fresh) out.edges.push_back({key.first, key.second});
      MeshEdge& e = out.edges[it->second];
      (p < q ? e.left : e.right) = static_cast<int>(t);
    }
  return out;
}

using Form = std::vector<Vec2>;  // per-triangle covector (coefficients of dx1, dx2)

/// Edge-midpoint graph: two midpoints are joined when their edges share a
/// triangle. A form that satisfies the discrete Euler-Lagrange equations is
/// closed on this graph, so potentials live at midpoints and extend affinely
/// into each triangle.
struct Medial {
  const TriMesh* mesh = nullptr;
  Topology topo;
  std::vector<std::array<int, 3>> tri_edges;  // edge k joins corners k, k+1
  std::vector<Vec2> mid;
  int root = 0;
  std::vector<int> order;
  std::vector<int> parent;
  std::vector<int> parent_tri;
};

Medial build_medial(const TriMesh& m) {
  Medial md;
  md.mesh = &m;
  md.topo = build_topology(m);
  std::map<std::pair<int, int>, int> index;
  for (std::size_t e = 0; e < md.topo.edges.size(); ++e) {
    const MeshEdge& me = md.topo.edges[e];
    index[{me.a, me.b}] = static_cast<int>(e);
    md.mid.push_back(0.5 * (m.nodes[me.a] + m.nodes[me.b]));
  }
  md.tri_edges.resize(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      const int p = m.triangles[t][k];
      const int q = m.triangles[t][(k + 1) % 3];
      md.tri_edges[t][k] = index.at({std::min(p, q), std::max(p, q)});
    }
  const BoundaryEdge& first = m.boundary_edges.front();
  md.root = index.at({std::min(first.a, first.b), std::max(first.a, first.b)});

  const std::size_t n = md.mid.size();
  md.parent.assign(n, -1);
  md.parent_tri.assign(n, -1);
  std::vector<char> seen(n, 0);
  seen[md.root] = 1;
  md.order.push_back(md.root);
  for (std::size_t head = 0; head < md.order.size(); ++head) {
    const MeshEdge& e = md.topo.edges[md.order[head]];
    for (int t : {e.left, e.right}) {
      if (t < 0) continue;
      for (int f : md.tri_edges[t])
        if (!seen[f]) {
          seen[f] = 1;
          md.parent[f] = md.order[head];
          md.parent_tri[f] = t;
          md.order.push_back(f);
        }
    }
  }
  return md;
}

struct Integrated {
  std::vector<double> at_mid;
  std::vector<double> values;  // nodal
  double defect = 0.0;
  double defect_per_length = 0.0;
};

/// Circulation of the form around the midpoints of the edges at an interior
/// node, with the loop length.
std::pair<double, double> node_loop(const Medial& md, const Form& form, const std::vector<std::vector<int>>& fan, int v) {
  const TriMesh& m = *md.mesh;
  double circ = 0.0;
  double len = 0.0;
  for (int t : fan[v]) {
    const Triangle& tri = m.triangles[t];
    const int k = tri[0] == v ? 0 : tri[1] == v ? 1 : 2;
    const Vec2 d = md.mid[md.tri_edges[t][k]] - md.mid[md.tri_edges[t][(k + 2) % 3]];
    circ += dot(form[t], d);
    len += norm(d);
  }
  return {circ, len};
}

std::vector<std::vector<int>> node_fans(const TriMesh& m) {
  std::vector<std::vector<int>> fan(m.node_count());
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    for (int v : m.triangles[t]) fan[v].push_back(static_cast<int>(t));
  return fan;
}

double max_node_loop_defect(const Medial& md, const Form& form, const std::vector<std::vector<int>>& fan,
                            std::span<const std::size_t> nodes) {
  double worst = 0.0;
  for (std::size_t v : nodes) {
    const auto [circ, len] = node_loop(md, form, fan, static_cast<int>(v));
    worst = std::max(worst, std::abs(circ) / len);
  }
  return worst;
}

Integrated integrate(const Medial& md, const Form& form, const std::vector<std::vector<int>>& fan) {
  const TriMesh& m = *md.mesh;
  Integrated out;
  out.at_mid.assign(md.mid.size(), 0.0);
  for (std::size_t k = 1; k < md.order.size(); ++k) {
    const int f = md.order[k];
    const int e = md.parent[f];
    out.at_mid[f] = out.at_mid[e] + dot(form[md.parent_tri[f]], md.mid[f] - md.mid[e]);
  }
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      const int e = md.tri_edges[t][k];
      const int f = md.tri_edges[t][(k + 1) % 3];
      if ((md.parent[f] == e || md.parent[e] == f)) continue;
      const double circ = out.at_mid[e] + dot(form[t], md.mid[f] - md.mid[e]) - out.at_mid[f];
      out.defect = std::max(out.defect, std::abs(circ));
    }
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < m.node_count(); ++i)
    if (!m.is_boundary_node(i)) interior.push_back(i);
  out.defect_per_length = max_node_loop_defect(md, form, fan, interior);

  out.values.assign(m.node_count(), 0.0);
  for (std::size_t v = 0; v < m.node_count(); ++v) {
    double sum = 0.0;
    for (int t : fan[v]) {
      const int e = md.tri_edges[t][0];
      sum += out.at_mid[e] + dot(form[t], m.nodes[v] - md.mid[e]);
    }
    out.values[v] = sum / static_cast<double>(fan[v].size());
  }
  const double shift = out.values[0];
  for (double& x : out.values) x -= shift;
  for (double& x : out.at_mid) x -= shift;
  return out;
}

Form psi_form(const GraphSolution& s) {
  Form f(s.gradient.size());
  for (std::size_t t = 0; t < f.size(); ++t) {
    const Vec2 g = s.gradient[t];
    f[t] = Vec2{-g.y, g.x} / s.area_element[t];
  }
  return f;
}

/// Jump of the midpoint potential at x when passing from triangle `from` to
/// triangle `to`, summed edge by edge through the triangles between them.
class JumpWalker {
 public:
  JumpWalker(const Medial& md, const Form& form) : md_(md), form_(form) {}

  double jump(int from, int to, Vec2 x) const {
    if (from == to) return 0.0;
    const TriMesh& m = *md_.mesh;
    const Triangle& a = m.triangles[from];
    for (int k = 0; k < 3; ++k) {
      const int e = md_.tri_edges[from][k];
      const MeshEdge& me = md_.topo.edges[e];
      if (other(me, from) == to) return dot(form_[to] - form_[from], x - md_.mid[e]);
    }
    int pivot = -1;
    double best = 0.0;
    for (int v : a)
      for (int w : m.triangles[to])
        if (v == w && (pivot < 0 || distance(m.nodes[v], x) < best)) {
          pivot = v;
          best = distance(m.nodes[v], x);
        }
    if (pivot < 0) throw Error(ErrorKind::PathOutsideDomain, kModule, "path jumps between disjoint triangles");
    for (bool ccw : {true, false}) {
      double acc = 0.0;
      int cur = from;
      for (int guard = 0; guard < 64; ++guard) {
        const Triangle& tri = m.triangles[cur];
        const int k = tri[0] == pivot ? 0 : tri[1] == pivot ? 1 : 2;
        const int e = md_.tri_edges[cur][ccw ? (k + 2) % 3 : k];
        const int next = other(md_.topo.edges[e], cur);
        if (next < 0) break;
        acc += dot(form_[next] - form_[cur], x - md_.mid[e]);
        cur = next;
        if (cur == to) return acc;
      }
    }
    throw Error(ErrorKind::PathOutsideDomain, kModule, "path turns outside the mesh");
  }

 private:
  static int other(const MeshEdge& e, int t) { return e.left == t ? e.right : e.left; }

  const Medial& md_;
  const Form& form_;
};

}  // namespace

ConjugateField conjugate_function(const GraphSolution& s) {
  const TriMesh& m = *s.mesh;
  const Medial md = build_medial(m);
  Integrated psi = integrate(md, psi_form(s), node_fans(m));
  return {s.mesh, std::move(psi.values), 0, psi.defect, psi.defect_per_length};
}

double flux(const GraphSolution& s, std::span<const Vec2> path) {
  const TriMesh& m = *s.mesh;
  if (path.size() < 2) throw Error(ErrorKind::InvalidArgument, kModule, "path needs at least two points");
  for (const Vec2& p : path)
    if (!m.polygon.contains(p)) throw Error(ErrorKind::PathOutsideDomain, kModule, "path leaves the polygon");
  const Form form = psi_form(s);
  const Medial md = build_medial(m);
  const JumpWalker walker(md, form);
  double total = 0.0;
  int last = -1;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const Vec2 a = path[k];
    const Vec2 b = path[k + 1];
    const Vec2 d = b - a;
    const double len = norm(d);
    if (len == 0.0) continue;
    std::vector<double> cuts{0.0, 1.0};
    for (const MeshEdge& e : md.topo.edges) {
      const Vec2 p = m.nodes[e.a];
      const Vec2 r = m.nodes[e.b] - p;
      const double denom = cross(d, r);
      if (std::abs(denom) <= 1e-14 * len * norm(r)) continue;  // parallel pieces add no cut
      const double t = cross(p - a, r) / denom;
      const double u = cross(p - a, d) / denom;
      if (t > 0.0 && t < 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    const Vec2 left = perp(d) / len;
    const double nudge = 1e-9 * std::max(1.0, len);
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      if (cuts[j + 1] - cuts[j] <= 1e-13) continue;
      const Vec2 mid = a + (0.5 * (cuts[j] + cuts[j + 1])) * d;
      auto t = s.locator->locate(mid + nudge * left);
      if (!t) t = s.locator->locate(mid - nudge * left);
      if (!t) throw Error(ErrorKind::PathOutsideDomain, kModule, "path piece is not covered by the mesh");
      const int tri = static_cast<int>(*t);
      if (last >= 0) total += walker.jump(last, tri, a + cuts[j] * d);
      total += (cuts[j + 1] - cuts[j]) * dot(form[tri], d);
      last = tri;
    }
  }
  return total;
}

std::vector<EdgeFlux> edge_flux_report(const GraphSolution& s) {
  const MarkedPolygon& p = s.mesh->polygon;
  std::vector<EdgeFlux> rows;
  for (int e = 0; e < p.edge_count(); ++e) {
    const std::array<Vec2, 2> path{p.vertex(e), p.vertex(e + 1)};
    const double f = flux(s, path);
    rows.push_back({e, p.marking(e), f, std::abs(f - p.marking(e))});
  }
  return rows;
}

ConjugateSurface conjugate_surface(const GraphSolution& s, double core_margin) {
  const TriMesh& m = *s.mesh;
  const Medial md = build_medial(m);
  const auto fan = node_fans(m);
  std::array<Form, 3> forms{Form(s.gradient.size()), Form(s.gradient.size()), psi_form(s)};
  for (std::size_t t = 0; t < s.gradient.size(); ++t) {
    const Vec2 g = s.gradient[t];
    const double w = s.area_element[t];
    forms[0][t] = Vec2{g.x * g.y, 1.0 + g.y * g.y} / w;
    forms[1][t] = -1.0 * Vec2{1.0 + g.x * g.x, g.x * g.y} / w;
  }
  const std::vector<std::size_t> core = core_nodes(m, core_margin);
  ConjugateSurface out;
  out.mesh = s.mesh;
  out.positions.resize(m.node_count());
  std::array<std::vector<double>, 3> coords;
  for (int c = 0; c < 3; ++c) {
    Integrated x = integrate(md, forms[c], fan);
    out.loop_defects[c] = x.defect_per_length;
    out.core_loop_defects[c] = max_node_loop_defect(md, forms[c], fan, core);
    coords[c] = std::move(x.values);
  }
  for (std::size_t i = 0; i < m.node_count(); ++i) out.positions[i] = {coords[0][i], coords[1][i], coords[2][i]};
  return out;
}

std::vector<std::size_t> vertex_curve_nodes(const TriMesh& m) {
  std::vector<std::size_t> out;
  const int corners = m.polygon.edge_count();
  for (const BoundaryEdge& be : m.boundary_edges) {
    if (be.a < corners) out.push_back(static_cast<std::size_t>(be.b));
    if (be.b < corners) out.push_back(static_cast<std::size_t>(be.a));
  }
  for (int i = 0; i < corners; ++i) out.push_back(static_cast<std::size_t>(i));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TowerPiece saddle_tower_piece(const ConjugateSurface& c) {
  const TriMesh& m = *c.mesh;
  TowerPiece out;
  out.positions = c.positions;
  out.period = c.period;
  for (const auto& t : m.triangles) out.triangles.push_back({t[0], t[1], t[2]});
  const int n = static_cast<int>(c.positions.size());
  std::vector<int> mirror(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 p = c.positions[i];
    if (std::abs(p.z) <= kWeldTolerance) {
      mirror[i] = i;
      ++out.welded;
    } else {
      mirror[i] = static_cast<int>(out.positions.size());
      out.positions.push_back({p.x, p.y, -p.z});
    }
  }
  // Reflection reverses orientation.
  for (const auto& t : m.triangles) out.triangles.push_back({mirror[t[0]], mirror[t[2]], mirror[t[1]]});
  return out;
}

}  // namespace saddle

