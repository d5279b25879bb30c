#include "saddle/limits.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "saddle/error.hpp"
#include "saddle/meshing.hpp"

namespace saddle {

namespace {

constexpr const char* kModule = "limits";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SequenceMember solve_member(const MarkedPolygon& p, double parameter, const MeshSettings& mesh,
                            const std::vector<double>& caps, const JsOptions& js) {
  auto m = std::make_shared<const TriMesh>(triangulate(p, mesh.h, mesh.g));
  SequenceMember out{parameter, p, {}, {}, true};
  try {
    out.solution = solve_js(m, caps, js);
  } catch (const NoStabilizationError& e) {
    out.solution = e.last();
    out.stabilized = false;
  }
  out.conjugate = conjugate_function(out.solution);
  return out;
}

bool increasing_tail(const std::vector<double>& v, int window) {
  if (static_cast<int>(v.size()) < window) return false;
  for (std::size_t k = v.size() - window + 1; k < v.size(); ++k)
    if (!(v[k] > v[k - 1])) return false;
  return true;
}

}  // namespace

SequenceExperiment run_sequence(const std::vector<MarkedPolygon>& polygons, const std::vector<double>& parameters,
                                const MeshSettings& mesh, const std::vector<double>& caps, const JsOptions& js,
                                std::vector<Vec2> probes, double limit_tol, int workers) {
  if (polygons.size() != parameters.size())
    throw Error(ErrorKind::InvalidArgument, kModule, "one parameter per member required");
  if (workers < 1) throw Error(ErrorKind::InvalidArgument, kModule, "workers must be positive");
  const std::size_t count = polygons.size();
  std::vector<std::optional<SequenceMember>> slots(count);
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        slots[k] = solve_member(polygons[k], parameters[k], mesh, caps, js);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  SequenceExperiment e;
  for (auto& s : slots) e.members.push_back(std::move(*s));
  e.limit = classify_limit(polygons, limit_tol);
  e.probes = std::move(probes);
  return e;
}

std::vector<Segment> divergence_candidates(const LimitDomain& d, double tol) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < d.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < d.vertices.size(); ++j) {
      if (d.vertices[i].even == d.vertices[j].even || d.adjacent(i, j)) continue;
      const Vec2 a = d.vertices[i].position;
      const Vec2 b = d.vertices[j].position;
      if (std::abs(distance(a, b) - 1.0) <= tol) out.push_back({a, b, static_cast<int>(i), static_cast<int>(j)});
    }
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Diverging: return "diverging";
    case Verdict::NotDiverging: return "not-diverging";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

DivergenceReport detect_divergence(const SequenceExperiment& e, const DivergenceOptions& options) {
  if (e.members.size() < 3) throw Error(ErrorKind::InvalidArgument, kModule, "divergence detection needs three members");
  DivergenceReport r;
  r.options = options;
  for (const Segment& seg : divergence_candidates(e.limit, options.candidate_tol)) {
    CandidateStats c{seg, {}, {}, Verdict::Undecided};
    const Vec2 d = seg.b - seg.a;
    const std::array<Vec2, 2> path{seg.a + options.shrink * d, seg.b - options.shrink * d};
    const double len = distance(path[0], path[1]);
    for (const SequenceMember& m : e.members) {
      double f = kNaN;
      double sup = kNaN;
      try {
        f = std::abs(flux(m.solution, path)) / len;
        sup = 0.0;
        for (int k = 0; k <= options.samples; ++k) {
          const double t = static_cast<double>(k) / options.samples;
          sup = std::max(sup, norm(gradient_at(m.solution, path[0] + t * (path[1] - path[0]))));
        }
      } catch (const Error&) {
        f = sup = kNaN;  // segment not inside this member
      }
      c.flux.push_back(f);
      c.sup_gradient.push_back(sup);
    }
    bool bounded = true;
    for (double s : c.sup_gradient) bounded = bounded && s <= options.gradient_bound;
    if (c.flux.back() >= 1.0 - options.flux_slack && increasing_tail(c.flux, options.monotone_window) &&
        increasing_tail(c.sup_gradient, options.monotone_window))
      c.verdict = Verdict::Diverging;
    else if (bounded)
      c.verdict = Verdict::NotDiverging;
    r.candidates.push_back(std::move(c));
  }
  for (const Vec2& q : e.probes) {
    ProbeStats p{q, {}, true};
    for (const SequenceMember& m : e.members) {
      double g = kNaN;
      try {
        g = norm(gradient_at(m.solution, q));
      } catch (const Error&) {
      }
      p.gradient.push_back(g);
      p.bounded = p.bounded && g <= options.gradient_bound;
    }
    r.probes.push_back(std::move(p));
  }
  return r;
}

RhombusDecomposition rhombus_decomposition(const LimitDomain& d) {
  RhombusDecomposition out;
  if (d.special_bounded && d.polygon) {
    const MarkedPolygon& p = *d.polygon;
    const std::vector<double> turns = p.turning_angles();
    std::vector<int> corners;  // vertex i has turn turns[i-1]
    for (int i = 0; i < p.edge_count(); ++i)
      if (turns[p.wrap(i - 1)] > kGeometryTol) corners.push_back(i);
    if (corners.size() != 4) throw Error(ErrorKind::NotSpecial, kModule, "limit polygon is not a parallelogram");
    const int sides = p.n() - 1;
    for (std::size_t k = 0; k < 4; ++k) {
      const int a = corners[k];
      const int b = corners[(k + 1) % 4];
      if (p.wrap(b - a) != sides || sides == 1) continue;
      const Vec2 A = p.vertex(a);
      const Vec2 t = p.vertex(a + 1) - A;
      const Vec2 s = p.vertex(corners[(k + 3) % 4]) - A;
      for (int r = 0; r < sides; ++r) {
        const Vec2 lo = A + static_cast<double>(r) * t;
        out.rhombi.push_back({lo, lo + t, lo + t + s, lo + s});
      }
      return out;
    }
    throw Error(ErrorKind::NotSpecial, kModule, "no side of length n-1");
  }
  if (d.special_unbounded && d.vertices.size() == 2 && d.rays.size() == 2) {
    const Vec2 a = d.vertices[0].position;
    const Vec2 b = d.vertices[1].position;
    const Vec2 dir = d.rays[0].direction;
    out.rhombi.push_back({a, b, b + dir, a + dir});
    out.translation = dir;
    return out;
  }
  throw Error(ErrorKind::NotSpecial, kModule, "limit domain is not special");
}

std::string limit_tag(const LimitDomain& d) {
  if (d.special()) return "doubly-periodic-Scherk-on-rhombi";
  switch (d.kind) {
    case LimitKind::Halfplane: return "singly-periodic-Scherk";
    case LimitKind::Strip: return "KMR-piece";
    case LimitKind::UnboundedPolygon: return "mrt-graph";
    case LimitKind::BoundedPolygon: return "saddle-tower-graph";
    case LimitKind::Line:
    case LimitKind::Halfline: return "degenerate";
  }
  return "degenerate";
}

NormalizedLimit normalized_limit(const SequenceExperiment& e, Vec2 q, const Window& window, double candidate_tol) {
  if (e.members.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "empty sequence");
  for (const Segment& s : divergence_candidates(e.limit, candidate_tol))
    if (point_segment_distance(q, s.a, s.b) < kDivergenceClearance)
      throw Error(ErrorKind::QOutsideConvergenceDomain, kModule, "anchor lies on a divergence candidate");
  const GraphSolution& s = e.members.back().solution;
  if (!s.mesh->polygon.contains(q)) throw Error(ErrorKind::QOutsideConvergenceDomain, kModule, "anchor outside the domain");
  NormalizedLimit out;
  out.tag = limit_tag(e.limit);
  out.anchor = q;
  const double base = value_at(s, q);
  const int n = std::max(2, window.resolution);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 p = window.center + window.side * Vec2{static_cast<double>(i) / (n - 1) - 0.5,
                                                         static_cast<double>(j) / (n - 1) - 0.5};
      out.samples.push_back({p, value_at(s, p) - base});
    }
  return out;
}

}  // namespace saddle
