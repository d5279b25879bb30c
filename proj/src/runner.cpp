#include "saddle/runner.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include <json.hpp>

#include "saddle/analytic.hpp"
#include "saddle/conjugate.hpp"
#include "saddle/io.hpp"
#include "saddle/jssolver.hpp"
#include "saddle/limits.hpp"
#include "saddle/meshing.hpp"

namespace saddle {

namespace {

using Json = nlohmann::ordered_json;

Json num(double x) { return std::isfinite(x) ? Json(round9(x)) : Json(nullptr); }

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json point(Vec2 p) { return Json::array({num(p.x), num(p.y)}); }

std::string line(const char* fmt, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

class Output {
 public:
  Output(std::filesystem::path dir, RunResult& r) : dir_(std::move(dir)), r_(r) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::IoError, "runner", "cannot create " + dir_.string() + ": " + ec.message());
  }

  void text(const std::string& name, const std::string& body) {
    write_text(dir_ / name, body);
    r_.files.push_back(name);
  }
  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
  RunResult& r_;
};

Json domain_json(const DomainSpec& d) {
  return Json{{"name", d.name}, {"n", d.n}, {"angles", nums(d.angles)}};
}

std::shared_ptr<const TriMesh> build_mesh(const MarkedPolygon& p, const ExperimentConfig& c) {
  TriMesh m = triangulate(p, c.mesh.h, c.mesh.g);
  for (int k = 0; k < c.refine; ++k) m = refine(m);
  return std::make_shared<const TriMesh>(std::move(m));
}

Json mesh_json(const TriMesh& m, const ExperimentConfig& c) {
  return Json{{"h", num(c.mesh.h)},
              {"g", num(c.mesh.g)},
              {"refine", c.refine},
              {"nodes", m.node_count()},
              {"triangles", m.triangle_count()},
              {"min_angle_degrees", num(m.min_angle_degrees())}};
}

Json solver_json(const ExperimentConfig& c) {
  return Json{{"caps", nums(c.caps)},
              {"tol", num(c.js.tol)},
              {"cauchy_tol", num(c.js.cauchy_tol)},
              {"core_margin", num(c.js.core_margin)},
              {"initial", c.js.solve.initial == InitialGuess::Harmonic ? "harmonic" : "zero-interior"}};
}

Json report_json(const SolveReport& r) {
  return Json{{"stabilized_cap", r.stabilized_cap ? num(*r.stabilized_cap) : Json(nullptr)},
              {"caps", nums(r.caps)},
              {"cap_trace", nums(r.cap_trace)},
              {"core_sup", nums(r.core_sup)},
              {"iterations", r.iterations},
              {"final_residual", num(r.final_residual)},
              {"cg_iterations", r.cg_iterations},
              {"energy_trace", nums(r.energy_trace)}};
}

struct Solved {
  GraphSolution s;
  std::optional<NoStabilizationError> failure;
};

Solved solve(const ExperimentConfig& c, const MarkedPolygon& p) {
  auto m = build_mesh(p, c);
  try {
    return {solve_js(m, c.caps, c.js), std::nullopt};
  } catch (const NoStabilizationError& e) {
    return {e.last(), e};
  }
}

Json flux_json(const std::vector<EdgeFlux>& rows) {
  Json a = Json::array();
  double sum = 0.0;
  for (const EdgeFlux& f : rows) {
    a.push_back(Json{{"edge", f.edge}, {"marking", f.marking}, {"flux", num(f.flux)}, {"defect", num(f.defect)}});
    sum += f.flux;
  }
  return Json{{"edges", a}, {"sum", num(sum)}};
}

void run_solve(const ExperimentConfig& c, Output& out, RunResult& r) {
  const MarkedPolygon p = c.domain->polygon();
  Solved sv = solve(c, p);
  const GraphSolution& s = sv.s;
  const ConjugateField psi = conjugate_function(s);
  const ConjugateSurface surf = conjugate_surface(s, c.js.core_margin);
  const TowerPiece tower = saddle_tower_piece(surf);
  const auto fluxes = edge_flux_report(s);

  double lo = psi.psi[0];
  double hi = psi.psi[0];
  for (double v : psi.psi) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> vertex_psi;
  for (int i = 0; i < p.edge_count(); ++i) vertex_psi.push_back(psi.psi[s.mesh->vertex_node(i)]);

  out.text("graph.obj", to_obj(graph_obj(s), "minimal graph (x1, x2, u), u clamped to +-" + format_number(s.cap)));
  out.text("conjugate.obj", to_obj(surface_obj(surf), "conjugate surface (x1*, x2*, x3* = psi)"));
  out.text("tower.obj", to_obj(tower_obj(tower), "saddle tower fundamental piece"));
  out.json("tower.json", Json{{"period", Json::array({num(tower.period.x), num(tower.period.y), num(tower.period.z)})},
                              {"welded", tower.welded},
                              {"nodes", tower.positions.size()},
                              {"triangles", tower.triangles.size()}});
  out.text("flux.csv", edge_flux_csv(fluxes));

  Json rep{{"mode", "solve"},
           {"name", c.name},
           {"domain", domain_json(*c.domain)},
           {"special", is_special(p)},
           {"mesh", mesh_json(*s.mesh, c)},
           {"solver", solver_json(c)},
           {"stabilized", !sv.failure},
           {"cap", num(s.cap)},
           {"energy", num(s.energy())},
           {"report", report_json(s.report)},
           {"conjugate",
            Json{{"loop_defect", num(psi.loop_defect)},
                 {"loop_defect_per_length", num(psi.loop_defect_per_length)},
                 {"psi_min", num(lo)},
                 {"psi_max", num(hi)},
                 {"vertex_psi", nums(vertex_psi)}}},
           {"surface",
            Json{{"loop_defects", nums({surf.loop_defects[0], surf.loop_defects[1], surf.loop_defects[2]})},
                 {"core_loop_defects",
                  nums({surf.core_loop_defects[0], surf.core_loop_defects[1], surf.core_loop_defects[2]})}}},
           {"edge_flux", flux_json(fluxes)}};
  out.json("report.json", rep);

  r.summary.push_back(sv.failure ? "not stabilized" : line("stabilized at cap %g", *s.report.stabilized_cap));
  r.summary.push_back(line("psi range [%.4f, %.4f]", lo, hi));
  if (sv.failure) throw *sv.failure;
}

void run_flux_report(const ExperimentConfig& c, Output& out, RunResult& r) {
  Solved sv = solve(c, c.domain->polygon());
  const auto rows = edge_flux_report(sv.s);
  out.text("flux.csv", edge_flux_csv(rows));
  double worst = 0.0;
  for (const EdgeFlux& f : rows) worst = std::max(worst, f.defect);
  r.summary.push_back(line("max edge defect %.4g", worst));
  if (sv.failure) throw *sv.failure;
}

void run_compare(const ExperimentConfig& c, Output& out, RunResult& r) {
  const MarkedPolygon p = c.domain->polygon();
  const std::array<Vec2, 4> square{Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
  bool is_square = p.edge_count() == 4;
  for (int i = 0; is_square && i < 4; ++i) is_square = distance(p.vertex(i), square[i]) <= kGeometryTol;
  if (!is_square) throw Error(ErrorKind::ConfigError, "runner", "compare needs the unit square domain");
  Solved sv = solve(c, p);
  if (sv.failure) throw *sv.failure;
  const GraphSolution& s = sv.s;
  const ScherkSquare oracle;
  CsvTable t({"node", "x1", "x2", "u", "oracle", "error"});
  double worst = 0.0;
  double sq = 0.0;
  const auto core = core_nodes(*s.mesh, c.js.core_margin);
  for (std::size_t i : core) {
    const Vec2 q = s.mesh->nodes[i];
    const double exact = scherk_value(oracle, q);
    const double err = std::abs(s.u[i] - exact);
    worst = std::max(worst, err);
    sq += err * err;
    t.row().cell(static_cast<long>(i)).cell(q.x).cell(q.y).cell(s.u[i]).cell(exact).cell(err);
  }
  out.text("compare.csv", t.str());
  const double rms = core.empty() ? 0.0 : std::sqrt(sq / core.size());
  out.json("compare.json", Json{{"mode", "compare"},
                                {"name", c.name},
                                {"mesh", mesh_json(*s.mesh, c)},
                                {"solver", solver_json(c)},
                                {"stabilized_cap", num(*s.report.stabilized_cap)},
                                {"core_nodes", core.size()},
                                {"max_error", num(worst)},
                                {"rms_error", num(rms)}});
  r.summary.push_back(line("max core error vs Scherk %.4g (rms %.4g)", worst, rms));
}

void run_export(const ExperimentConfig& c, Output& out, RunResult& r) {
  auto m = build_mesh(c.domain->polygon(), c);
  out.text("mesh.obj", to_obj(planar_obj(*m), "planar mesh at x3 = 0"));
  out.json("mesh.json", Json{{"mode", "export"}, {"name", c.name}, {"domain", domain_json(*c.domain)}, {"mesh", mesh_json(*m, c)}});
  r.summary.push_back(line("%g nodes, %g triangles", static_cast<double>(m->node_count()),
                           static_cast<double>(m->triangle_count())));
}

Json limit_json(const LimitDomain& d) {
  Json verts = Json::array();
  for (const LimitVertex& v : d.vertices)
    verts.push_back(Json{{"position", point(v.position)}, {"parity", v.even ? "even" : "odd"}, {"chain", v.chain}});
  Json rays = Json::array();
  for (const Ray& ray : d.rays) rays.push_back(Json{{"origin", point(ray.origin)}, {"direction", point(ray.direction)}});
  return Json{{"kind", std::string(to_string(d.kind))},
              {"special_bounded", d.special_bounded},
              {"special_unbounded", d.special_unbounded},
              {"parity_distance_condition", d.vertices.size() >= 2 ? Json(parity_distance_condition(d)) : Json(nullptr)},
              {"vertices", verts},
              {"rays", rays}};
}

void run_sequence_mode(const ExperimentConfig& c, Output& out, RunResult& r, int workers) {
  const SequenceSettings& q = *c.sequence;
  std::vector<MarkedPolygon> polys;
  for (const DomainSpec& d : q.members) polys.push_back(d.polygon());
  const SequenceExperiment e =
      run_sequence(polys, q.parameters, c.mesh, c.caps, c.js, c.probes, q.limit_tol, workers);
  const DivergenceReport rep = detect_divergence(e, q.divergence);

  CsvTable members({"member", "parameter", "stabilized", "stabilized_cap", "last_cap_difference", "psi_loop_defect"});
  for (std::size_t k = 0; k < e.members.size(); ++k) {
    const SequenceMember& m = e.members[k];
    const SolveReport& sr = m.solution.report;
    members.row()
        .cell(static_cast<long>(k))
        .cell(m.parameter)
        .cell(m.stabilized ? "true" : "false")
        .cell(sr.stabilized_cap ? format_number(*sr.stabilized_cap) : "")
        .cell(sr.cap_trace.empty() ? 0.0 : sr.cap_trace.back())
        .cell(m.conjugate.loop_defect);
  }
  out.text("members.csv", members.str());

  CsvTable stats({"kind", "id", "member", "parameter", "flux", "sup_gradient"});
  Json cands = Json::array();
  for (std::size_t k = 0; k < rep.candidates.size(); ++k) {
    const CandidateStats& cs = rep.candidates[k];
    for (std::size_t m = 0; m < cs.flux.size(); ++m)
      stats.row().cell("candidate").cell(static_cast<long>(k)).cell(static_cast<long>(m)).cell(e.members[m].parameter)
          .cell(cs.flux[m]).cell(cs.sup_gradient[m]);
    cands.push_back(Json{{"a", point(cs.segment.a)},
                         {"b", point(cs.segment.b)},
                         {"vertices", Json::array({cs.segment.i, cs.segment.j})},
                         {"flux", nums(cs.flux)},
                         {"sup_gradient", nums(cs.sup_gradient)},
                         {"verdict", std::string(to_string(cs.verdict))}});
    r.summary.push_back("candidate (" + format_number(cs.segment.a.x) + "," + format_number(cs.segment.a.y) + ")-(" +
                        format_number(cs.segment.b.x) + "," + format_number(cs.segment.b.y) +
                        "): " + std::string(to_string(cs.verdict)) + ", flux " + format_number(round9(cs.flux.back())));
  }
  Json probes = Json::array();
  for (std::size_t k = 0; k < rep.probes.size(); ++k) {
    const ProbeStats& ps = rep.probes[k];
    for (std::size_t m = 0; m < ps.gradient.size(); ++m)
      stats.row().cell("probe").cell(static_cast<long>(k)).cell(static_cast<long>(m)).cell(e.members[m].parameter)
          .cell("").cell(ps.gradient[m]);
    probes.push_back(Json{{"point", point(ps.point)}, {"gradient", nums(ps.gradient)}, {"bounded", ps.bounded}});
  }
  out.text("divergence.csv", stats.str());

  const DivergenceOptions& o = rep.options;
  Json doc{{"mode", "sequence"},
           {"name", c.name},
           {"parameters", nums(q.parameters)},
           {"mesh", Json{{"h", num(c.mesh.h)}, {"g", num(c.mesh.g)}}},
           {"solver", solver_json(c)},
           {"limit", limit_json(e.limit)},
           {"thresholds",
            Json{{"candidate_tol", num(o.candidate_tol)},
                 {"shrink", num(o.shrink)},
                 {"flux_slack", num(o.flux_slack)},
                 {"gradient_bound", num(o.gradient_bound)},
                 {"monotone_window", o.monotone_window}}},
           {"candidates", cands},
           {"probes", probes}};

  if (e.limit.special()) {
    const RhombusDecomposition rd = rhombus_decomposition(e.limit);
    Json rh = Json::array();
    for (const auto& quad : rd.rhombi) {
      Json corners = Json::array();
      for (const Vec2& v : quad) corners.push_back(point(v));
      rh.push_back(corners);
    }
    Json rj{{"rhombi", rh}, {"translation", rd.translation ? point(*rd.translation) : Json(nullptr)}};
    out.json("rhombi.json", rj);
    doc["rhombi"] = "rhombi.json";
  }

  if (q.anchor) {
    const NormalizedLimit nl = normalized_limit(e, *q.anchor, q.window, o.candidate_tol);
    CsvTable samples({"x1", "x2", "value"});
    for (const LimitSample& s : nl.samples) samples.row().cell(s.point.x).cell(s.point.y).cell(s.value);
    out.text("limit.csv", samples.str());
    Json lj{{"tag", nl.tag}, {"anchor", point(nl.anchor)}, {"samples", "limit.csv"}};
    if (q.second_anchor) {
      const NormalizedLimit other = normalized_limit(e, *q.second_anchor, q.window, o.candidate_tol);
      double lo = 1e300;
      double hi = -1e300;
      for (std::size_t k = 0; k < nl.samples.size(); ++k) {
        const double d = nl.samples[k].value - other.samples[k].value;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      lj["second_anchor"] = point(other.anchor);
      lj["shift"] = num(0.5 * (lo + hi));
      lj["shift_spread"] = num(hi - lo);
    }
    doc["normalized_limit"] = lj;
    r.summary.push_back("limit tag " + nl.tag);
  }
  out.json("divergence.json", doc);
  r.summary.insert(r.summary.begin(), "limit " + std::string(to_string(e.limit.kind)) +
                                          (e.limit.special() ? " (special)" : ""));
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, const RunOptions& options) {
  RunResult r;
  r.out = options.out.empty() ? std::filesystem::path(c.output) : options.out;
  Output out(r.out, r);
  switch (c.mode) {
    case Mode::Solve: run_solve(c, out, r); break;
    case Mode::FluxReport: run_flux_report(c, out, r); break;
    case Mode::Compare: run_compare(c, out, r); break;
    case Mode::Export: run_export(c, out, r); break;
    case Mode::Sequence: run_sequence_mode(c, out, r, options.workers); break;
  }
  return r;
}

std::string error_record(const Error& e) {
  return Json{{"kind", std::string(to_string(e.kind()))}, {"module", e.module()}, {"message", e.what()}}.dump(2) + "\n";
}

}  // namespace saddle
