#include "saddle/jssolver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace saddle {

namespace {

constexpr const char* kModule = "jssolver";

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct Element {
  std::array<int, 3> v;
  double area;
  std::array<Vec2, 3> dphi;  // gradients of the hat functions
};

std::vector<Element> build_elements(const TriMesh& m) {
  std::vector<Element> out;
  out.reserve(m.triangles.size());
  for (const auto& t : m.triangles) {
    const Vec2 a = m.nodes[t[0]];
    const Vec2 b = m.nodes[t[1]];
    const Vec2 c = m.nodes[t[2]];
    const double twice = orient(a, b, c);
    out.push_back({{t[0], t[1], t[2]}, 0.5 * twice, {perp(c - b) / twice, perp(a - c) / twice, perp(b - a) / twice}});
  }
  return out;
}

Vec2 element_gradient(const Element& e, std::span<const double> u) {
  return u[e.v[0]] * e.dphi[0] + u[e.v[1]] * e.dphi[1] + u[e.v[2]] * e.dphi[2];
}

/// Free (interior) unknowns and the map node -> unknown index.
struct Unknowns {
  std::vector<int> index;  // -1 for Dirichlet nodes
  std::vector<int> node;
};

Unknowns interior_unknowns(const TriMesh& m) {
  Unknowns out;
  out.index.assign(m.node_count(), -1);
  for (std::size_t i = 0; i < m.node_count(); ++i)
    if (!m.is_boundary_node(i)) {
      out.index[i] = static_cast<int>(out.node.size());
      out.node.push_back(static_cast<int>(i));
    }
  return out;
}

class SpdSolver {
 public:
  explicit SpdSolver(double tolerance) : tolerance_(tolerance) {}

  Vec solve(const SpMat& a, const Vec& b, long& iterations) {
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(tolerance_);
    cg.setMaxIterations(std::max<Eigen::Index>(100, 20 * a.rows()));
    cg.compute(a);
    Vec x = cg.solve(b);
    iterations += cg.iterations();
    if (cg.info() != Eigen::Success) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "conjugate gradients stagnated after %ld iterations (relative residual %.3g)",
                    static_cast<long>(cg.iterations()), cg.error());
      throw Error(ErrorKind::LinearSolveFailure, kModule, buf);
    }
    return x;
  }

 private:
  double tolerance_;
};

std::vector<double> harmonic_extension(const TriMesh& m, const std::vector<Element>& elems, const Unknowns& unk,
                                       std::vector<double> u, SpdSolver& solver, long& iterations) {
  const Eigen::Index n = static_cast<Eigen::Index>(unk.node.size());
  if (n == 0) return u;
  std::vector<Eigen::Triplet<double>> triplets;
  Vec rhs = Vec::Zero(n);
  for (const Element& e : elems)
    for (int i = 0; i < 3; ++i) {
      const int ri = unk.index[e.v[i]];
      if (ri < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const double k = e.area * dot(e.dphi[i], e.dphi[j]);
        const int cj = unk.index[e.v[j]];
        if (cj >= 0)
          triplets.emplace_back(ri, cj, k);
        else
          rhs[ri] -= k * u[e.v[j]];
      }
    }
  SpMat a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  const Vec x = solver.solve(a, rhs, iterations);
  (void)m;
  for (Eigen::Index k = 0; k < n; ++k) u[unk.node[k]] = x[k];
  return u;
}

double energy_of(const std::vector<Element>& elems, std::span<const double> u) {
  double sum = 0.0;
  for (const Element& e : elems) {
    const Vec2 g = element_gradient(e, u);
    sum += e.area * std::sqrt(1.0 + dot(g, g));
  }
  return sum;
}

Vec energy_gradient(const std::vector<Element>& elems, const Unknowns& unk, std::span<const double> u) {
  Vec grad = Vec::Zero(static_cast<Eigen::Index>(unk.node.size()));
  for (const Element& e : elems) {
    const Vec2 g = element_gradient(e, u);
    const double w = std::sqrt(1.0 + dot(g, g));
    for (int i = 0; i < 3; ++i) {
      const int r = unk.index[e.v[i]];
      if (r >= 0) grad[r] += e.area * dot(g, e.dphi[i]) / w;
    }
  }
  return grad;
}

SpMat energy_hessian(const std::vector<Element>& elems, const Unknowns& unk, std::span<const double> u) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(elems.size() * 9);
  for (const Element& e : elems) {
    const Vec2 g = element_gradient(e, u);
    const double w2 = 1.0 + dot(g, g);
    const double w = std::sqrt(w2);
    // area * (I / W - g g^T / W^3)
    const double s = e.area / w;
    const double t = e.area / (w * w2);
    for (int i = 0; i < 3; ++i) {
      const int r = unk.index[e.v[i]];
      if (r < 0) continue;
      const Vec2 di = e.dphi[i];
      for (int j = 0; j < 3; ++j) {
        const int c = unk.index[e.v[j]];
        if (c < 0) continue;
        const Vec2 dj = e.dphi[j];
        triplets.emplace_back(r, c, s * dot(di, dj) - t * dot(g, di) * dot(g, dj));
      }
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(unk.node.size());
  SpMat h(n, n);
  h.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

void fill_derived(GraphSolution& s, const std::vector<Element>& elems) {
  s.gradient.resize(elems.size());
  s.area_element.resize(elems.size());
  for (std::size_t t = 0; t < elems.size(); ++t) {
    const Vec2 g = element_gradient(elems[t], s.u);
    s.gradient[t] = g;
    s.area_element[t] = std::sqrt(1.0 + dot(g, g));
  }
}

}  // namespace

double GraphSolution::energy() const { return area_energy(*mesh, u); }

std::vector<double> capped_boundary_values(const TriMesh& m, double cap) {
  std::vector<double> u(m.node_count(), 0.0);
  for (std::size_t i = 0; i < m.node_count(); ++i)
    if (m.tags[i].kind == NodeKind::Edge) u[i] = cap * m.polygon.marking(m.tags[i].id);
  return u;
}

double area_energy(const TriMesh& m, std::span<const double> u) { return energy_of(build_elements(m), u); }

GraphSolution solve_capped(std::shared_ptr<const TriMesh> m, double cap, double tol, const SolveOptions& options) {
  if (!m) throw Error(ErrorKind::InvalidArgument, kModule, "null mesh");
  if (!(cap >= 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "cap must be non-negative");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "tol must be positive");

  const TriMesh& mesh = *m;
  const auto elems = build_elements(mesh);
  const Unknowns unk = interior_unknowns(mesh);
  SpdSolver solver(options.cg_tolerance);

  GraphSolution s;
  s.mesh = m;
  s.cap = cap;
  long cg_iterations = 0;
  std::vector<double> u = capped_boundary_values(mesh, cap);
  if (options.initial == InitialGuess::Harmonic) u = harmonic_extension(mesh, elems, unk, u, solver, cg_iterations);

  double energy = energy_of(elems, u);
  Vec grad = energy_gradient(elems, unk, u);
  double residual = grad.norm();
  s.report.energy_trace.push_back(energy);

  int iteration = 0;
  std::vector<double> trial(u.size());
  while (residual > tol) {
    if (iteration >= options.max_newton_iterations)
      throw Error(ErrorKind::NoDescent, kModule,
                  "Newton iteration limit reached with gradient norm " + std::to_string(residual));
    const SpMat hessian = energy_hessian(elems, unk, u);
    const Vec step = solver.solve(hessian, -grad, cg_iterations);
    const double slope = grad.dot(step);
    if (!(slope < 0.0)) throw Error(ErrorKind::NoDescent, kModule, "Newton direction is not a descent direction");

    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving < 60 && !accepted; ++halving, t *= 0.5) {
      trial = u;
      for (std::size_t k = 0; k < unk.node.size(); ++k) trial[unk.node[k]] += t * step[static_cast<Eigen::Index>(k)];
      const double trial_energy = energy_of(elems, trial);
      if (trial_energy <= energy + 1e-4 * t * slope) {
        accepted = true;
      } else if (trial_energy - energy <= 1e-14 * std::max(1.0, std::abs(energy))) {
        // Energy differences are at roundoff level; fall back to the gradient.
        accepted = energy_gradient(elems, unk, trial).norm() < residual;
      }
      if (accepted) {
        u.swap(trial);
        energy = trial_energy;
      }
    }
    if (!accepted)
      throw Error(ErrorKind::NoDescent, kModule,
                  "line search failed at gradient norm " + std::to_string(residual) + "; tolerance may be too tight");
    grad = energy_gradient(elems, unk, u);
    residual = grad.norm();
    s.report.energy_trace.push_back(energy);
    ++iteration;
  }

  s.u = std::move(u);
  s.report.iterations = iteration;
  s.report.final_residual = residual;
  s.report.cg_iterations = cg_iterations;
  fill_derived(s, elems);
  s.locator = std::make_shared<TriangleLocator>(mesh);
  return s;
}

std::vector<std::size_t> core_nodes(const TriMesh& m, double margin) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.node_count(); ++i)
    if (!m.is_boundary_node(i) && m.polygon.boundary_distance(m.nodes[i]) >= margin) out.push_back(i);
  return out;
}

GraphSolution solve_js(std::shared_ptr<const TriMesh> m, std::span<const double> caps, const JsOptions& options) {
  if (caps.size() < 2) throw Error(ErrorKind::InvalidArgument, kModule, "solve_js needs at least two caps");
  for (std::size_t k = 1; k < caps.size(); ++k)
    if (!(caps[k] > caps[k - 1])) throw Error(ErrorKind::InvalidArgument, kModule, "caps must be increasing");
  if (!(options.cauchy_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "cauchy_tol must be positive");

  const auto core = core_nodes(*m, options.core_margin);
  if (core.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "core margin leaves no interior nodes");

  SolveReport trace;
  std::optional<GraphSolution> previous;
  std::optional<double> stable_from;
  for (double cap : caps) {
    GraphSolution s = solve_capped(m, cap, options.tol, options.solve);
    double sup = 0.0;
    for (std::size_t i : core) sup = std::max(sup, std::abs(s.u[i]));
    trace.caps.push_back(cap);
    trace.core_sup.push_back(sup);
    if (previous) {
      double diff = 0.0;
      for (std::size_t i : core) diff = std::max(diff, std::abs(s.u[i] - previous->u[i]));
      trace.cap_trace.push_back(diff);
      if (diff > options.cauchy_tol)
        stable_from.reset();
      else if (!stable_from)
        stable_from = cap;
    }
    previous = std::move(s);
  }
  GraphSolution last = std::move(*previous);
  last.report.caps = trace.caps;
  last.report.cap_trace = trace.cap_trace;
  last.report.core_sup = trace.core_sup;
  last.report.stabilized_cap = stable_from;
  if (stable_from) return last;
  char buf[160];
  std::snprintf(buf, sizeof buf, "core values still moved by %.3g between caps %g and %g (cauchy_tol %.3g)",
                trace.cap_trace.back(), caps[caps.size() - 2], caps.back(), options.cauchy_tol);
  throw NoStabilizationError(buf, std::move(last));
}

Vec2 gradient_at(const GraphSolution& s, Vec2 q) {
  const auto t = s.locator->locate(q);
  if (!t) throw Error(ErrorKind::OutsideDomain, kModule, "query point lies outside the mesh");
  return s.gradient[*t];
}

double value_at(const GraphSolution& s, Vec2 q) {
  const auto t = s.locator->locate(q);
  if (!t) throw Error(ErrorKind::OutsideDomain, kModule, "query point lies outside the mesh");
  const auto l = s.locator->barycentric(*t, q);
  const auto& tri = s.mesh->triangles[*t];
  return l[0] * s.u[tri[0]] + l[1] * s.u[tri[1]] + l[2] * s.u[tri[2]];
}

}  // namespace saddle
