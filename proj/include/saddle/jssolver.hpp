#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "saddle/error.hpp"
#include "saddle/geometry.hpp"
#include "saddle/meshing.hpp"

namespace saddle {

enum class InitialGuess { Harmonic, ZeroInterior };

struct SolveOptions {
  InitialGuess initial = InitialGuess::Harmonic;
  int max_newton_iterations = 200;
  double cg_tolerance = 1e-10;  ///< relative residual of the inner solve
};

struct JsOptions {
  double tol = 1e-9;
  double cauchy_tol = 1e-3;
  double core_margin = 0.15;
  SolveOptions solve;
};

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;  ///< Euclidean norm of the energy gradient
  std::vector<double> energy_trace;
  long cg_iterations = 0;

  // Filled by solve_js.
  std::vector<double> caps;
  std::vector<double> cap_trace;  ///< max core difference between consecutive caps
  std::vector<double> core_sup;   ///< max |u| over core nodes, one entry per cap
  std::optional<double> stabilized_cap;  ///< first cap of the final run of small differences
};

/// Piecewise-linear minimal graph on a mesh with +-M Dirichlet data.
struct GraphSolution {
  std::shared_ptr<const TriMesh> mesh;
  std::shared_ptr<const TriangleLocator> locator;
  std::vector<double> u;
  double cap = 0.0;
  std::vector<Vec2> gradient;        ///< per triangle
  std::vector<double> area_element;  ///< per triangle, sqrt(1 + |grad u|^2)
  SolveReport report;

  double energy() const;
};

/// Capped solves never stabilized. Carries the drift diagnostics and the
/// solution at the final cap.
class NoStabilizationError : public Error {
 public:
  NoStabilizationError(const std::string& message, GraphSolution last)
      : Error(ErrorKind::NoStabilization, "jssolver", message), last_(std::move(last)) {}

  const GraphSolution& last() const { return last_; }
  const SolveReport& report() const { return last_.report; }

 private:
  GraphSolution last_;
};

/// Dirichlet data of the capped problem: +-M inside marked edges, 0 at
/// polygon vertices. Interior entries are zero.
std::vector<double> capped_boundary_values(const TriMesh& m, double cap);

/// Sum over triangles of area * sqrt(1 + |grad u|^2).
double area_energy(const TriMesh& m, std::span<const double> u);

/// Minimizes the discrete area with Newton's method and a backtracking line
/// search until the energy gradient norm is at most tol.
GraphSolution solve_capped(std::shared_ptr<const TriMesh> m, double cap, double tol, const SolveOptions& options = {});

/// Runs solve_capped over all caps and returns the solution at the last one.
/// Succeeds when the core values moved by at most cauchy_tol between every
/// pair of consecutive caps from some cap on; that cap is recorded as
/// stabilized_cap. Throws NoStabilizationError otherwise.
GraphSolution solve_js(std::shared_ptr<const TriMesh> m, std::span<const double> caps, const JsOptions& options = {});

/// Gradient of the triangle containing q (lowest index on ties).
Vec2 gradient_at(const GraphSolution& s, Vec2 q);
/// Linear interpolation of u at q.
double value_at(const GraphSolution& s, Vec2 q);

/// Interior nodes at distance >= margin from the polygon boundary.
std::vector<std::size_t> core_nodes(const TriMesh& m, double margin);

}  // namespace saddle
