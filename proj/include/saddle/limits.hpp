#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "saddle/conjugate.hpp"
#include "saddle/jssolver.hpp"
#include "saddle/polygon.hpp"

namespace saddle {

struct SequenceMember {
  double parameter = 0.0;  ///< degeneration parameter supplied by the caller
  MarkedPolygon polygon;
  GraphSolution solution;
  ConjugateField conjugate;
  bool stabilized = false;  ///< solve_js met its Cauchy criterion
};

struct SequenceExperiment {
  std::vector<SequenceMember> members;
  LimitDomain limit;
  std::vector<Vec2> probes;
};

struct MeshSettings {
  double h = 0.05;
  double g = 0.25;
};

/// Meshes and solves every member (up to `workers` at a time), then
/// classifies the limit with `limit_tol`. Members that do not stabilize keep
/// their final-cap solution. Results do not depend on the worker count.
SequenceExperiment run_sequence(const std::vector<MarkedPolygon>& polygons, const std::vector<double>& parameters,
                                const MeshSettings& mesh, const std::vector<double>& caps, const JsOptions& js,
                                std::vector<Vec2> probes, double limit_tol, int workers = 1);

struct Segment {
  Vec2 a;
  Vec2 b;
  int i = 0;  ///< limit vertex indices
  int j = 0;
};

/// Non-adjacent different-parity vertex pairs at distance 1 within tol.
std::vector<Segment> divergence_candidates(const LimitDomain& d, double tol);

enum class Verdict { Diverging, NotDiverging, Undecided };

std::string_view to_string(Verdict v);

struct DivergenceOptions {
  double candidate_tol = 1e-2;
  double shrink = 0.05;  ///< trimmed from each end of a candidate segment
  double flux_slack = 0.05;
  double gradient_bound = 50.0;
  int monotone_window = 3;
  int samples = 400;  ///< gradient samples per segment
};

struct CandidateStats {
  Segment segment;
  std::vector<double> flux;  ///< |flux| / length of the trimmed segment, per member
  std::vector<double> sup_gradient;
  Verdict verdict = Verdict::Undecided;
};

struct ProbeStats {
  Vec2 point;
  std::vector<double> gradient;  ///< |grad u| per member
  bool bounded = true;
};

struct DivergenceReport {
  std::vector<CandidateStats> candidates;
  std::vector<ProbeStats> probes;
  DivergenceOptions options;
};

/// Flux saturation and gradient growth along every candidate segment.
/// Needs at least three members.
DivergenceReport detect_divergence(const SequenceExperiment& e, const DivergenceOptions& options = {});

struct RhombusDecomposition {
  std::vector<std::array<Vec2, 4>> rhombi;  ///< counterclockwise corners
  /// Unbounded case: the rhombi continue by repeated translation.
  std::optional<Vec2> translation;
};

/// Slices a special limit domain along its divergence segments. Throws
/// NotSpecial otherwise.
RhombusDecomposition rhombus_decomposition(const LimitDomain& d);

struct Window {
  Vec2 center{0.5, 0.5};
  double side = 0.6;
  int resolution = 13;  ///< samples per side
};

struct LimitSample {
  Vec2 point;
  double value = 0.0;  ///< u(point) - u(q) on the last member
};

struct NormalizedLimit {
  std::vector<LimitSample> samples;
  std::string tag;
  Vec2 anchor;
};

/// Tag naming the limit surface family for a limit domain shape.
std::string limit_tag(const LimitDomain& d);

/// Last member renormalized to vanish at q, sampled over the window. Throws
/// QOutsideConvergenceDomain when q lies within 0.1 of a candidate segment.
NormalizedLimit normalized_limit(const SequenceExperiment& e, Vec2 q, const Window& window,
                                 double candidate_tol = 1e-2);

inline constexpr double kDivergenceClearance = 0.1;

}  // namespace saddle
