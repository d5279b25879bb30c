#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "saddle/jssolver.hpp"
#include "saddle/limits.hpp"
#include "saddle/polygon.hpp"

namespace saddle {

enum class Mode { Solve, FluxReport, Sequence, Compare, Export };

std::string_view to_string(Mode m);

struct SequenceSettings {
  std::vector<DomainSpec> members;
  std::vector<double> parameters;
  double limit_tol = 0.1;
  DivergenceOptions divergence;
  std::optional<Vec2> anchor;
  std::optional<Vec2> second_anchor;
  Window window;
};

/// One experiment. Read from JSON; see README for the schema.
struct ExperimentConfig {
  Mode mode = Mode::Solve;
  std::string name;
  std::optional<DomainSpec> domain;  ///< all modes but sequence
  std::optional<SequenceSettings> sequence;
  MeshSettings mesh;
  int refine = 0;  ///< uniform 1->4 splits applied after triangulate
  std::vector<double> caps{2, 3, 4, 5, 6};
  JsOptions js;
  std::vector<Vec2> probes;
  std::string output = "out";
};

/// Parses a JSON config. Relative domain file names resolve against
/// `base_dir`. Throws ConfigError with a `source:line:col:` prefix on
/// malformed input, unknown keys and out-of-range values.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>",
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace saddle
