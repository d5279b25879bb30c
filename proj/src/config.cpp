#include "saddle/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "saddle/error.hpp"

namespace saddle {

namespace {

using nlohmann::json;

constexpr const char* kModule = "config";

class Reader {
 public:
  Reader(std::string_view text, std::string_view source, std::filesystem::path base)
      : text_(text), source_(source), base_(std::move(base)) {}

  [[noreturn]] void fail(const std::string& message, std::size_t offset) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream out;
    out << source_ << ":" << line << ":" << col << ": " << message;
    throw Error(ErrorKind::ConfigError, kModule, out.str());
  }

  // Position of the first occurrence of the quoted key; 0 when absent.
  [[noreturn]] void fail_at(const std::string& key, const std::string& message) const {
    const std::size_t at = text_.find("\"" + key + "\"");
    fail(message, at == std::string_view::npos ? 0 : at);
  }

  json parse() const {
    try {
      return json::parse(text_.begin(), text_.end());
    } catch (const json::parse_error& e) {
      std::string what = e.what();
      const std::size_t cut = what.find("parse error");
      fail(cut == std::string::npos ? what : what.substr(cut), e.byte > 0 ? e.byte - 1 : 0);
    }
  }

  void keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) const {
    if (!obj.is_object()) fail_at(where, where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) fail_at(it.key(), "unknown key '" + it.key() + "' in " + where);
  }

  double number(const json& obj, const std::string& key, double fallback, double lo, double hi) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail_at(key, "'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) {
      std::ostringstream msg;
      msg << "'" << key << "' = " << x << " outside [" << lo << ", " << hi << "]";
      fail_at(key, msg.str());
    }
    return x;
  }

  int integer(const json& obj, const std::string& key, int fallback, int lo, int hi) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail_at(key, "'" + key + "' must be an integer");
    const long x = v.get<long>();
    if (x < lo || x > hi) fail_at(key, "'" + key + "' = " + std::to_string(x) + " out of range");
    return static_cast<int>(x);
  }

  Vec2 point(const json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail_at(key, "'" + key + "' must be a pair of numbers");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<double> numbers(const json& v, const std::string& key) const {
    if (!v.is_array()) fail_at(key, "'" + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) fail_at(key, "'" + key + "' must be a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  DomainSpec domain(const json& v, const std::string& key) const {
    if (v.is_string()) {
      std::filesystem::path p = v.get<std::string>();
      if (p.is_relative()) p = base_ / p;
      if (!std::filesystem::exists(p)) fail_at(key, "domain file " + p.string() + " does not exist");
      return read_domain_spec(p.string());
    }
    keys(v, {"name", "n", "angles"}, key);
    if (!v.contains("n") || !v.contains("angles")) fail_at(key, "'" + key + "' needs 'n' and 'angles'");
    DomainSpec d;
    if (v.contains("name")) {
      if (!v["name"].is_string()) fail_at("name", "'name' must be a string");
      d.name = v["name"].get<std::string>();
    }
    d.n = integer(v, "n", 0, 2, 1000);
    d.angles = numbers(v["angles"], "angles");
    try {
      d.polygon();
    } catch (const Error& e) {
      fail_at(key, std::string(to_string(e.kind())) + ": " + e.what());
    }
    return d;
  }

 private:
  std::string_view text_;
  std::string_view source_;
  std::filesystem::path base_;
};

Mode parse_mode(const Reader& r, const json& v) {
  if (!v.is_string()) r.fail_at("mode", "'mode' must be a string");
  const std::string s = v.get<std::string>();
  for (Mode m : {Mode::Solve, Mode::FluxReport, Mode::Sequence, Mode::Compare, Mode::Export})
    if (s == to_string(m)) return m;
  r.fail_at("mode", "unknown mode '" + s + "'");
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Solve: return "solve";
    case Mode::FluxReport: return "flux-report";
    case Mode::Sequence: return "sequence";
    case Mode::Compare: return "compare";
    case Mode::Export: return "export";
  }
  return "solve";
}

ExperimentConfig parse_config(std::string_view text, std::string_view source, const std::filesystem::path& base_dir) {
  const Reader r(text, source, base_dir);
  const json root = r.parse();
  r.keys(root, {"mode", "name", "domain", "sequence", "mesh", "solver", "probes", "output"}, "config");

  ExperimentConfig c;
  if (!root.contains("mode")) r.fail("missing 'mode'", 0);
  c.mode = parse_mode(r, root["mode"]);
  if (root.contains("name")) {
    if (!root["name"].is_string()) r.fail_at("name", "'name' must be a string");
    c.name = root["name"].get<std::string>();
  }
  if (root.contains("output")) {
    if (!root["output"].is_string()) r.fail_at("output", "'output' must be a string");
    c.output = root["output"].get<std::string>();
  }

  if (root.contains("mesh")) {
    const json& m = root["mesh"];
    r.keys(m, {"h", "g", "refine"}, "mesh");
    c.mesh.h = r.number(m, "h", c.mesh.h, 1e-3, 0.5);
    c.mesh.g = r.number(m, "g", c.mesh.g, 1e-3, 1.0);
    c.refine = r.integer(m, "refine", 0, 0, 3);
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    r.keys(s, {"caps", "tol", "cauchy_tol", "core_margin", "max_newton_iterations", "initial"}, "solver");
    if (s.contains("caps")) {
      c.caps = r.numbers(s["caps"], "caps");
      if (c.caps.size() < 2) r.fail_at("caps", "'caps' needs at least two entries");
      for (std::size_t k = 0; k < c.caps.size(); ++k)
        if (c.caps[k] < 0.0 || (k > 0 && !(c.caps[k] > c.caps[k - 1])))
          r.fail_at("caps", "'caps' must be non-negative and increasing");
    }
    c.js.tol = r.number(s, "tol", c.js.tol, 1e-14, 1.0);
    c.js.cauchy_tol = r.number(s, "cauchy_tol", c.js.cauchy_tol, 0.0, 10.0);
    c.js.core_margin = r.number(s, "core_margin", c.js.core_margin, 0.0, 0.5);
    c.js.solve.max_newton_iterations = r.integer(s, "max_newton_iterations", 200, 1, 10000);
    if (s.contains("initial")) {
      const json& v = s["initial"];
      if (v == "harmonic")
        c.js.solve.initial = InitialGuess::Harmonic;
      else if (v == "zero-interior")
        c.js.solve.initial = InitialGuess::ZeroInterior;
      else
        r.fail_at("initial", "'initial' must be \"harmonic\" or \"zero-interior\"");
    }
  }

  if (root.contains("probes")) {
    const json& p = root["probes"];
    if (!p.is_array()) r.fail_at("probes", "'probes' must be a list of points");
    for (const json& q : p) c.probes.push_back(r.point(q, "probes"));
  }

  if (c.mode == Mode::Sequence) {
    if (!root.contains("sequence")) r.fail("mode 'sequence' needs a 'sequence' block", 0);
    if (root.contains("domain")) r.fail_at("domain", "mode 'sequence' takes its domains from 'sequence.members'");
    const json& s = root["sequence"];
    r.keys(s,
           {"members", "limit_tol", "candidate_tol", "shrink", "flux_slack", "gradient_bound", "monotone_window",
            "anchor", "second_anchor", "window"},
           "sequence");
    SequenceSettings q;
    if (!s.contains("members") || !s["members"].is_array() || s["members"].size() < 2)
      r.fail_at("sequence", "'members' needs at least two entries");
    for (const json& m : s["members"]) {
      r.keys(m, {"parameter", "domain"}, "members");
      if (!m.contains("parameter") || !m.contains("domain")) r.fail_at("members", "each member needs 'parameter' and 'domain'");
      q.parameters.push_back(r.number(m, "parameter", 0.0, -1e300, 1e300));
      q.members.push_back(r.domain(m["domain"], "domain"));
    }
    q.limit_tol = r.number(s, "limit_tol", q.limit_tol, 1e-12, 1.0);
    q.divergence.candidate_tol = r.number(s, "candidate_tol", q.divergence.candidate_tol, 0.0, 0.5);
    q.divergence.shrink = r.number(s, "shrink", q.divergence.shrink, 0.0, 0.45);
    q.divergence.flux_slack = r.number(s, "flux_slack", q.divergence.flux_slack, 0.0, 1.0);
    q.divergence.gradient_bound = r.number(s, "gradient_bound", q.divergence.gradient_bound, 0.0, 1e12);
    q.divergence.monotone_window = r.integer(s, "monotone_window", q.divergence.monotone_window, 2, 100);
    if (s.contains("anchor")) q.anchor = r.point(s["anchor"], "anchor");
    if (s.contains("second_anchor")) q.second_anchor = r.point(s["second_anchor"], "second_anchor");
    if (s.contains("window")) {
      const json& w = s["window"];
      r.keys(w, {"center", "side", "resolution"}, "window");
      if (w.contains("center")) q.window.center = r.point(w["center"], "center");
      q.window.side = r.number(w, "side", q.window.side, 0.0, 100.0);
      q.window.resolution = r.integer(w, "resolution", q.window.resolution, 2, 1000);
    }
    c.sequence = std::move(q);
  } else {
    if (root.contains("sequence")) r.fail_at("sequence", "'sequence' is only valid in mode 'sequence'");
    if (!root.contains("domain")) r.fail("mode '" + std::string(to_string(c.mode)) + "' needs a 'domain'", 0);
    c.domain = r.domain(root["domain"], "domain");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, kModule, path.string() + ": cannot open config");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), path.string(), path.parent_path());
}

}  // namespace saddle
