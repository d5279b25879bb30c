#include "saddle/polygon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "saddle/error.hpp"

namespace saddle {

namespace {

constexpr const char* kModule = "polygon";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, kModule, message);
}

double neumaier_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

double turn_between(Vec2 d0, Vec2 d1) { return std::atan2(cross(d0, d1), dot(d0, d1)); }

double angle_between(Vec2 a, Vec2 b) { return std::abs(turn_between(a, b)); }

Vec2 unit(Vec2 v) { return v / norm(v); }

}  // namespace

MarkedPolygon MarkedPolygon::from_turning_angles(std::span<const double> angles, int n) {
  if (angles.size() % 2 != 0)
    fail(ErrorKind::BadMarkingParity,
         "odd edge count " + std::to_string(angles.size()) + " cannot carry alternating markings");
  if (n < 2) fail(ErrorKind::InvalidArgument, "n must be at least 2, got " + std::to_string(n));
  if (angles.size() != static_cast<std::size_t>(2 * n))
    fail(ErrorKind::BadMarkingParity, "expected " + std::to_string(2 * n) + " turning angles, got " +
                                          std::to_string(angles.size()));
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double a = angles[i];
    if (!std::isfinite(a) || a < 0.0 || a >= kPi)
      fail(ErrorKind::NotConvex, "turning angle " + std::to_string(i) + " = " + std::to_string(a) +
                                     " is outside [0, pi)");
  }
  const double total = neumaier_sum(angles);
  if (std::abs(total - 2.0 * kPi) > kAngleSumTol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "turning angles sum to %.17g, not 2*pi", total);
    fail(ErrorKind::NonClosing, buf);
  }

  const int m = 2 * n;
  std::vector<Vec2> vertices(m);
  vertices[0] = {0.0, 0.0};
  // Compensated accumulation of the edge direction.
  double theta = 0.0;
  double comp = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    vertices[i + 1] = vertices[i] + unit_direction(theta);
    const double y = angles[i] - comp;
    const double t = theta + y;
    comp = (t - theta) - y;
    theta = t;
  }
  vertices[1] = {1.0, 0.0};
  const Vec2 closing = vertices[m - 1] + unit_direction(theta);
  if (norm(closing) > kGeometryTol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "polygon misses the origin by %.3g", norm(closing));
    fail(ErrorKind::NonClosing, buf);
  }
  return MarkedPolygon(std::move(vertices), n);
}

MarkedPolygon MarkedPolygon::from_vertices(std::span<const Vec2> vertices) {
  const int m = static_cast<int>(vertices.size());
  if (m % 2 != 0)
    fail(ErrorKind::BadMarkingParity, "odd vertex count " + std::to_string(m));
  if (m < 4) fail(ErrorKind::InvalidArgument, "need at least 4 vertices");
  if (norm(vertices[0]) > kGeometryTol || distance(vertices[1], {1.0, 0.0}) > kGeometryTol)
    fail(ErrorKind::InvalidArgument, "polygon is not normalized to p0=(0,0), p1=(1,0)");
  for (int i = 0; i < m; ++i) {
    const double len = distance(vertices[i], vertices[(i + 1) % m]);
    if (std::abs(len - 1.0) > kGeometryTol)
      fail(ErrorKind::InvalidArgument, "edge " + std::to_string(i) + " has length " + std::to_string(len));
  }
  std::vector<double> angles(m);
  for (int i = 0; i < m; ++i) {
    const Vec2 e0 = vertices[(i + 1) % m] - vertices[i];
    const Vec2 e1 = vertices[(i + 2) % m] - vertices[(i + 1) % m];
    double a = turn_between(e0, e1);
    if (a < -kGeometryTol)
      fail(ErrorKind::NotConvex, "negative turn at vertex " + std::to_string((i + 1) % m));
    angles[i] = std::max(a, 0.0);
  }
  // Clamping removes at most a few ulps of winding; restore it on the largest turn.
  const double deficit = 2.0 * kPi - neumaier_sum(angles);
  if (std::abs(deficit) > 1e-6)
    fail(ErrorKind::NotConvex, "vertices do not wind once counterclockwise");
  *std::max_element(angles.begin(), angles.end()) += deficit;
  return from_turning_angles(angles, m / 2);
}

std::vector<int> MarkedPolygon::markings() const {
  std::vector<int> out(edge_count());
  for (int i = 0; i < edge_count(); ++i) out[i] = marking(i);
  return out;
}

std::vector<double> MarkedPolygon::turning_angles() const {
  const int m = edge_count();
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) {
    const Vec2 e0 = vertex(i + 1) - vertex(i);
    const Vec2 e1 = vertex(i + 2) - vertex(i + 1);
    out[i] = turn_between(e0, e1);
  }
  return out;
}

double MarkedPolygon::area() const {
  double twice = 0.0;
  for (int i = 0; i < edge_count(); ++i) twice += cross(vertex(i), vertex(i + 1));
  return 0.5 * twice;
}

bool MarkedPolygon::contains(Vec2 q, double eps) const {
  for (int i = 0; i < edge_count(); ++i)
    if (orient(vertex(i), vertex(i + 1), q) < -eps) return false;
  return true;
}

double MarkedPolygon::boundary_distance(Vec2 q) const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < edge_count(); ++i)
    best = std::min(best, point_segment_distance(q, vertex(i), vertex(i + 1)));
  return best;
}

double MarkedPolygon::nearest_vertex_distance(Vec2 q) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& v : vertices_) best = std::min(best, distance(q, v));
  return best;
}

bool is_special(const MarkedPolygon& p) {
  const int n = p.n();
  if (n < 3) return false;
  const int m = p.edge_count();
  const std::vector<double> turns = p.turning_angles();
  std::vector<int> corners;
  for (int i = 0; i < m; ++i)
    if (turns[i] > kGeometryTol) corners.push_back(p.wrap(i + 1));
  if (corners.size() != 4) return false;
  std::sort(corners.begin(), corners.end());
  int runs[4];
  for (int k = 0; k < 4; ++k) runs[k] = p.wrap(corners[(k + 1) % 4] - corners[k]);
  if (runs[0] != runs[2] || runs[1] != runs[3]) return false;
  const int lo = std::min(runs[0], runs[1]);
  const int hi = std::max(runs[0], runs[1]);
  if (lo != 1 || hi != n - 1) return false;
  auto turn_at = [&](int vertex) { return turns[p.wrap(vertex - 1)]; };
  return std::abs(turn_at(corners[0]) + turn_at(corners[1]) - kPi) <= kGeometryTol &&
         std::abs(turn_at(corners[1]) + turn_at(corners[2]) - kPi) <= kGeometryTol;
}

// ---------------------------------------------------------------------------
// Domain spec files

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

DomainSpec parse_domain_spec(std::string_view text, std::string_view source) {
  DomainSpec spec;
  std::map<std::string, int> seen;
  auto error = [&](int line, const std::string& what) {
    throw Error(ErrorKind::ConfigError, kModule,
                std::string(source) + ":" + std::to_string(line) + ": " + what);
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) error(line_no, "expected `key = value`");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (seen.count(key)) error(line_no, "duplicate key `" + key + "`");
    seen[key] = line_no;

    if (key == "name") {
      spec.name = value;
    } else if (key == "n") {
      if (!parse_number(value, spec.n)) error(line_no, "n must be an integer, got `" + value + "`");
    } else if (key == "angles") {
      if (!value.empty() && value.front() == '[') {
        if (value.back() != ']') error(line_no, "unterminated `[` in angles");
        value = value.substr(1, value.size() - 2);
      }
      std::replace(value.begin(), value.end(), ',', ' ');
      std::istringstream in(value);
      std::string token;
      while (in >> token) {
        double a = 0.0;
        if (!parse_number(token, a)) error(line_no, "angle `" + token + "` is not a decimal literal");
        spec.angles.push_back(a);
      }
    } else {
      error(line_no, "unknown key `" + key + "`");
    }
  }
  if (!seen.count("n")) error(line_no, "missing required key `n`");
  if (!seen.count("angles")) error(line_no, "missing required key `angles`");
  return spec;
}

DomainSpec read_domain_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, kModule, "cannot open domain spec `" + path + "`");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_domain_spec(buffer.str(), path);
}

std::string format_domain_spec(const DomainSpec& spec) {
  std::string out;
  if (!spec.name.empty()) out += "name = " + spec.name + "\n";
  out += "n = " + std::to_string(spec.n) + "\n";
  out += "angles =";
  for (double a : spec.angles) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %.17g", a);
    out += buf;
  }
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Limits of sequences

std::string_view to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::BoundedPolygon: return "bounded-polygon";
    case LimitKind::Halfplane: return "halfplane";
    case LimitKind::Strip: return "strip";
    case LimitKind::UnboundedPolygon: return "unbounded-polygon";
    case LimitKind::Line: return "line";
    case LimitKind::Halfline: return "halfline";
  }
  return "unknown";
}

bool LimitDomain::adjacent(std::size_t i, std::size_t j) const {
  if (i == j || i >= vertices.size() || j >= vertices.size()) return false;
  if (vertices[i].chain != vertices[j].chain) return false;
  const std::size_t lo = std::min(i, j);
  const std::size_t hi = std::max(i, j);
  if (hi - lo == 1) return true;
  return kind == LimitKind::BoundedPolygon && lo == 0 && hi + 1 == vertices.size();
}

LimitDomain limit_of(const MarkedPolygon& p) {
  LimitDomain d;
  d.kind = LimitKind::BoundedPolygon;
  for (int i = 0; i < p.edge_count(); ++i) d.vertices.push_back({p.vertex(i), i % 2 == 0, 0});
  d.special_bounded = is_special(p);
  d.polygon = p;
  return d;
}

namespace {

[[noreturn]] void undecided(const std::string& why) {
  throw Error(ErrorKind::Undecided, kModule, "limit undecided: " + why);
}

// Snaps extrapolated turning angles this close to zero onto collinear edges.
constexpr double kSnapTol = 1e-6;

// Aitken extrapolation of each turning angle over the last three members,
// falling back to the last member when the tail is not geometric.
std::vector<double> extrapolate_angles(std::span<const MarkedPolygon> seq) {
  const MarkedPolygon& last = seq.back();
  std::vector<double> out = last.turning_angles();
  if (seq.size() < 3) return out;
  const MarkedPolygon& a = seq[seq.size() - 3];
  const MarkedPolygon& b = seq[seq.size() - 2];
  if (a.edge_count() != last.edge_count() || b.edge_count() != last.edge_count()) return out;
  const auto ta = a.turning_angles();
  const auto tb = b.turning_angles();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d1 = tb[i] - ta[i];
    const double d2 = out[i] - tb[i];
    const double denom = d2 - d1;
    if (std::abs(d1) < 1e-14 || std::abs(denom) < 1e-14) continue;
    const double ratio = d2 / d1;
    if (ratio <= 0.0 || ratio >= 1.0) continue;
    out[i] -= d2 * d2 / denom;
  }
  return out;
}

MarkedPolygon bounded_limit_polygon(std::span<const MarkedPolygon> seq, double tol) {
  const MarkedPolygon& last = seq.back();
  std::vector<double> angles = extrapolate_angles(seq);
  for (double& a : angles)
    if (a < kSnapTol) a = 0.0;
  const double sum = neumaier_sum(angles);
  for (double& a : angles) a *= 2.0 * kPi / sum;
  try {
    MarkedPolygon p = MarkedPolygon::from_turning_angles(angles, last.n());
    double drift = 0.0;
    for (int i = 0; i < p.edge_count(); ++i) drift = std::max(drift, distance(p.vertex(i), last.vertex(i)));
    if (drift < tol) return p;
  } catch (const Error&) {
  }
  return last;
}

// Vertex index for a label counted forward (>= 0) or backward (< 0) from p0.
int label_index(const MarkedPolygon& p, int label) { return p.wrap(label); }

bool straight_on_line(std::span<const Vec2> pts, Vec2 origin, Vec2 dir, double tol) {
  for (const Vec2& q : pts)
    if (std::abs(cross(dir, q - origin)) >= tol) return false;
  return true;
}

}  // namespace

LimitDomain classify_limit(std::span<const MarkedPolygon> seq, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "tol must be positive");
  if (seq.size() < 2) undecided("need at least two members");
  for (const auto& p : seq)
    if (norm(p.vertex(0)) > kGeometryTol || distance(p.vertex(1), {1.0, 0.0}) > kGeometryTol)
      throw Error(ErrorKind::InvalidArgument, kModule, "sequence member is not normalized");

  const MarkedPolygon& prev = seq[seq.size() - 2];
  const MarkedPolygon& last = seq.back();

  if (prev.edge_count() == last.edge_count()) {
    bool stable = true;
    for (int i = 0; i < last.edge_count(); ++i)
      stable = stable && distance(prev.vertex(i), last.vertex(i)) < tol;
    if (!stable) undecided("vertex count is fixed but vertices have not stabilized");
    MarkedPolygon p = bounded_limit_polygon(seq, tol);
    if (p.area() < tol) undecided("bounded limit degenerates to a segment");
    return limit_of(p);
  }

  // Unbounded candidates: the farthest vertex must escape monotonically.
  double previous_radius = -1.0;
  for (const auto& p : seq) {
    double radius = 0.0;
    for (const Vec2& v : p.vertices()) radius = std::max(radius, norm(v));
    if (!(radius > previous_radius)) undecided("vertex count changes but the diameter is not increasing");
    previous_radius = radius;
  }
  if (previous_radius <= 1.0 / tol) undecided("escaping vertices have not passed the radius 1/tol");

  LimitDomain d;

  double width = 0.0;
  double min_x = 0.0;
  double max_x = 0.0;
  for (const Vec2& v : last.vertices()) {
    width = std::max(width, v.y);
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
  }
  if (width < tol) {
    const bool left = min_x < -1.0 / tol;
    const bool right = max_x > 1.0 / tol;
    d.vertices = {{{0.0, 0.0}, true, 0}, {{1.0, 0.0}, false, 0}};
    if (left && right) {
      d.kind = LimitKind::Line;
      d.rays = {{{1.0, 0.0}, {1.0, 0.0}}, {{0.0, 0.0}, {-1.0, 0.0}}};
    } else {
      d.kind = LimitKind::Halfline;
      d.rays = {right ? Ray{{1.0, 0.0}, {1.0, 0.0}} : Ray{{0.0, 0.0}, {-1.0, 0.0}}};
    }
    return d;
  }

  // Chain of label-stable vertices around the fixed edge.
  const int n_min = std::min(prev.n(), last.n());
  auto stable_label = [&](int label) {
    return distance(prev.vertex(label_index(prev, label)), last.vertex(label_index(last, label))) < tol;
  };
  int forward = 1;
  while (forward + 1 <= n_min && stable_label(forward + 1)) ++forward;
  int backward = 0;
  while (backward - 1 >= -(n_min - 1) && stable_label(backward - 1)) --backward;
  if (forward == n_min && backward == -(n_min - 1)) undecided("all shared vertices stable but counts differ");

  std::vector<int> chain_labels;
  for (int l = backward; l <= forward; ++l) chain_labels.push_back(l);
  std::vector<bool> in_chain(last.edge_count(), false);
  for (int l : chain_labels) in_chain[label_index(last, l)] = true;

  // Any other positionally stable vertices (same parity) form a second chain.
  std::vector<int> second;
  for (int k = 1; k < last.edge_count(); ++k) {
    const int i = last.wrap(forward + k);
    if (in_chain[i]) break;
    const Vec2 q = last.vertex(i);
    if (norm(q) > 1.0 / tol) continue;
    for (int j = 0; j < prev.edge_count(); ++j)
      if (j % 2 == i % 2 && distance(prev.vertex(j), q) < tol) {
        second.push_back(i);
        break;
      }
  }
  for (std::size_t k = 1; k < second.size(); ++k)
    if (last.wrap(second[k] - second[k - 1]) != 1) undecided("stable vertices form more than two chains");

  auto chain_pos = [&](int label) { return last.vertex(label_index(last, label)); };
  const Vec2 first = chain_pos(backward);
  const Vec2 end = chain_pos(forward);
  const Vec2 out_dir = unit(last.vertex(label_index(last, forward + 1)) - end);
  const Vec2 back_dir = unit(last.vertex(label_index(last, backward - 1)) - first);

  for (int l : chain_labels) d.vertices.push_back({chain_pos(l), label_index(last, l) % 2 == 0, 0});
  d.rays = {{end, out_dir}, {first, back_dir}};

  std::vector<Vec2> chain_points;
  for (int l : chain_labels) chain_points.push_back(chain_pos(l));
  const bool on_axis = straight_on_line(chain_points, {0.0, 0.0}, {1.0, 0.0}, tol);

  if (!second.empty()) {
    std::vector<Vec2> pts;
    for (int i : second) pts.push_back(last.vertex(i));
    const double level = pts.front().y;
    if (!on_axis || pts.size() < 2 || !straight_on_line(pts, {0.0, level}, {1.0, 0.0}, tol))
      undecided("two stable chains that do not bound a strip");
    for (int i : second) d.vertices.push_back({last.vertex(i), i % 2 == 0, 1});
    const Vec2 s_first = pts.front();
    const Vec2 s_end = pts.back();
    d.rays.push_back({s_end, unit(last.vertex(last.wrap(second.back() + 1)) - s_end)});
    d.rays.push_back({s_first, unit(last.vertex(last.wrap(second.front() - 1)) - s_first)});
    d.kind = LimitKind::Strip;
    return d;
  }

  if (on_axis && angle_between(out_dir, {1.0, 0.0}) < tol && angle_between(back_dir, {-1.0, 0.0}) < tol) {
    d.kind = LimitKind::Halfplane;
    return d;
  }
  d.kind = LimitKind::UnboundedPolygon;
  if (angle_between(out_dir, back_dir) < tol && chain_labels.size() == 2) d.special_unbounded = true;
  return d;
}

bool parity_distance_condition(const LimitDomain& d) {
  for (std::size_t i = 0; i < d.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < d.vertices.size(); ++j) {
      if (d.vertices[i].even == d.vertices[j].even || d.adjacent(i, j)) continue;
      if (distance(d.vertices[i].position, d.vertices[j].position) <= 1.0 + kGeometryTol) return false;
    }
  return true;
}

}  // namespace saddle
