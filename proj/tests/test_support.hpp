#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "saddle/jssolver.hpp"
#include "saddle/meshing.hpp"
#include "saddle/polygon.hpp"

namespace saddle::testing {

inline bool near(Vec2 a, Vec2 b, double tol = 1e-9) { return distance(a, b) <= tol; }

inline MarkedPolygon regular(int n) {
  const std::vector<double> a(2 * n, kPi / n);
  return MarkedPolygon::from_turning_angles(a, n);
}

inline MarkedPolygon square() { return regular(2); }
inline MarkedPolygon hexagon() { return regular(3); }
inline MarkedPolygon octagon() { return regular(4); }

/// 1 x (n-1) rectangle with its long sides split into unit edges.
inline MarkedPolygon split_rectangle(int n) {
  std::vector<double> a;
  a.push_back(kPi / 2);
  for (int k = 0; k < n - 2; ++k) a.push_back(0.0);
  a.push_back(kPi / 2);
  a.push_back(kPi / 2);
  for (int k = 0; k < n - 2; ++k) a.push_back(0.0);
  a.push_back(kPi / 2);
  return MarkedPolygon::from_turning_angles(a, n);
}

inline MarkedPolygon rectangle() { return split_rectangle(3); }

inline MarkedPolygon h_domain(double delta) {
  const double c = kPi / 2 - delta / 2;
  const std::vector<double> a{c, delta, c, c, delta, c};
  return MarkedPolygon::from_turning_angles(a, 3);
}

inline std::shared_ptr<const TriMesh> mesh_of(const MarkedPolygon& p, double h, double g = 0.25) {
  return std::make_shared<const TriMesh>(triangulate(p, h, g));
}

inline const std::vector<double>& default_caps() {
  static const std::vector<double> caps{2, 3, 4, 5, 6};
  return caps;
}

/// solve_js on (p, h, g=0.25) with default settings, cached per test binary.
inline const GraphSolution& js_solution(const std::string& key, const MarkedPolygon& p, double h) {
  static std::map<std::string, GraphSolution> cache;
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, solve_js(mesh_of(p, h), default_caps())).first;
  return it->second;
}

}  // namespace saddle::testing
