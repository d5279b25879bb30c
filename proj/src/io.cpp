#include "saddle/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "saddle/error.hpp"

namespace saddle {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

double round9(double x) {
  if (!std::isfinite(x)) return x;
  const std::string s = format_number(x);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

ObjMesh planar_obj(const TriMesh& m) {
  ObjMesh out;
  for (const Vec2& p : m.nodes) out.positions.push_back({p.x, p.y, 0.0});
  for (const Triangle& t : m.triangles) out.triangles.push_back(t);
  return out;
}

ObjMesh graph_obj(const GraphSolution& s) {
  ObjMesh out = planar_obj(*s.mesh);
  for (std::size_t i = 0; i < s.u.size(); ++i) out.positions[i].z = std::clamp(s.u[i], -s.cap, s.cap);
  return out;
}

ObjMesh surface_obj(const ConjugateSurface& c) {
  ObjMesh out;
  out.positions = c.positions;
  for (const Triangle& t : c.mesh->triangles) out.triangles.push_back(t);
  return out;
}

ObjMesh tower_obj(const TowerPiece& t) { return {t.positions, t.triangles}; }

std::string to_obj(const ObjMesh& mesh, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  for (const Vec3& p : mesh.positions)
    out += "v " + format_number(p.x) + " " + format_number(p.y) + " " + format_number(p.z) + "\n";
  for (const auto& t : mesh.triangles)
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "io", "cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::IoError, "io", "write failed for " + path.string());
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::cell(const std::string& s) {
  rows_.back().push_back(s);
  return *this;
}

CsvTable& CsvTable::cell(double x) { return cell(format_number(x)); }

CsvTable& CsvTable::cell(long x) { return cell(std::to_string(x)); }

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

std::string edge_flux_csv(const std::vector<EdgeFlux>& rows) {
  CsvTable t({"edge", "marking", "flux", "defect"});
  for (const EdgeFlux& r : rows) t.row().cell(r.edge).cell(r.marking).cell(r.flux).cell(r.defect);
  return t.str();
}

}  // namespace saddle
