#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "saddle/conjugate.hpp"
#include "saddle/geometry.hpp"
#include "saddle/jssolver.hpp"
#include "saddle/meshing.hpp"

namespace saddle {

/// Nine significant digits, shortest form, independent of the C locale.
std::string format_number(double x);
/// x rounded to nine significant digits (for JSON output).
double round9(double x);

struct ObjMesh {
  std::vector<Vec3> positions;
  std::vector<std::array<int, 3>> triangles;  ///< zero-based
};

ObjMesh planar_obj(const TriMesh& m);
/// Graph (x1, x2, u) with u clamped to +-cap.
ObjMesh graph_obj(const GraphSolution& s);
ObjMesh surface_obj(const ConjugateSurface& c);
ObjMesh tower_obj(const TowerPiece& t);

std::string to_obj(const ObjMesh& mesh, const std::string& comment = {});

/// Throws IoError when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Minimal CSV builder; cells are written verbatim, numbers via format_number.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& cell(const std::string& s);
  CsvTable& cell(double x);
  CsvTable& cell(long x);
  CsvTable& cell(int x) { return cell(static_cast<long>(x)); }

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string edge_flux_csv(const std::vector<EdgeFlux>& rows);

}  // namespace saddle
