#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfvem/types.hpp"

namespace dfvem {

/// Raised for unreadable, inconsistent or geometrically invalid meshes.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MeshFormat { Json, TetraList };

struct Edge {
  std::array<int, 2> vertices; // vertices[0] < vertices[1]; this is the global direction
};

struct Face {
  std::vector<int> vertices;     // loop, counter-clockwise around the face normal
  std::vector<int> edges;        // edges[i] joins vertices[i] and vertices[i+1]
  std::vector<int> edge_orient;  // +1 if edges[i] runs vertices[i] -> vertices[i+1]
  std::array<int, 2> cells{-1, -1};
};

struct Cell {
  std::vector<int> faces;
  std::vector<int> face_orient; // +1 if the face normal points out of this cell
  std::vector<int> vertices;    // sorted
  std::vector<int> edges;       // sorted
};

struct EdgeGeometry {
  double length = 0.;
  Vec3 tangent = Vec3::Zero(); // unit, along the global direction
  Vec3 midpoint = Vec3::Zero();
};

struct FaceGeometry {
  double area = 0.;
  double diameter = 0.;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::Zero(); // unit
  Vec3 tau1 = Vec3::Zero();   // unit, along the first loop edge
  Vec3 tau2 = Vec3::Zero();   // normal x tau1
};

struct CellGeometry {
  double volume = 0.;
  double diameter = 0.;
  Vec3 barycenter = Vec3::Zero();
};

/// Polyhedral mesh with planar faces. Faces are shared between cells and carry
/// a fixed orientation; each cell records whether a face normal is outward.
class PolyMesh {
 public:
  /// Builds the topology and geometry. `cell_faces` uses signed one-based face
  /// ids: +(f+1) if loop f is counter-clockwise seen from outside the cell.
  static PolyMesh build(std::vector<Vec3> vertices,
                        std::vector<std::vector<int>> face_loops,
                        const std::vector<std::vector<int>>& cell_faces);

  int n_vertices() const { return static_cast<int>(m_vertices.size()); }
  int n_edges() const { return static_cast<int>(m_edges.size()); }
  int n_faces() const { return static_cast<int>(m_faces.size()); }
  int n_cells() const { return static_cast<int>(m_cells.size()); }

  const Vec3& vertex(int v) const { return m_vertices[v]; }
  const std::vector<Vec3>& vertices() const { return m_vertices; }
  const Edge& edge(int e) const { return m_edges[e]; }
  const Face& face(int f) const { return m_faces[f]; }
  const Cell& cell(int c) const { return m_cells[c]; }

  const EdgeGeometry& edge_geometry(int e) const { return m_edge_geo[e]; }
  const FaceGeometry& face_geometry(int f) const { return m_face_geo[f]; }
  const CellGeometry& cell_geometry(int c) const { return m_cell_geo[c]; }

  bool is_boundary_face(int f) const { return m_faces[f].cells[1] < 0; }
  bool is_boundary_edge(int e) const { return m_boundary_edge[e]; }
  bool is_boundary_vertex(int v) const { return m_boundary_vertex[v]; }

  /// Unit outward normal (inside the face plane) of the i-th loop edge of face f.
  Vec3 edge_normal_in_face(int f, int i) const;

  /// L_V - L_e + L_f - L_P.
  int euler_characteristic() const { return n_vertices() - n_edges() + n_faces() - n_cells(); }

  /// Signed one-based face lists per cell, as accepted by build().
  std::vector<std::vector<int>> signed_cell_faces() const;

 private:
  std::vector<Vec3> m_vertices;
  std::vector<Edge> m_edges;
  std::vector<Face> m_faces;
  std::vector<Cell> m_cells;
  std::vector<EdgeGeometry> m_edge_geo;
  std::vector<FaceGeometry> m_face_geo;
  std::vector<CellGeometry> m_cell_geo;
  std::vector<bool> m_boundary_edge;
  std::vector<bool> m_boundary_vertex;
};

/// Loads a mesh. For TetraList, `path` names the node file and the element
/// file is the same path with extension ".ele".
PolyMesh load_mesh(const std::string& path, MeshFormat format);
PolyMesh load_json_mesh(const std::string& path);
PolyMesh parse_json_mesh(const std::string& text);
PolyMesh load_tetra_list(const std::string& node_path, const std::string& element_path);
PolyMesh build_tetra_mesh(const std::vector<Vec3>& nodes, const std::vector<std::array<int, 4>>& tets);
std::string mesh_to_json(const PolyMesh& mesh);
void save_json_mesh(const PolyMesh& mesh, const std::string& path);

/// nx*ny*nz axis-aligned hexahedra filling [lo, hi]. Cells for which `keep`
/// returns false (given integer cell coordinates) are omitted.
PolyMesh generate_box(int nx, int ny, int nz, const Vec3& lo = Vec3::Zero(), const Vec3& hi = Vec3::Ones(),
                      const std::function<bool(int, int, int)>& keep = {});
/// n^3 unit-cube hexahedra on [0,1]^3.
PolyMesh generate_structured_cubes(int n);
/// Each of n^3 sub-cubes of [0,1]^3 split into six tetrahedra around the main diagonal.
PolyMesh generate_kuhn_tetra(int n);
/// Copy of the mesh with every vertex mapped by `map`.
PolyMesh transform_mesh(const PolyMesh& mesh, const std::function<Vec3(const Vec3&)>& map);

/// Mean cell diameter.
double mesh_size(const PolyMesh& mesh);

struct CellQuality {
  double edge_ratio = 0.;  // min h_e / h_P
  double face_ratio = 0.;  // min h_f / h_P
  double ball_ratio = 0.;  // distance from barycenter to nearest face plane / h_P
  double disk_ratio = 0.;  // min over faces of centroid-to-edge-line distance / h_P
};

struct QualityReport {
  double rho = 0.;
  std::vector<CellQuality> cells;
  double min_edge_ratio = 0.;
  double min_face_ratio = 0.;
  double min_ball_ratio = 0.;
  double min_disk_ratio = 0.;
  bool pass = false; // min_edge_ratio >= rho
};

QualityReport quality_check(const PolyMesh& mesh, double rho);
std::string quality_to_json(const QualityReport& report);

} // namespace dfvem
