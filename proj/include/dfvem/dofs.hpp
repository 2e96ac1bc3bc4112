#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dfvem/mesh.hpp"
#include "dfvem/types.hpp"

namespace dfvem {

/// Smooth vector field with its Jacobian, gradient(i,j) = d u_i / d x_j.
struct VectorField {
  std::function<Vec3(const Vec3&)> value;
  std::function<Mat3(const Vec3&)> gradient;
};

/// Interior Gauss-Lobatto nodes on [0,1] used as edge DoF points (k-1 of them).
std::vector<double> edge_nodes(int k);

/// Velocity DoF families.
///  D1: three components at each vertex.
///  D2: three components at the k-1 edge nodes, ordered along the global edge direction.
///  D3: per face monomial m_a, |a| <= k-2, the normal, tau1 and tau2 moments (1/|f|) int_f (v.t) m_a.
///  D4: (1/|P|) int_P v . c_j for the cross basis c_j of degree <= k-2.
///  D5: (h_P/|P|) int_P div(v) m_a for 1 <= |a| <= k-1.
enum class DofFamily { D1, D2, D3, D4, D5 };

/// Local DoF layout of one cell: vertices, edges, faces in the cell's lists,
/// then D4 and D5.
struct LocalLayout {
  int k = 2;
  int n_vertices = 0, n_edges = 0, n_faces = 0;
  int n_face_moments = 0; // dim P_{k-2}(f)
  int n_d4 = 0, n_d5 = 0;
  int off_edge = 0, off_face = 0, off_d4 = 0, off_d5 = 0, size = 0;

  int vertex_dof(int lv, int c) const { return 3 * lv + c; }
  int edge_dof(int le, int j, int c) const { return off_edge + 3 * ((k - 1) * le + j) + c; }
  int face_dof(int lf, int a, int comp) const { return off_face + 3 * (n_face_moments * lf + a) + comp; }
  int d4_dof(int j) const { return off_d4 + j; }
  /// `a` is the monomial index, 1 <= a < dim P_{k-1}.
  int d5_dof(int a) const { return off_d5 + a - 1; }
};

LocalLayout make_layout(const PolyMesh& mesh, int cell, int k);

/// Number of D4 and D5 DoFs per cell.
int n_d4_dofs(int k);
int n_d5_dofs(int k);

/// Global velocity numbering: vertex DoFs, then edge, face and cell DoFs.
class DofMapV {
 public:
  DofMapV(const PolyMesh& mesh, int k);
  int k() const { return m_k; }
  int size() const { return m_size; }
  int n_face_moments() const { return m_nfm; }
  int n_interior() const { return m_nint; }

  int vertex_dof(int v, int c) const { return 3 * v + c; }
  int edge_dof(int e, int j, int c) const { return m_off_edge + 3 * ((m_k - 1) * e + j) + c; }
  int face_dof(int f, int a, int comp) const { return m_off_face + 3 * (m_nfm * f + a) + comp; }
  int cell_dof(int cell, int i) const { return m_off_cell + m_nint * cell + i; }

  /// Global index of each local DoF of `cell`.
  std::vector<int> local_to_global(int cell) const;
  /// True for D1-D3 DoFs of boundary vertices, edges and faces.
  const std::vector<bool>& boundary_mask() const { return m_boundary; }
  DofFamily family(int dof) const;
  int count(DofFamily fam) const;

 private:
  const PolyMesh* m_mesh;
  int m_k, m_nfm, m_nint;
  int m_off_edge, m_off_face, m_off_cell, m_size;
  std::vector<bool> m_boundary;
};

/// Pressure: coefficients of the scaled monomials of P_{k-1} on each cell.
class DofMapQ {
 public:
  DofMapQ(const PolyMesh& mesh, int k);
  int size() const { return m_per_cell * m_cells; }
  int per_cell() const { return m_per_cell; }
  int dof(int cell, int q) const { return m_per_cell * cell + q; }

 private:
  int m_per_cell, m_cells;
};

/// Global dimensions of the discrete complex R -> W -> Sigma -> V -> Q -> 0.
struct ComplexDims {
  long dim_w = 0, dim_sigma = 0, dim_v = 0, dim_q = 0, dim_z = 0;
  int euler = 0; // L_V - L_e + L_f - L_P
  /// 1 - dim W + dim Sigma - dim V + dim Q.
  long alternating_sum() const { return 1 - dim_w + dim_sigma - dim_v + dim_q; }
};
ComplexDims complex_dims(const PolyMesh& mesh, int k);

/// DoF values of a smooth field on one cell, in the local layout. Moments use
/// quadrature exact to degree `exactness`.
Vector local_interpolate(const PolyMesh& mesh, int k, int cell, const VectorField& u, int exactness);
/// Global DoF vector of a smooth field.
Vector interpolate(const PolyMesh& mesh, const DofMapV& map, const VectorField& u, int exactness);

/// Summary of the DoF maps as JSON.
std::string dof_summary_json(const PolyMesh& mesh, const DofMapV& vmap, const DofMapQ& qmap);

} // namespace dfvem
