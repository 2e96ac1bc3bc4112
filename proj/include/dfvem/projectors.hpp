#pragma once

#include <vector>

#include "dfvem/dofs.hpp"
#include "dfvem/mesh.hpp"
#include "dfvem/polyquad.hpp"
#include "dfvem/types.hpp"

namespace dfvem {

/// Raised when a DoF set cannot separate the polynomials it must reproduce.
class ProjectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar projections on one face. They act on the face DoFs of a single
/// component, ordered as: loop vertex values, edge node values along the loop,
/// then moments (1/|f|) int_f v m_a for |a| <= k-2. Results are coefficients
/// in the face's scaled monomials.
struct FaceProjections {
  int k = 2;
  int n_dofs = 0;
  Matrix dof_matrix; // n_dofs x dim P_k(f): DoFs of each monomial
  Matrix pi_d;       // dim P_k(f) x n_dofs
  Matrix pi_nabla;   // dim P_k(f) x n_dofs
  Matrix pi0;        // dim P_{k+1}(f) x n_dofs
  Matrix mass;       // dim P_{k+1}(f) square
};

FaceProjections build_face_projections(const PolyMesh& mesh, int face, int k);

/// The face's vector DoF list: 3 per loop vertex, 3(k-1) per loop edge (nodes
/// in global edge direction), then the (normal, tau1, tau2) moments.
int face_vector_dof_count(const PolyMesh& mesh, int face, int k);
/// Maps the face's vector DoF list to the scalar face DoFs of component c.
Matrix face_component_selector(const PolyMesh& mesh, int face, int k, int c);
/// Positions of the face's vector DoF list in the global numbering.
std::vector<int> face_dofs_global(const PolyMesh& mesh, const DofMapV& map, int face);
/// Positions of the face's vector DoF list in the local layout of `cell`.
std::vector<int> face_dofs_local(const PolyMesh& mesh, int cell, int local_face, int k);

/// Element projections of one cell. Every operator is a matrix acting on the
/// local DoF vector; polynomial results are coefficients in the cell's scaled
/// monomials m_a((x - x_P)/h_P). Vector coefficients are component-major
/// (entry c*dim + a), tensor coefficients use entry (3i+j)*dim + a.
struct LocalProjections {
  int k = 2;
  int cell = 0;
  LocalLayout layout;
  double volume = 0., diameter = 0.;
  Vec3 center = Vec3::Zero();
  int integral_degree = 0;
  Vector mono_integrals; // int_P m_a, |a| <= integral_degree
  Matrix mass;           // scalar mass on P_k; leading blocks are the lower-degree masses
  Matrix dof_matrix;     // ndof x 3 dim P_k: DoFs of the vector monomials
  Matrix pi_d;           // 3 dim P_k x ndof
  Matrix moments;        // 3 dim P_k x ndof: int_P v . m_a e_c
  Matrix pi0;            // 3 dim P_k x ndof
  Matrix pi0_grad;       // 9 dim P_{k-1} x ndof
  Matrix pi_nabla;       // 3 dim P_k x ndof
  Matrix div_moments;    // dim P_{k-1} x ndof: int_P div(v) m_a
  Matrix div_coeffs;     // dim P_{k-1} x ndof

  int ndof() const { return layout.size; }
  /// int_P m_a m_b.
  double integral2(int a, int b) const;
  /// DoF-space projector D (D^T D)^{-1} D^T.
  Matrix dof_projector() const { return dof_matrix * pi_d; }
};

LocalProjections build_local_projections(const PolyMesh& mesh, int cell, int k,
                                         const std::vector<FaceProjections>& faces);

/// All face and cell projections of a mesh. The mesh must outlive the space.
class VemSpace {
 public:
  VemSpace(const PolyMesh& mesh, int k);
  const PolyMesh& mesh() const { return *m_mesh; }
  int k() const { return m_k; }
  const DofMapV& vmap() const { return m_vmap; }
  const DofMapQ& qmap() const { return m_qmap; }
  const FaceProjections& face(int f) const { return m_faces[f]; }
  const std::vector<FaceProjections>& faces() const { return m_faces; }
  const LocalProjections& cell(int c) const { return m_cells[c]; }
  const std::vector<int>& l2g(int c) const { return m_l2g[c]; }

 private:
  const PolyMesh* m_mesh;
  int m_k;
  DofMapV m_vmap;
  DofMapQ m_qmap;
  std::vector<FaceProjections> m_faces;
  std::vector<LocalProjections> m_cells;
  std::vector<std::vector<int>> m_l2g;
};

/// Evaluates at x a vector polynomial given by component-major coefficients;
/// `basis` must have at least coeffs.size()/3 monomials.
Vec3 eval_vector_poly(const Vector& coeffs, const MonomialBasis3& basis, const Vec3& x);

} // namespace dfvem
