#pragma once

#include <array>
#include <span>
#include <vector>

#include "dfvem/mesh.hpp"
#include "dfvem/types.hpp"

namespace dfvem {

//------------------------------------------------------------------------------
// Scaled monomials
//------------------------------------------------------------------------------

/// Dimension of P_n in d variables; 0 for n < 0.
int dim_poly(int n, int d);

/// Largest monomial degree supported by the exponent tables.
inline constexpr int max_monomial_degree = 24;

/// Exponents of the monomials of degree <= n in graded lexicographic order.
/// The ordering is nested: the degree-m set is a prefix of the degree-n set.
std::span<const std::array<int, 3>> exponents3(int n);
std::span<const std::array<int, 2>> exponents2(int n);

/// Position of a monomial in the graded ordering.
inline int monomial_index3(int a, int b, int c) {
  const int d = a + b + c;
  return (d * (d + 1) * (d + 2)) / 6 + ((d - a) * (d - a + 1)) / 2 + (d - a - b);
}
inline int monomial_index2(int a, int b) {
  const int d = a + b;
  return (d * (d + 1)) / 2 + (d - a);
}

/// m_alpha((x - center) / scale) for |alpha| <= degree.
class MonomialBasis3 {
 public:
  MonomialBasis3(int degree, const Vec3& center, double scale);
  int degree() const { return m_degree; }
  int size() const { return m_size; }
  const Vec3& center() const { return m_center; }
  double scale() const { return m_scale; }
  Vec3 scaled(const Vec3& x) const { return (x - m_center) / m_scale; }
  Vector evaluate(const Vec3& x) const;
  /// Physical gradients, one row per monomial.
  Matrix gradient(const Vec3& x) const;

 private:
  int m_degree, m_size;
  Vec3 m_center;
  double m_scale;
};

/// Face monomials m_a(((x-c).tau1, (x-c).tau2) / scale).
class MonomialBasis2 {
 public:
  MonomialBasis2(int degree, const Vec3& center, const Vec3& tau1, const Vec3& tau2, double scale);
  static MonomialBasis2 on_face(const PolyMesh& mesh, int face, int degree);
  int degree() const { return m_degree; }
  int size() const { return m_size; }
  double scale() const { return m_scale; }
  Eigen::Vector2d local(const Vec3& x) const;
  Vector evaluate(const Vec3& x) const;
  /// Physical in-plane gradients as (d/dtau1, d/dtau2), one row per monomial.
  Matrix gradient(const Vec3& x) const;

 private:
  int m_degree, m_size;
  Vec3 m_center, m_tau1, m_tau2;
  double m_scale;
};

/// Vector polynomials are coefficient vectors of length 3*dim_poly(n,3),
/// component-major: entry c*dim_poly(n,3) + i multiplies m_i e_c.
using VectorPoly = Vector;

/// Basis of x~ ^ [P_{n-1}]^3 in scaled coordinates, homogeneous by degree,
/// listed by increasing degree. Size 3*dim(n-1) - dim(n-2).
std::vector<VectorPoly> cross_basis(int n);

/// Coefficients (length 3*dim_poly(n,3)) of grad_{x~} m_beta.
VectorPoly scaled_gradient(int beta, int n);

//------------------------------------------------------------------------------
// Quadrature
//------------------------------------------------------------------------------

struct QuadRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
  int exactness = 0;
  size_t size() const { return points.size(); }
  double measure() const;
};

/// Rule on [0,1].
struct Rule1D {
  std::vector<double> x, w;
};
Rule1D gauss_legendre(int npoints);
Rule1D gauss_lobatto(int npoints);

/// Symmetric rule on the reference simplex of dimension `dim` in barycentric
/// coordinates (dim+1 entries per point); weights sum to 1.
struct SimplexRule {
  std::vector<std::vector<double>> bary;
  std::vector<double> w;
};
const SimplexRule& simplex_rule(int dim, int exactness);

/// Rules exact for polynomials of degree <= exactness on the cell, face or edge.
/// Cells are split into tetrahedra {barycenter, face centroid, edge}; faces
/// into triangles {centroid, edge}. Tetrahedra and triangles are used as is.
QuadRule cell_quadrature(const PolyMesh& mesh, int cell, int exactness);
QuadRule face_quadrature(const PolyMesh& mesh, int face, int exactness);
QuadRule edge_quadrature(const PolyMesh& mesh, int edge, int exactness);

} // namespace dfvem
