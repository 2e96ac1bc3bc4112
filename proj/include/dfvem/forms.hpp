#pragma once

#include <functional>
#include <vector>

#include "dfvem/projectors.hpp"

namespace dfvem {

using ScalarFunction = std::function<double(const Vec3&)>;
using VectorFunction = std::function<Vec3(const Vec3&)>;

enum class Stabilization {
  DRecipe, // sigma_i = max(h_P, K_ii) with K the consistency matrix
  Unit,    // sigma_i = 1
};

/// Data of a Stokes or Navier-Stokes problem in weak form:
///   nu a(u,v) [+ c(u;u,v)] + (p, div v) = (f, v) + <g_N, v> on Neumann faces,
///   (div u, q) = 0,  u = g on Dirichlet faces,
/// with a(u,v) = int eps(u):eps(v) and c(w;u,v) = int ((grad u) w) . v.
struct ProblemSpec {
  double nu = 1.;
  VectorFunction f;
  /// Dirichlet data g.
  VectorFunction dirichlet;
  /// Traction on Neumann faces, given the point and the outward unit normal.
  std::function<Vec3(const Vec3&, const Vec3&)> traction;
  /// Selects Neumann boundary faces from their centroid and outward normal.
  /// Empty: the whole boundary is Dirichlet.
  std::function<bool(const Vec3&, const Vec3&)> is_neumann;
  Stabilization stabilization = Stabilization::DRecipe;
  /// Exactness of the quadrature applied to f, g and g_N.
  int data_exactness = -1; // -1: 2k+2
};

/// Consistency part int Pi0 eps(u) : Pi0 eps(v) on one cell.
Matrix local_consistency(const LocalProjections& P);
/// nu * (consistency + stabilization) on one cell.
Matrix local_a(const LocalProjections& P, double nu, Stabilization stab = Stabilization::DRecipe);
/// Rows int_P div(v) m_q for the pressure monomials.
Matrix local_b(const LocalProjections& P);
/// Right-hand side int_P Pi0_k f . v for each local basis function.
Vector local_load(const PolyMesh& mesh, const LocalProjections& P, const VectorFunction& f, int exactness);

/// int_P m_a m_b m_c for |a| <= k-1 and |b|, |c| <= k; entry (a*n + b)*n + c with n = dim P_k.
Vector triple_integrals(const LocalProjections& P);
/// Matrix of v, u -> c_h(w; u, v) for fixed local DoFs w (rows v, columns u).
Matrix local_c(const LocalProjections& P, const Vector& triple, const Vector& w);
/// Matrix of v, w -> c_h(w; u, v) for fixed local DoFs u (rows v, columns w).
Matrix local_c_advecting(const LocalProjections& P, const Vector& triple, const Vector& u);

/// Assembled problem on the full velocity and pressure DoF sets.
struct GlobalSystem {
  int n_velocity = 0, n_pressure = 0;
  SparseMatrix A;     // viscous part, n_velocity square
  SparseMatrix B;     // n_pressure x n_velocity, int div(v) q
  Vector load;        // (f, v) + <g_N, v>
  Vector mean;        // int_P m_q, pressure DoF weights for the zero-mean constraint
  std::vector<bool> fixed;
  Vector fixed_values; // Dirichlet values on fixed DoFs, 0 elsewhere
  bool zero_mean = false;
  std::vector<bool> neumann_face;
};

/// Raised when the data are inconsistent with the discrete problem.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GlobalSystem assemble_system(const VemSpace& space, const ProblemSpec& spec);

/// Global matrix of c_h(w; ., .) for a full velocity DoF vector w; with
/// `advecting` the matrix of c_h(.; w, .) instead.
SparseMatrix assemble_convection(const VemSpace& space, const Vector& w, bool advecting = false);

/// Saddle-point system on the free unknowns [u_free, p, (lambda)].
struct SaddlePoint {
  SparseMatrix K;
  Vector rhs;
  std::vector<int> free_dofs; // full velocity index of each free unknown
  int n_free = 0, n_pressure = 0;
  bool multiplier = false;
};

/// Eliminates the fixed DoFs. `velocity_block` and `velocity_rhs` are on the
/// full velocity DoF set; the fixed values of `sys` are lifted to the rhs.
SaddlePoint build_saddle_point(const GlobalSystem& sys, const SparseMatrix& velocity_block, const Vector& velocity_rhs);

/// Writes a sparse matrix as "row col value" lines with a "rows cols nnz" header.
void write_coo(const SparseMatrix& M, const std::string& path);

} // namespace dfvem
