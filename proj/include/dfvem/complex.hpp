#pragma once

#include <string>

#include "dfvem/bench.hpp"

namespace dfvem {

/// Dimension count of the discrete complex. The alternating sum must vanish on
/// meshes with trivial topology (Euler characteristic 1); otherwise the check
/// is reported as not applicable.
struct ExactnessCheck {
  ComplexDims dims;
  bool applicable = false;
  bool pass = false;
};
ExactnessCheck check_exactness_dims(const PolyMesh& mesh, int k);

/// Numerical rank from singular values: count of sigma_i > rel_tol * sigma_max.
/// `inconclusive` when some sigma_i lies within a factor 10 of the threshold.
struct RankInfo {
  long rank = 0;
  double sigma_max = 0., threshold = 0.;
  bool inconclusive = false;
};
RankInfo matrix_rank(const Matrix& M, double rel_tol = 1e-9);

/// Rank of the unconstrained divergence matrix V_h -> Q_h: expected dim Q,
/// kernel dimension dim V - dim Q.
struct SurjectivityCheck {
  bool skipped = false; // more than `max_dofs` velocity DoFs
  long dim_v = 0, dim_q = 0, expected_kernel = 0;
  RankInfo rank;
  long kernel_dim = 0;
  bool pass = false;
};
SparseMatrix divergence_matrix(const VemSpace& space);
SurjectivityCheck check_div_surjectivity(const VemSpace& space, int max_dofs = 3000);

/// Divergence residual of a velocity DoF vector (see divergence_measure).
struct DivFreeCheck {
  double value = 0.;
  bool pass = false; // value <= tol
};
DivFreeCheck check_divfree(const VemSpace& space, const Vector& u, double tol = 1e-9);

/// Discrete inf-sup constant with homogeneous Dirichlet conditions on the whole
/// boundary: sqrt of the smallest nonzero eigenvalue of B A^{-1} B^T against
/// the pressure mass matrix (dense; small meshes only).
double infsup_constant(const VemSpace& space, Stabilization stab = Stabilization::DRecipe);

std::string complex_report_json(const ExactnessCheck& ex, const SurjectivityCheck* surj, const DivFreeCheck* divfree);

} // namespace dfvem
