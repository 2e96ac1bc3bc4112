#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <json.hpp>

#include "dfvem/complex.hpp"

namespace dfvem {

ExactnessCheck check_exactness_dims(const PolyMesh& mesh, int k) {
  ExactnessCheck c;
  c.dims = complex_dims(mesh, k);
  c.applicable = c.dims.euler == 1;
  c.pass = c.applicable && c.dims.alternating_sum() == 0;
  return c;
}

RankInfo matrix_rank(const Matrix& M, double rel_tol) {
  RankInfo r;
  if (M.size() == 0) return r;
  const Eigen::BDCSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  r.sigma_max = s.size() ? s[0] : 0.;
  r.threshold = rel_tol * r.sigma_max;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] > r.threshold) ++r.rank;
    if (s[i] > 0.1 * r.threshold && s[i] < 10. * r.threshold) r.inconclusive = true;
  }
  return r;
}

SparseMatrix divergence_matrix(const VemSpace& space) {
  const PolyMesh& mesh = space.mesh();
  const DofMapQ& Q = space.qmap();
  std::vector<Triplet> trip;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Matrix Bl = local_b(space.cell(c));
    const std::vector<int>& l2g = space.l2g(c);
    for (int q = 0; q < Bl.rows(); ++q)
      for (int i = 0; i < Bl.cols(); ++i)
        if (Bl(q, i) != 0.) trip.emplace_back(Q.dof(c, q), l2g[i], Bl(q, i));
  }
  SparseMatrix B(Q.size(), space.vmap().size());
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

SurjectivityCheck check_div_surjectivity(const VemSpace& space, int max_dofs) {
  SurjectivityCheck c;
  c.dim_v = space.vmap().size();
  c.dim_q = space.qmap().size();
  c.expected_kernel = complex_dims(space.mesh(), space.k()).dim_z;
  if (c.dim_v > max_dofs) {
    c.skipped = true;
    return c;
  }
  c.rank = matrix_rank(Matrix(divergence_matrix(space)));
  c.kernel_dim = c.dim_v - c.rank.rank;
  c.pass = !c.rank.inconclusive && c.rank.rank == c.dim_q && c.kernel_dim == c.expected_kernel;
  return c;
}

DivFreeCheck check_divfree(const VemSpace& space, const Vector& u, double tol) {
  DivFreeCheck c;
  c.value = divergence_measure(space, u);
  c.pass = c.value <= tol;
  return c;
}

double infsup_constant(const VemSpace& space, Stabilization stab) {
  const PolyMesh& mesh = space.mesh();
  const DofMapV& V = space.vmap();
  const DofMapQ& Q = space.qmap();
  std::vector<int> free_index(V.size(), -1);
  int nf = 0;
  for (int i = 0; i < V.size(); ++i)
    if (!V.boundary_mask()[i]) free_index[i] = nf++;

  Matrix A = Matrix::Zero(nf, nf), B = Matrix::Zero(Q.size(), nf), M = Matrix::Zero(Q.size(), Q.size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalProjections& P = space.cell(c);
    const Matrix Al = local_a(P, 1., stab);
    const Matrix Bl = local_b(P);
    const std::vector<int>& l2g = space.l2g(c);
    for (size_t i = 0; i < l2g.size(); ++i) {
      const int gi = free_index[l2g[i]];
      if (gi < 0) continue;
      for (size_t j = 0; j < l2g.size(); ++j) {
        const int gj = free_index[l2g[j]];
        if (gj >= 0) A(gi, gj) += Al(i, j);
      }
      for (int q = 0; q < Bl.rows(); ++q) B(Q.dof(c, q), gi) += Bl(q, i);
    }
    const int nq = Q.per_cell();
    M.block(Q.dof(c, 0), Q.dof(c, 0), nq, nq) = P.mass.topLeftCorner(nq, nq);
  }
  const Matrix S = B * A.ldlt().solve(B.transpose());
  const Matrix Ss = 0.5 * (S + S.transpose());
  const Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(Ss, M);
  const Vector& lam = es.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  for (int i = 0; i < lam.size(); ++i)
    if (lam[i] > 1e-10 * top) return std::sqrt(lam[i]);
  return 0.;
}

std::string complex_report_json(const ExactnessCheck& ex, const SurjectivityCheck* surj, const DivFreeCheck* divfree) {
  nlohmann::json j;
  const ComplexDims& d = ex.dims;
  j["dims"] = {{"W", d.dim_w}, {"Sigma", d.dim_sigma}, {"V", d.dim_v}, {"Q", d.dim_q}, {"Z", d.dim_z}};
  j["euler"] = d.euler;
  j["alternating_sum"] = d.alternating_sum();
  j["exactness"] = ex.applicable ? (ex.pass ? "pass" : "fail") : "not applicable";
  if (surj) {
    if (surj->skipped) {
      j["surjectivity"] = "skipped";
    } else {
      j["surjectivity"] = {{"rank", surj->rank.rank}, {"dim_q", surj->dim_q}, {"kernel", surj->kernel_dim},
                           {"expected_kernel", surj->expected_kernel}, {"inconclusive", surj->rank.inconclusive},
                           {"pass", surj->pass}};
    }
  }
  if (divfree) j["divfree"] = {{"value", divfree->value}, {"pass", divfree->pass}};
  return j.dump(2);
}

} // namespace dfvem
