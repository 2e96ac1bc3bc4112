#include <cmath>
#include <fstream>
#include <iomanip>

#include "dfvem/forms.hpp"

namespace dfvem {

namespace {

int exactness_or_default(int requested, int k) { return requested >= 0 ? requested : 2 * k + 2; }

void scatter(std::vector<Triplet>& trip, const Matrix& M, const std::vector<int>& rows, const std::vector<int>& cols) {
  for (int j = 0; j < M.cols(); ++j)
    for (int i = 0; i < M.rows(); ++i)
      if (M(i, j) != 0.) trip.emplace_back(rows[i], cols[j], M(i, j));
}

} // namespace

//------------------------------------------------------------------------------
// Local forms
//------------------------------------------------------------------------------

Matrix local_consistency(const LocalProjections& P) {
  const int nk1 = dim_poly(P.k - 1, 3);
  const Matrix M1 = P.mass.topLeftCorner(nk1, nk1);
  Matrix K = Matrix::Zero(P.ndof(), P.ndof());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Matrix E = 0.5 * (P.pi0_grad.middleRows((3 * i + j) * nk1, nk1) + P.pi0_grad.middleRows((3 * j + i) * nk1, nk1));
      K.noalias() += E.transpose() * M1 * E;
    }
  return 0.5 * (K + K.transpose());
}

Matrix local_a(const LocalProjections& P, double nu, Stabilization stab) {
  const Matrix K = local_consistency(P);
  const Matrix S = Matrix::Identity(P.ndof(), P.ndof()) - P.dof_projector();
  Vector sigma(P.ndof());
  for (int i = 0; i < P.ndof(); ++i) sigma[i] = stab == Stabilization::Unit ? 1. : std::max(P.diameter, K(i, i));
  Matrix A = K + S.transpose() * sigma.asDiagonal() * S;
  return nu * 0.5 * (A + A.transpose());
}

Matrix local_b(const LocalProjections& P) { return P.div_moments; }

Vector local_load(const PolyMesh& mesh, const LocalProjections& P, const VectorFunction& f, int exactness) {
  const int nk = dim_poly(P.k, 3);
  const MonomialBasis3 basis(P.k, P.center, P.diameter);
  const QuadRule q = cell_quadrature(mesh, P.cell, exactness_or_default(exactness, P.k));
  Vector fm = Vector::Zero(3 * nk);
  for (size_t p = 0; p < q.size(); ++p) {
    const Vec3 fx = f(q.points[p]);
    const Vector m = q.weights[p] * basis.evaluate(q.points[p]);
    for (int c = 0; c < 3; ++c) fm.segment(c * nk, nk) += fx[c] * m;
  }
  const Eigen::LDLT<Matrix> mass(P.mass);
  Vector coef(3 * nk);
  for (int c = 0; c < 3; ++c) coef.segment(c * nk, nk) = mass.solve(fm.segment(c * nk, nk));
  return P.moments.transpose() * coef;
}

Vector triple_integrals(const LocalProjections& P) {
  const int nk = dim_poly(P.k, 3), nk1 = dim_poly(P.k - 1, 3);
  const auto ex = exponents3(P.k);
  Vector T(nk1 * nk * nk);
  for (int a = 0; a < nk1; ++a)
    for (int b = 0; b < nk; ++b)
      for (int c = 0; c < nk; ++c) {
        const auto &ea = ex[a], &eb = ex[b], &ec = ex[c];
        T[(a * nk + b) * nk + c] =
            P.mono_integrals[monomial_index3(ea[0] + eb[0] + ec[0], ea[1] + eb[1] + ec[1], ea[2] + eb[2] + ec[2])];
      }
  return T;
}

Matrix local_c(const LocalProjections& P, const Vector& T, const Vector& w) {
  const int nk = dim_poly(P.k, 3), nk1 = dim_poly(P.k - 1, 3);
  const Vector W = P.pi0 * w;
  Matrix C = Matrix::Zero(P.ndof(), P.ndof());
  for (int j = 0; j < 3; ++j) {
    Matrix Tw = Matrix::Zero(nk, nk1); // (c, a) -> sum_b W_j[b] T[a,b,c]
    for (int a = 0; a < nk1; ++a)
      for (int b = 0; b < nk; ++b) {
        const double wb = W[j * nk + b];
        if (wb == 0.) continue;
        Tw.col(a) += wb * T.segment((a * nk + b) * nk, nk);
      }
    for (int i = 0; i < 3; ++i)
      C.noalias() += P.pi0.middleRows(i * nk, nk).transpose() * (Tw * P.pi0_grad.middleRows((3 * i + j) * nk1, nk1));
  }
  return C;
}

Matrix local_c_advecting(const LocalProjections& P, const Vector& T, const Vector& u) {
  const int nk = dim_poly(P.k, 3), nk1 = dim_poly(P.k - 1, 3);
  const Vector G = P.pi0_grad * u;
  Matrix C = Matrix::Zero(P.ndof(), P.ndof());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Matrix Tu = Matrix::Zero(nk, nk); // (c, b) -> sum_a g_ij[a] T[a,b,c]
      for (int a = 0; a < nk1; ++a) {
        const double g = G[(3 * i + j) * nk1 + a];
        if (g == 0.) continue;
        for (int b = 0; b < nk; ++b) Tu.col(b) += g * T.segment((a * nk + b) * nk, nk);
      }
      C.noalias() += P.pi0.middleRows(i * nk, nk).transpose() * (Tu * P.pi0.middleRows(j * nk, nk));
    }
  return C;
}

//------------------------------------------------------------------------------
// Global assembly
//------------------------------------------------------------------------------

GlobalSystem assemble_system(const VemSpace& space, const ProblemSpec& spec) {
  const PolyMesh& mesh = space.mesh();
  const DofMapV& vmap = space.vmap();
  const DofMapQ& qmap = space.qmap();
  const int k = space.k();
  const int exq = exactness_or_default(spec.data_exactness, k);

  GlobalSystem sys;
  sys.n_velocity = vmap.size();
  sys.n_pressure = qmap.size();
  sys.load = Vector::Zero(sys.n_velocity);
  sys.mean = Vector::Zero(sys.n_pressure);

  std::vector<Triplet> ta, tb;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalProjections& P = space.cell(c);
    const auto& l2g = space.l2g(c);
    std::vector<int> qdofs(qmap.per_cell());
    for (int q = 0; q < qmap.per_cell(); ++q) {
      qdofs[q] = qmap.dof(c, q);
      sys.mean[qdofs[q]] = P.mono_integrals[q];
    }
    scatter(ta, local_a(P, spec.nu, spec.stabilization), l2g, l2g);
    scatter(tb, local_b(P), qdofs, l2g);
    if (spec.f) {
      const Vector lf = local_load(mesh, P, spec.f, exq);
      for (size_t i = 0; i < l2g.size(); ++i) sys.load[l2g[i]] += lf[i];
    }
  }
  sys.A.resize(sys.n_velocity, sys.n_velocity);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.B.resize(sys.n_pressure, sys.n_velocity);
  sys.B.setFromTriplets(tb.begin(), tb.end());

  // Boundary classification; boundary face normals point outward.
  sys.neumann_face.assign(mesh.n_faces(), false);
  bool any_neumann = false;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (!mesh.is_boundary_face(f) || !spec.is_neumann) continue;
    const auto& fg = mesh.face_geometry(f);
    if (spec.is_neumann(fg.centroid, fg.normal)) sys.neumann_face[f] = any_neumann = true;
  }
  sys.zero_mean = !any_neumann;

  // Dirichlet DoFs and values.
  sys.fixed.assign(sys.n_velocity, false);
  sys.fixed_values = Vector::Zero(sys.n_velocity);
  const auto nodes = edge_nodes(k);
  const int nfm = vmap.n_face_moments();
  auto g = [&](const Vec3& x) { return spec.dirichlet ? spec.dirichlet(x) : Vec3::Zero(); };
  std::vector<bool> vdone(mesh.n_vertices(), false), edone(mesh.n_edges(), false);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (!mesh.is_boundary_face(f) || sys.neumann_face[f]) continue;
    const Face& face = mesh.face(f);
    for (int v : face.vertices) {
      if (vdone[v]) continue;
      vdone[v] = true;
      const Vec3 val = g(mesh.vertex(v));
      for (int d = 0; d < 3; ++d) {
        sys.fixed[vmap.vertex_dof(v, d)] = true;
        sys.fixed_values[vmap.vertex_dof(v, d)] = val[d];
      }
    }
    for (int e : face.edges) {
      if (edone[e]) continue;
      edone[e] = true;
      const Vec3& a = mesh.vertex(mesh.edge(e).vertices[0]);
      const Vec3& b = mesh.vertex(mesh.edge(e).vertices[1]);
      for (int j = 0; j < k - 1; ++j) {
        const Vec3 val = g(a + nodes[j] * (b - a));
        for (int d = 0; d < 3; ++d) {
          sys.fixed[vmap.edge_dof(e, j, d)] = true;
          sys.fixed_values[vmap.edge_dof(e, j, d)] = val[d];
        }
      }
    }
    const auto& fg = mesh.face_geometry(f);
    const MonomialBasis2 basis = MonomialBasis2::on_face(mesh, f, k - 2);
    const QuadRule q = face_quadrature(mesh, f, exq);
    Matrix mom = Matrix::Zero(nfm, 3);
    for (size_t p = 0; p < q.size(); ++p) {
      const Vec3 val = g(q.points[p]);
      const Vector m = basis.evaluate(q.points[p]) * (q.weights[p] / fg.area);
      mom.col(0) += val.dot(fg.normal) * m;
      mom.col(1) += val.dot(fg.tau1) * m;
      mom.col(2) += val.dot(fg.tau2) * m;
    }
    for (int a = 0; a < nfm; ++a)
      for (int d = 0; d < 3; ++d) {
        sys.fixed[vmap.face_dof(f, a, d)] = true;
        sys.fixed_values[vmap.face_dof(f, a, d)] = mom(a, d);
      }
  }

  // Neumann loads <g_N, Pi0_f v>.
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (!sys.neumann_face[f] || !spec.traction) continue;
    const auto& fg = mesh.face_geometry(f);
    const FaceProjections& FP = space.face(f);
    const MonomialBasis2 basis = MonomialBasis2::on_face(mesh, f, k + 1);
    const QuadRule q = face_quadrature(mesh, f, exq);
    Matrix gm = Matrix::Zero(basis.size(), 3);
    for (size_t p = 0; p < q.size(); ++p) {
      const Vec3 t = spec.traction(q.points[p], fg.normal);
      const Vector m = q.weights[p] * basis.evaluate(q.points[p]);
      for (int c = 0; c < 3; ++c) gm.col(c) += t[c] * m;
    }
    Vector contrib = Vector::Zero(face_vector_dof_count(mesh, f, k));
    for (int c = 0; c < 3; ++c)
      contrib += (gm.col(c).transpose() * FP.pi0 * face_component_selector(mesh, f, k, c)).transpose();
    const auto gd = face_dofs_global(mesh, vmap, f);
    for (size_t i = 0; i < gd.size(); ++i) sys.load[gd[i]] += contrib[i];
  }

  // With Dirichlet data on the whole boundary the net flux must vanish.
  if (sys.zero_mean) {
    double flux = 0., scale = 0., gmax = 0.;
    for (int f = 0; f < mesh.n_faces(); ++f) {
      if (!mesh.is_boundary_face(f)) continue;
      const double area = mesh.face_geometry(f).area;
      flux += area * sys.fixed_values[vmap.face_dof(f, 0, 0)];
      scale += area;
    }
    for (int i = 0; i < sys.n_velocity; ++i)
      if (sys.fixed[i]) gmax = std::max(gmax, std::abs(sys.fixed_values[i]));
    if (std::abs(flux) > 1e-10 * scale * gmax)
      throw DataError("Dirichlet data on the whole boundary have nonzero net flux");
  }
  return sys;
}

SparseMatrix assemble_convection(const VemSpace& space, const Vector& w, bool advecting) {
  std::vector<Triplet> trip;
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    const LocalProjections& P = space.cell(c);
    const auto& l2g = space.l2g(c);
    Vector wl(l2g.size());
    for (size_t i = 0; i < l2g.size(); ++i) wl[i] = w[l2g[i]];
    const Vector T = triple_integrals(P);
    scatter(trip, advecting ? local_c_advecting(P, T, wl) : local_c(P, T, wl), l2g, l2g);
  }
  SparseMatrix C(space.vmap().size(), space.vmap().size());
  C.setFromTriplets(trip.begin(), trip.end());
  return C;
}

SaddlePoint build_saddle_point(const GlobalSystem& sys, const SparseMatrix& V, const Vector& vrhs) {
  SaddlePoint S;
  std::vector<int> free_index(sys.n_velocity, -1);
  for (int i = 0; i < sys.n_velocity; ++i)
    if (!sys.fixed[i]) {
      free_index[i] = static_cast<int>(S.free_dofs.size());
      S.free_dofs.push_back(i);
    }
  S.n_free = static_cast<int>(S.free_dofs.size());
  S.n_pressure = sys.n_pressure;
  S.multiplier = sys.zero_mean;
  const int n = S.n_free + S.n_pressure + (S.multiplier ? 1 : 0);
  S.rhs = Vector::Zero(n);
  for (int i = 0; i < S.n_free; ++i) S.rhs[i] = vrhs[S.free_dofs[i]];

  std::vector<Triplet> trip;
  trip.reserve(V.nonZeros() + 2 * sys.B.nonZeros() + 2 * sys.n_pressure);
  for (int col = 0; col < V.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(V, col); it; ++it) {
      const int r = free_index[it.row()];
      if (r < 0) continue;
      const int c = free_index[it.col()];
      if (c >= 0) trip.emplace_back(r, c, it.value());
      else S.rhs[r] -= it.value() * sys.fixed_values[it.col()];
    }
  for (int col = 0; col < sys.B.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(sys.B, col); it; ++it) {
      const int q = S.n_free + static_cast<int>(it.row());
      const int c = free_index[it.col()];
      if (c >= 0) {
        trip.emplace_back(q, c, it.value());
        trip.emplace_back(c, q, it.value());
      } else {
        S.rhs[q] -= it.value() * sys.fixed_values[it.col()];
      }
    }
  if (S.multiplier) {
    const int m = n - 1;
    for (int q = 0; q < sys.n_pressure; ++q)
      if (sys.mean[q] != 0.) {
        trip.emplace_back(S.n_free + q, m, sys.mean[q]);
        trip.emplace_back(m, S.n_free + q, sys.mean[q]);
      }
  }
  S.K.resize(n, n);
  S.K.setFromTriplets(trip.begin(), trip.end());
  return S;
}

void write_coo(const SparseMatrix& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << M.rows() << ' ' << M.cols() << ' ' << M.nonZeros() << '\n' << std::setprecision(17);
  for (int col = 0; col < M.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(M, col); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace dfvem
