#include <algorithm>
#include <map>
#include <mutex>

#include "dfvem/projectors.hpp"

namespace dfvem {

namespace {

int idx3(const std::array<int, 3>& e) { return monomial_index3(e[0], e[1], e[2]); }

std::array<int, 3> add(const std::array<int, 3>& a, const std::array<int, 3>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

// Least-squares projector (D^T D)^{-1} D^T, evaluated through QR, with a rank check.
Matrix least_squares_projector(const Matrix& D, const char* what) {
  Eigen::ColPivHouseholderQR<Matrix> qr(D);
  qr.setThreshold(1e-11);
  if (qr.rank() < D.cols()) throw ProjectorError(std::string("DoF set does not separate ") + what);
  return qr.solve(Matrix::Identity(D.rows(), D.rows()));
}

// Columns: grad~ m_beta for 1 <= |beta| <= k+1, then the cross basis of degree <= k.
const Matrix& decomposition_basis(int k) {
  static std::map<int, Matrix> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  const int n = 3 * dim_poly(k, 3);
  Matrix B(n, n);
  int col = 0;
  for (int beta = 1; beta < dim_poly(k + 1, 3); ++beta) B.col(col++) = scaled_gradient(beta, k);
  for (const auto& x : cross_basis(k)) B.col(col++) = x;
  if (col != n) throw ProjectorError("decomposition basis has wrong size");
  return cache.emplace(k, B).first->second;
}

// Solver for symmetric positive definite monomial Gram matrices, with diagonal
// equilibration (scaled monomials of high degree have small norms).
class ScaledSpdSolver {
 public:
  explicit ScaledSpdSolver(const Matrix& M) : m_scale(M.diagonal().cwiseSqrt().cwiseInverse()) {
    m_ldlt.compute(m_scale.asDiagonal() * M * m_scale.asDiagonal());
  }
  Matrix solve(const Matrix& rhs) const { return m_scale.asDiagonal() * m_ldlt.solve(m_scale.asDiagonal() * rhs); }

 private:
  Vector m_scale;
  Eigen::LDLT<Matrix> m_ldlt;
};

} // namespace

Vec3 eval_vector_poly(const Vector& coeffs, const MonomialBasis3& basis, const Vec3& x) {
  const int n = static_cast<int>(coeffs.size()) / 3;
  const Vector m = basis.evaluate(x).head(n);
  return Vec3(coeffs.segment(0, n).dot(m), coeffs.segment(n, n).dot(m), coeffs.segment(2 * n, n).dot(m));
}

//------------------------------------------------------------------------------
// Face DoF bookkeeping
//------------------------------------------------------------------------------

int face_vector_dof_count(const PolyMesh& mesh, int f, int k) {
  const int nv = static_cast<int>(mesh.face(f).vertices.size());
  return 3 * nv + 3 * (k - 1) * nv + 3 * dim_poly(k - 2, 2);
}

Matrix face_component_selector(const PolyMesh& mesh, int f, int k, int c) {
  const Face& face = mesh.face(f);
  const auto& fg = mesh.face_geometry(f);
  const int nv = static_cast<int>(face.vertices.size());
  const int nfm = dim_poly(k - 2, 2);
  const int nscalar = nv + (k - 1) * nv + nfm;
  Matrix S = Matrix::Zero(nscalar, face_vector_dof_count(mesh, f, k));
  for (int i = 0; i < nv; ++i) S(i, 3 * i + c) = 1.;
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < k - 1; ++j) {
      const int jg = face.edge_orient[i] > 0 ? j : k - 2 - j;
      S(nv + (k - 1) * i + j, 3 * nv + 3 * ((k - 1) * i + jg) + c) = 1.;
    }
  const std::array<const Vec3*, 3> dirs{&fg.normal, &fg.tau1, &fg.tau2};
  for (int a = 0; a < nfm; ++a)
    for (int comp = 0; comp < 3; ++comp)
      S(nv + (k - 1) * nv + a, 3 * nv + 3 * (k - 1) * nv + 3 * a + comp) = (*dirs[comp])[c];
  return S;
}

std::vector<int> face_dofs_global(const PolyMesh& mesh, const DofMapV& map, int f) {
  const Face& face = mesh.face(f);
  const int k = map.k();
  std::vector<int> g;
  for (int v : face.vertices)
    for (int d = 0; d < 3; ++d) g.push_back(map.vertex_dof(v, d));
  for (int e : face.edges)
    for (int j = 0; j < k - 1; ++j)
      for (int d = 0; d < 3; ++d) g.push_back(map.edge_dof(e, j, d));
  for (int a = 0; a < map.n_face_moments(); ++a)
    for (int d = 0; d < 3; ++d) g.push_back(map.face_dof(f, a, d));
  return g;
}

std::vector<int> face_dofs_local(const PolyMesh& mesh, int cell, int lf, int k) {
  const Cell& c = mesh.cell(cell);
  const int f = c.faces[lf];
  const Face& face = mesh.face(f);
  const LocalLayout L = make_layout(mesh, cell, k);
  auto pos = [](const std::vector<int>& sorted, int id) {
    return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), id) - sorted.begin());
  };
  std::vector<int> g;
  for (int v : face.vertices)
    for (int d = 0; d < 3; ++d) g.push_back(L.vertex_dof(pos(c.vertices, v), d));
  for (int e : face.edges)
    for (int j = 0; j < k - 1; ++j)
      for (int d = 0; d < 3; ++d) g.push_back(L.edge_dof(pos(c.edges, e), j, d));
  for (int a = 0; a < L.n_face_moments; ++a)
    for (int d = 0; d < 3; ++d) g.push_back(L.face_dof(lf, a, d));
  return g;
}

//------------------------------------------------------------------------------
// Face projections
//------------------------------------------------------------------------------

FaceProjections build_face_projections(const PolyMesh& mesh, int f, int k) {
  const Face& face = mesh.face(f);
  const auto& fg = mesh.face_geometry(f);
  const int nv = static_cast<int>(face.vertices.size());
  const int nfm = dim_poly(k - 2, 2);
  const int nk = dim_poly(k, 2);
  const int nk1 = dim_poly(k + 1, 2);
  const MonomialBasis2 basis = MonomialBasis2::on_face(mesh, f, k + 1);
  const double hf = fg.diameter;

  FaceProjections P;
  P.k = k;
  P.n_dofs = nv + (k - 1) * nv + nfm;
  const int off_moment = nv + (k - 1) * nv;

  // Face mass matrix.
  const QuadRule q = face_quadrature(mesh, f, 2 * k + 2);
  P.mass = Matrix::Zero(nk1, nk1);
  Matrix stiff = Matrix::Zero(nk, nk);
  for (size_t p = 0; p < q.size(); ++p) {
    const Vector m = basis.evaluate(q.points[p]);
    P.mass.noalias() += q.weights[p] * m * m.transpose();
    const Matrix g = basis.gradient(q.points[p]).topRows(nk);
    stiff.noalias() += q.weights[p] * g * g.transpose();
  }

  // Boundary points: Gauss-Lobatto nodes of every loop edge, including the vertices.
  const Rule1D gll = gauss_lobatto(k + 1);
  struct BoundaryPoint {
    Vec3 x;
    double w;
    int dof;
    int edge;
  };
  std::vector<BoundaryPoint> bpts;
  for (int i = 0; i < nv; ++i) {
    const Vec3& a = mesh.vertex(face.vertices[i]);
    const Vec3& b = mesh.vertex(face.vertices[(i + 1) % nv]);
    const double len = (b - a).norm();
    for (int j = 0; j <= k; ++j) {
      int dof;
      if (j == 0) dof = i;
      else if (j == k) dof = (i + 1) % nv;
      else dof = nv + (k - 1) * i + (j - 1);
      bpts.push_back({a + gll.x[j] * (b - a), gll.w[j] * len, dof, i});
    }
  }

  // DoFs of the monomials of P_k(f).
  P.dof_matrix = Matrix::Zero(P.n_dofs, nk);
  for (int i = 0; i < nv; ++i) P.dof_matrix.row(i) = basis.evaluate(mesh.vertex(face.vertices[i])).head(nk).transpose();
  for (const auto& bp : bpts)
    if (bp.dof >= nv) P.dof_matrix.row(bp.dof) = basis.evaluate(bp.x).head(nk).transpose();
  for (int a = 0; a < nfm; ++a) P.dof_matrix.row(off_moment + a) = P.mass.row(a).head(nk) / fg.area;
  P.pi_d = least_squares_projector(P.dof_matrix, "P_k on a face");

  // Elliptic projection: int grad(q).grad(v) = -int lap(q) v + sum_e int_e (grad q . n_e) v.
  Matrix rhs = Matrix::Zero(nk, P.n_dofs);
  const auto ex = exponents2(k);
  for (int a = 0; a < nk; ++a) {
    const int s = ex[a][0], t = ex[a][1];
    if (s >= 2) rhs(a, off_moment + monomial_index2(s - 2, t)) -= s * (s - 1) * fg.area / (hf * hf);
    if (t >= 2) rhs(a, off_moment + monomial_index2(s, t - 2)) -= t * (t - 1) * fg.area / (hf * hf);
  }
  for (const auto& bp : bpts) {
    const Vec3 ne = mesh.edge_normal_in_face(f, bp.edge);
    const Eigen::Vector2d n2(ne.dot(fg.tau1), ne.dot(fg.tau2));
    const Matrix g = basis.gradient(bp.x).topRows(nk);
    rhs.col(bp.dof) += bp.w * (g * n2);
  }
  // Fix constants by matching the boundary integral.
  stiff.row(0).setZero();
  rhs.row(0).setZero();
  for (const auto& bp : bpts) {
    stiff.row(0) += bp.w * basis.evaluate(bp.x).head(nk).transpose();
    rhs(0, bp.dof) += bp.w;
  }
  P.pi_nabla = stiff.partialPivLu().solve(rhs);

  // L2 projection onto P_{k+1}(f): low moments from the DoFs, the rest through pi_d.
  Matrix rhs0 = Matrix::Zero(nk1, P.n_dofs);
  for (int a = 0; a < nfm; ++a) rhs0(a, off_moment + a) = fg.area;
  rhs0.bottomRows(nk1 - nfm) = P.mass.block(nfm, 0, nk1 - nfm, nk) * P.pi_d;
  P.pi0 = ScaledSpdSolver(P.mass).solve(rhs0);
  return P;
}

//------------------------------------------------------------------------------
// Element projections
//------------------------------------------------------------------------------

double LocalProjections::integral2(int a, int b) const {
  const auto ex = exponents3(max_monomial_degree);
  return mono_integrals[idx3(add(ex[a], ex[b]))];
}

LocalProjections build_local_projections(const PolyMesh& mesh, int cell, int k,
                                         const std::vector<FaceProjections>& faces) {
  const Cell& C = mesh.cell(cell);
  const auto& cg = mesh.cell_geometry(cell);
  const auto ex = exponents3(max_monomial_degree);

  LocalProjections P;
  P.k = k;
  P.cell = cell;
  P.layout = make_layout(mesh, cell, k);
  P.volume = cg.volume;
  P.diameter = cg.diameter;
  P.center = cg.barycenter;
  const LocalLayout& L = P.layout;
  const int nd = L.size;
  const double hP = cg.diameter, vol = cg.volume;
  const int nk = dim_poly(k, 3), nk1 = dim_poly(k - 1, 3), nkp = dim_poly(k + 1, 3);

  // Monomial integrals up to the degree needed by the trilinear form.
  P.integral_degree = std::max(2 * k + 2, 3 * k - 1);
  {
    const int nI = dim_poly(P.integral_degree, 3);
    const MonomialBasis3 basis(P.integral_degree, cg.barycenter, hP);
    const QuadRule q = cell_quadrature(mesh, cell, P.integral_degree);
    P.mono_integrals = Vector::Zero(nI);
    for (size_t p = 0; p < q.size(); ++p) P.mono_integrals += q.weights[p] * basis.evaluate(q.points[p]);
  }
  P.mass.resize(nk, nk);
  for (int a = 0; a < nk; ++a)
    for (int b = 0; b < nk; ++b) P.mass(a, b) = P.integral2(a, b);
  const Matrix mass1 = P.mass.topLeftCorner(nk1, nk1);

  const MonomialBasis3 basis(k + 1, cg.barycenter, hP);

  // Per-face data: projected traces and face/cell monomial products.
  // flux(beta) = sum_f s_f int_f (Pi0_f v . n_f) m_beta, beta up to degree k+1.
  // trace[i][j](gamma) = sum_f s_f n_f,j int_f (Pi0_f v_i) m_gamma, gamma up to degree k-1.
  Matrix flux = Matrix::Zero(nkp, nd);
  std::array<std::array<Matrix, 3>, 3> trace;
  for (auto& row : trace)
    for (auto& m : row) m = Matrix::Zero(nk1, nd);
  Matrix dof_matrix = Matrix::Zero(nd, 3 * nk);
  Vector boundary_mono = Vector::Zero(nk);  // int_dP m_a
  Matrix boundary_int = Matrix::Zero(3, nd); // int_dP v_c

  for (int lf = 0; lf < L.n_faces; ++lf) {
    const int f = C.faces[lf];
    const double sgn = C.face_orient[lf];
    const auto& fg = mesh.face_geometry(f);
    const FaceProjections& FP = faces[f];
    const int nf1 = dim_poly(k + 1, 2);
    const MonomialBasis2 fbasis = MonomialBasis2::on_face(mesh, f, k + 1);
    const QuadRule q = face_quadrature(mesh, f, 2 * k + 2);
    Matrix FI = Matrix::Zero(nf1, nkp); // int_f m^f_a m_beta
    for (size_t p = 0; p < q.size(); ++p)
      FI.noalias() += q.weights[p] * fbasis.evaluate(q.points[p]) * basis.evaluate(q.points[p]).transpose();

    const std::vector<int> loc = face_dofs_local(mesh, cell, lf, k);
    const std::array<const Vec3*, 3> dirs{&fg.normal, &fg.tau1, &fg.tau2};
    for (int c = 0; c < 3; ++c) {
      const Matrix Pf = FP.pi0 * face_component_selector(mesh, f, k, c); // face vector DoFs
      Matrix E = Matrix::Zero(nkp, nd);                                  // int_f (Pi0_f v_c) m_beta
      const Matrix Ef = FI.transpose() * Pf;
      for (size_t i = 0; i < loc.size(); ++i) E.col(loc[i]) += Ef.col(i);
      flux += sgn * fg.normal[c] * E;
      for (int j = 0; j < 3; ++j) trace[c][j] += sgn * fg.normal[j] * E.topRows(nk1);
      for (int comp = 0; comp < 3; ++comp) boundary_int(c, L.face_dof(lf, 0, comp)) += fg.area * (*dirs[comp])[c];
    }
    boundary_mono += FI.row(0).head(nk).transpose();

    for (int a = 0; a < L.n_face_moments; ++a)
      for (int comp = 0; comp < 3; ++comp)
        for (int c = 0; c < 3; ++c)
          dof_matrix.block(L.face_dof(lf, a, comp), c * nk, 1, nk) +=
              (*dirs[comp])[c] / fg.area * FI.row(a).head(nk);
  }

  // DoFs of the vector monomials.
  for (int lv = 0; lv < L.n_vertices; ++lv) {
    const Vector m = basis.evaluate(mesh.vertex(C.vertices[lv])).head(nk);
    for (int c = 0; c < 3; ++c) dof_matrix.block(L.vertex_dof(lv, c), c * nk, 1, nk) = m.transpose();
  }
  const auto nodes = edge_nodes(k);
  for (int le = 0; le < L.n_edges; ++le) {
    const auto& ev = mesh.edge(C.edges[le]).vertices;
    const Vec3& a = mesh.vertex(ev[0]);
    const Vec3& b = mesh.vertex(ev[1]);
    for (int j = 0; j < k - 1; ++j) {
      const Vector m = basis.evaluate(a + nodes[j] * (b - a)).head(nk);
      for (int c = 0; c < 3; ++c) dof_matrix.block(L.edge_dof(le, j, c), c * nk, 1, nk) = m.transpose();
    }
  }
  const auto cross = cross_basis(k);
  for (int j = 0; j < L.n_d4; ++j) {
    // cross[j] has degree <= k-2; its coefficients are stored on P_k.
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < nk; ++a) {
        double s = 0.;
        for (int b = 0; b < nk; ++b)
          if (cross[j][c * nk + b] != 0.) s += cross[j][c * nk + b] * P.integral2(a, b);
        dof_matrix(L.d4_dof(j), c * nk + a) = s / vol;
      }
  }
  for (int a = 1; a < nk1; ++a)
    for (int c = 0; c < 3; ++c)
      for (int alpha = 0; alpha < nk; ++alpha) {
        auto e = ex[alpha];
        if (e[c] == 0) continue;
        const int pc = e[c];
        --e[c];
        dof_matrix(L.d5_dof(a), c * nk + alpha) = pc * P.integral2(idx3(e), a) / vol;
      }
  P.dof_matrix = dof_matrix;
  P.pi_d = least_squares_projector(dof_matrix, "[P_k]^3 on a cell");

  // Divergence: moments and coefficients in P_{k-1}.
  P.div_moments = Matrix::Zero(nk1, nd);
  for (int lf = 0; lf < L.n_faces; ++lf)
    P.div_moments(0, L.face_dof(lf, 0, 0)) += C.face_orient[lf] * mesh.face_geometry(C.faces[lf]).area;
  for (int a = 1; a < nk1; ++a) P.div_moments(a, L.d5_dof(a)) = vol / hP;
  const ScaledSpdSolver mass1_solver(mass1);
  P.div_coeffs = mass1_solver.solve(P.div_moments);

  // Interior moments through the gradient/cross decomposition of [P_k]^3.
  Matrix basis_moments(3 * nk, nd);
  int row = 0;
  for (int beta = 1; beta < nkp; ++beta) {
    Vector divm = Vector::Zero(nk1);
    for (int g = 0; g < nk1; ++g) divm[g] = P.integral2(g, beta);
    basis_moments.row(row++) = hP * (flux.row(beta) - divm.transpose() * P.div_coeffs);
  }
  Matrix vmass = Matrix::Zero(3 * nk, 3 * nk);
  for (int c = 0; c < 3; ++c) vmass.block(c * nk, c * nk, nk, nk) = P.mass;
  for (size_t j = 0; j < cross.size(); ++j) {
    if (static_cast<int>(j) < L.n_d4) {
      basis_moments.row(row).setZero();
      basis_moments(row, L.d4_dof(static_cast<int>(j))) = vol;
    } else {
      basis_moments.row(row) = (vmass * cross[j]).transpose() * P.pi_d;
    }
    ++row;
  }
  P.moments = decomposition_basis(k).transpose().partialPivLu().solve(basis_moments);

  // L2 projection onto [P_k]^3.
  const ScaledSpdSolver mass_solver(P.mass);
  P.pi0.resize(3 * nk, nd);
  for (int c = 0; c < 3; ++c) P.pi0.middleRows(c * nk, nk) = mass_solver.solve(P.moments.middleRows(c * nk, nk));

  // Gradient moments int_P d_j v_i m_g = -int_P v_i d_j m_g + boundary terms.
  Matrix grad_moments = Matrix::Zero(9 * nk1, nd);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto blk = grad_moments.middleRows((3 * i + j) * nk1, nk1);
      blk = trace[i][j];
      for (int g = 0; g < nk1; ++g) {
        auto e = ex[g];
        if (e[j] == 0) continue;
        const int pj = e[j];
        --e[j];
        blk.row(g) -= (pj / hP) * P.moments.row(i * nk + idx3(e));
      }
    }
  P.pi0_grad.resize(9 * nk1, nd);
  for (int t = 0; t < 9; ++t) P.pi0_grad.middleRows(t * nk1, nk1) = mass1_solver.solve(grad_moments.middleRows(t * nk1, nk1));

  // Elliptic projection, constants fixed by the boundary integral.
  Matrix stiff = Matrix::Zero(nk, nk);
  for (int a = 0; a < nk; ++a)
    for (int b = 0; b < nk; ++b)
      for (int j = 0; j < 3; ++j) {
        auto ea = ex[a], eb = ex[b];
        if (ea[j] == 0 || eb[j] == 0) continue;
        const double fa = ea[j], fb = eb[j];
        --ea[j];
        --eb[j];
        stiff(a, b) += fa * fb / (hP * hP) * P.integral2(idx3(ea), idx3(eb));
      }
  stiff.row(0) = boundary_mono.transpose();
  const Eigen::PartialPivLU<Matrix> stiff_lu(stiff);
  P.pi_nabla.resize(3 * nk, nd);
  for (int c = 0; c < 3; ++c) {
    Matrix rhs = Matrix::Zero(nk, nd);
    for (int a = 1; a < nk; ++a)
      for (int j = 0; j < 3; ++j) {
        auto e = ex[a];
        if (e[j] == 0) continue;
        const int pj = e[j];
        --e[j];
        rhs.row(a) += (pj / hP) * grad_moments.row((3 * c + j) * nk1 + idx3(e));
      }
    rhs.row(0) = boundary_int.row(c);
    P.pi_nabla.middleRows(c * nk, nk) = stiff_lu.solve(rhs);
  }
  return P;
}

//------------------------------------------------------------------------------

VemSpace::VemSpace(const PolyMesh& mesh, int k) : m_mesh(&mesh), m_k(k), m_vmap(mesh, k), m_qmap(mesh, k) {
  m_faces.reserve(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) m_faces.push_back(build_face_projections(mesh, f, k));
  m_cells.reserve(mesh.n_cells());
  m_l2g.reserve(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    m_cells.push_back(build_local_projections(mesh, c, k, m_faces));
    m_l2g.push_back(m_vmap.local_to_global(c));
  }
}

} // namespace dfvem
