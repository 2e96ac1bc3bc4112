#include <cmath>

#include <Eigen/SparseLU>

#include "dfvem/solver.hpp"

namespace dfvem {

namespace {

// Ruiz equilibration: row and column scalings with unit max-norm rows and columns.
void equilibrate(const SparseMatrix& K, Vector& dr, Vector& dc) {
  dr = Vector::Ones(K.rows());
  dc = Vector::Ones(K.cols());
  for (int sweep = 0; sweep < 6; ++sweep) {
    Vector rmax = Vector::Zero(K.rows()), cmax = Vector::Zero(K.cols());
    for (int j = 0; j < K.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(K, j); it; ++it) {
        const double v = std::abs(dr[it.row()] * it.value() * dc[it.col()]);
        rmax[it.row()] = std::max(rmax[it.row()], v);
        cmax[it.col()] = std::max(cmax[it.col()], v);
      }
    for (int i = 0; i < K.rows(); ++i)
      if (rmax[i] > 0.) dr[i] /= std::sqrt(rmax[i]);
    for (int j = 0; j < K.cols(); ++j)
      if (cmax[j] > 0.) dc[j] /= std::sqrt(cmax[j]);
  }
}

} // namespace

Vector solve_linear(const SparseMatrix& K, const Vector& rhs, double* residual, double tol) {
  SparseMatrix Kc = K;
  Kc.makeCompressed();
  Vector dr, dc;
  equilibrate(Kc, dr, dc);
  SparseMatrix Ks = dr.asDiagonal() * Kc * dc.asDiagonal();
  Ks.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(Ks);
  if (lu.info() != Eigen::Success)
    throw SolverError("singular system (missing pressure constraint or over-constrained velocity?)");
  auto scaled_solve = [&](const Vector& b) { return Vector(dc.asDiagonal() * lu.solve(Vector(dr.asDiagonal() * b))); };
  Vector x = scaled_solve(rhs);
  const double bnorm = rhs.norm();
  Vector r = rhs - Kc * x;
  if (r.norm() > 1e-3 * tol * bnorm) {
    x += scaled_solve(r);
    r = rhs - Kc * x;
  }
  const double rel = bnorm > 0. ? r.norm() / bnorm : r.norm();
  if (residual) *residual = rel;
  // A right-hand side at round-off level is judged by the backward error instead.
  double knorm = 0.;
  for (int j = 0; j < Kc.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(Kc, j); it; ++it) knorm = std::max(knorm, std::abs(it.value()));
  const bool backward_ok = r.norm() <= tol * knorm * x.norm();
  if (!x.allFinite() || (rel > tol && !backward_ok))
    throw SolverError("linear solve did not reach the residual tolerance");
  return x;
}

namespace {

// Convection matrices (C(u), C_adv(u)) in the numbering of the system.
using ConvectionFn = std::function<std::pair<SparseMatrix, SparseMatrix>(const Vector&)>;

struct Iterate {
  Vector u, p;
  double lambda = 0.;
};

Iterate unpack(const GlobalSystem& sys, const SaddlePoint& S, const Vector& x) {
  Iterate it;
  it.u = sys.fixed_values;
  for (int i = 0; i < S.n_free; ++i) it.u[S.free_dofs[i]] = x[i];
  it.p = x.segment(S.n_free, S.n_pressure);
  if (S.multiplier) it.lambda = x[S.n_free + S.n_pressure];
  return it;
}

FlowSolution solve_system(const GlobalSystem& sys, const ConvectionFn& convection, const NewtonOptions& opt) {
  FlowSolution sol;
  double res = 0.;
  SaddlePoint S = build_saddle_point(sys, sys.A, sys.load);
  Vector x;
  if (convection && opt.zero_initial_guess) {
    x = Vector::Zero(S.K.rows());
  } else {
    x = solve_linear(S.K, S.rhs, &res);
    sol.linear_residual = res;
  }
  if (convection) {
    sol.converged = false;
    for (int n = 1; n <= opt.max_iterations; ++n) {
      const Iterate cur = unpack(sys, S, x);
      auto [C, Cadv] = convection(cur.u);
      const SparseMatrix J = sys.A + C + Cadv;
      const Vector rhs = sys.load + C * cur.u;
      S = build_saddle_point(sys, J, rhs);
      const Vector xn = solve_linear(S.K, S.rhs, &res);
      sol.linear_residual = std::max(sol.linear_residual, res);
      const double xnorm = x.norm();
      const double dnorm = (xn - x).norm();
      sol.increments.push_back(xnorm > 0. ? dnorm / xnorm : dnorm);
      x = xn;
      sol.newton_iterations = n;
      if (dnorm <= opt.tol * xnorm) {
        sol.converged = true;
        break;
      }
    }
  }
  const Iterate fin = unpack(sys, S, x);
  sol.u = fin.u;
  sol.p = fin.p;
  sol.multiplier = fin.lambda;
  return sol;
}

} // namespace

FlowSolution solve_stokes(const VemSpace& space, const ProblemSpec& spec) {
  return solve_system(assemble_system(space, spec), {}, {});
}

FlowSolution solve_navier_stokes(const VemSpace& space, const ProblemSpec& spec, const NewtonOptions& opt) {
  const GlobalSystem sys = assemble_system(space, spec);
  ConvectionFn conv = [&](const Vector& u) {
    return std::make_pair(assemble_convection(space, u, false), assemble_convection(space, u, true));
  };
  return solve_system(sys, conv, opt);
}

//------------------------------------------------------------------------------
// Reduced pair
//------------------------------------------------------------------------------

namespace {

// Full index of each reduced DoF.
std::vector<int> reduced_dofs(const VemSpace& space) {
  std::vector<int> keep;
  const DofMapV& V = space.vmap();
  for (int i = 0; i < V.size(); ++i)
    if (V.family(i) != DofFamily::D5) keep.push_back(i);
  return keep;
}

} // namespace

SparseMatrix reduced_embedding(const VemSpace& space) {
  const PolyMesh& mesh = space.mesh();
  const DofMapV& V = space.vmap();
  const std::vector<int> keep = reduced_dofs(space);
  std::vector<int> red(V.size(), -1);
  for (size_t i = 0; i < keep.size(); ++i) red[keep[i]] = static_cast<int>(i);
  std::vector<Triplet> trip;
  for (size_t i = 0; i < keep.size(); ++i) trip.emplace_back(keep[i], static_cast<int>(i), 1.);
  const int nd4 = n_d4_dofs(space.k());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalProjections& P = space.cell(c);
    const Cell& cell = mesh.cell(c);
    // D5_a = (h_P/|P|) int_P div(v) m_a with div(v) = (1/|P|) sum_f s_f |f| (normal moment 0).
    for (int a = 1; a < dim_poly(space.k() - 1, 3); ++a) {
      const int row = V.cell_dof(c, nd4 + a - 1);
      const double factor = P.diameter / (P.volume * P.volume) * P.mono_integrals[a];
      for (size_t lf = 0; lf < cell.faces.size(); ++lf) {
        const int f = cell.faces[lf];
        trip.emplace_back(row, red[V.face_dof(f, 0, 0)], factor * cell.face_orient[lf] * mesh.face_geometry(f).area);
      }
    }
  }
  SparseMatrix E(V.size(), static_cast<int>(keep.size()));
  E.setFromTriplets(trip.begin(), trip.end());
  return E;
}

int reduced_saving(const VemSpace& space) {
  return (2 * dim_poly(space.k() - 1, 3) - 2) * space.mesh().n_cells();
}

Vector pressure_cell_means(const VemSpace& space, const Vector& p) {
  const DofMapQ& Q = space.qmap();
  Vector means(space.mesh().n_cells());
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    const LocalProjections& P = space.cell(c);
    double s = 0.;
    for (int q = 0; q < Q.per_cell(); ++q) s += p[Q.dof(c, q)] * P.mono_integrals[q];
    means[c] = s / P.volume;
  }
  return means;
}

ReducedComparison reduce_and_compare(const VemSpace& space, const ProblemSpec& spec, bool navier_stokes,
                                     const NewtonOptions& opt) {
  const PolyMesh& mesh = space.mesh();
  const DofMapQ& Q = space.qmap();
  const GlobalSystem sys = assemble_system(space, spec);
  const SparseMatrix E = reduced_embedding(space);
  const std::vector<int> keep = reduced_dofs(space);
  const SparseMatrix Et = E.transpose();

  std::vector<Triplet> rt;
  for (int c = 0; c < mesh.n_cells(); ++c) rt.emplace_back(Q.dof(c, 0), c, 1.);
  SparseMatrix R(Q.size(), mesh.n_cells());
  R.setFromTriplets(rt.begin(), rt.end());

  GlobalSystem red;
  red.n_velocity = static_cast<int>(keep.size());
  red.n_pressure = mesh.n_cells();
  red.A = Et * sys.A * E;
  red.B = SparseMatrix(R.transpose()) * sys.B * E;
  red.load = Et * sys.load;
  red.mean = R.transpose() * sys.mean;
  red.zero_mean = sys.zero_mean;
  red.neumann_face = sys.neumann_face;
  red.fixed.resize(keep.size());
  red.fixed_values.resize(keep.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    red.fixed[i] = sys.fixed[keep[i]];
    red.fixed_values[i] = sys.fixed_values[keep[i]];
  }

  ConvectionFn full_conv, red_conv;
  if (navier_stokes) {
    full_conv = [&](const Vector& u) {
      return std::make_pair(assemble_convection(space, u, false), assemble_convection(space, u, true));
    };
    red_conv = [&](const Vector& ur) {
      const Vector u = E * ur;
      SparseMatrix C = Et * assemble_convection(space, u, false) * E;
      SparseMatrix Ca = Et * assemble_convection(space, u, true) * E;
      return std::make_pair(C, Ca);
    };
  }

  ReducedComparison out;
  out.full = solve_system(sys, full_conv, opt);
  FlowSolution r = solve_system(red, red_conv, opt);
  r.u = E * r.u;
  Vector p = Vector::Zero(Q.size());
  for (int c = 0; c < mesh.n_cells(); ++c) p[Q.dof(c, 0)] = r.p[c];
  r.p = p;
  out.reduced = r;
  out.full_dofs = sys.n_velocity + sys.n_pressure;
  out.reduced_dofs = red.n_velocity + red.n_pressure;

  const double umax = out.full.u.lpNorm<Eigen::Infinity>();
  const double du = (out.full.u - out.reduced.u).lpNorm<Eigen::Infinity>();
  out.velocity_difference = umax > 0. ? du / umax : du;
  const Vector mf = pressure_cell_means(space, out.full.p);
  const Vector mr = pressure_cell_means(space, out.reduced.p);
  const double pmax = mf.lpNorm<Eigen::Infinity>();
  const double dp = (mf - mr).lpNorm<Eigen::Infinity>();
  out.pressure_difference = pmax > 0. ? dp / pmax : dp;
  return out;
}

} // namespace dfvem
