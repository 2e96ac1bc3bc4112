#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace dfvem;
using namespace testing;

namespace {

ProblemSpec zero_problem() {
  ProblemSpec s;
  s.f = [](const Vec3&) { return Vec3::Zero(); };
  s.dirichlet = [](const Vec3&) { return Vec3::Zero(); };
  return s;
}

} // namespace

TEST_CASE("linear solver") {
  std::vector<Triplet> t{{0, 0, 2.}, {1, 1, 3.}, {0, 1, 1.}};
  SparseMatrix K(2, 2);
  K.setFromTriplets(t.begin(), t.end());
  double res = 1.;
  const Vector x = solve_linear(K, Vector::Ones(2), &res);
  CHECK(x[1] == doctest::Approx(1. / 3.));
  CHECK(x[0] == doctest::Approx(1. / 3.));
  CHECK(res < 1e-15);
  SparseMatrix S(2, 2);
  std::vector<Triplet> s{{0, 0, 1.}, {1, 0, 1.}};
  S.setFromTriplets(s.begin(), s.end());
  CHECK_THROWS_AS(solve_linear(S, Vector::Ones(2)), SolverError);
}

TEST_CASE("zero data gives the zero solution") {
  const PolyMesh m = generate_structured_cubes(2);
  const VemSpace space(m, 2);
  const FlowSolution s = solve_stokes(space, zero_problem());
  CHECK(s.u.lpNorm<Eigen::Infinity>() == 0.);
  CHECK(s.p.lpNorm<Eigen::Infinity>() == 0.);
  const FlowSolution n = solve_navier_stokes(space, zero_problem());
  CHECK(n.converged);
  CHECK(n.newton_iterations == 1);
  CHECK(n.u.lpNorm<Eigen::Infinity>() == 0.);
}

TEST_CASE("patch test") {
  for (int k : {2, 3}) {
    for (const PolyMesh& m : {distorted_hex(), transform_mesh(generate_structured_cubes(2), projective_map(Vec3(0.1, 0.15, -0.2)))}) {
      const VemSpace space(m, k);
      const ManufacturedCase mc = make_patch_case(k, m);
      const FlowSolution s = solve_stokes(space, mc.problem());
      CHECK(error_h1_velocity(space, s.u, mc) < 1e-8);
      CHECK(error_l2_pressure(space, s.p, mc, false) < 1e-8);
    }
  }
}

TEST_CASE("Stokes solve is linear in the data") {
  const PolyMesh m = generate_structured_cubes(2);
  const VemSpace space(m, 2);
  const ManufacturedCase mc = make_case("ex1-stokes", 2);
  ProblemSpec a = mc.problem();
  ProblemSpec b = a;
  const double alpha = 3.5;
  b.f = [f = a.f, alpha](const Vec3& x) { return Vec3(alpha * f(x)); };
  b.dirichlet = [g = a.dirichlet, alpha](const Vec3& x) { return Vec3(alpha * g(x)); };
  const FlowSolution sa = solve_stokes(space, a), sb = solve_stokes(space, b);
  CHECK((sb.u - alpha * sa.u).norm() < 1e-10 * sb.u.norm());
  CHECK((sb.p - alpha * sa.p).norm() < 1e-10 * sb.p.norm());
  CHECK(sa.linear_residual <= 1e-10);
  CHECK(pressure_cell_means(space, sa.p).dot(Vector::Ones(8)) == doctest::Approx(0.).epsilon(1e-12));
}

TEST_CASE("Newton converges quadratically") {
  const PolyMesh m = generate_structured_cubes(2);
  const VemSpace space(m, 2);
  const ManufacturedCase mc = make_case("ex2-ns", 2);
  const FlowSolution s = solve_navier_stokes(space, mc.problem());
  CHECK(s.converged);
  CHECK(s.newton_iterations <= 10);
  REQUIRE(s.increments.size() >= 2);
  CHECK(s.increments.back() < 1e-10);
  for (size_t i = 1; i < s.increments.size(); ++i) CHECK(s.increments[i] < s.increments[i - 1]);
  NewtonOptions zero;
  zero.zero_initial_guess = true;
  const FlowSolution z = solve_navier_stokes(space, mc.problem(), zero);
  CHECK(z.converged);
  CHECK((z.u - s.u).norm() < 1e-8 * s.u.norm());
  NewtonOptions one;
  one.max_iterations = 1;
  const FlowSolution o = solve_navier_stokes(space, mc.problem(), one);
  CHECK_FALSE(o.converged);
  CHECK(o.newton_iterations == 1);
}

TEST_CASE("neumann variant") {
  const PolyMesh m = generate_structured_cubes(2);
  const VemSpace space(m, 2);
  const ManufacturedCase mc = make_case("ex1-stokes-neumann", 2);
  const FlowSolution s = solve_stokes(space, mc.problem());
  const ManufacturedCase md = make_case("ex1-stokes", 2);
  const FlowSolution d = solve_stokes(space, md.problem());
  // Comparable accuracy with and without traction faces.
  CHECK(error_h1_velocity(space, s.u, mc) < 2. * error_h1_velocity(space, d.u, md));
  CHECK(error_l2_pressure(space, s.p, mc, false) < 2.);
}

TEST_CASE("reduced scheme") {
  for (int k : {2, 3}) {
    const PolyMesh m = generate_structured_cubes(2);
    const VemSpace space(m, k);
    const ManufacturedCase mc = make_case("ex1-stokes", k);
    const ReducedComparison r = reduce_and_compare(space, mc.problem());
    CHECK(r.velocity_difference < 1e-9);
    CHECK(r.pressure_difference < 1e-9);
    CHECK(r.full_dofs - r.reduced_dofs == reduced_saving(space));
    CHECK(reduced_saving(space) == (2 * dim_poly(k - 1, 3) - 2) * 8);
  }
  const PolyMesh m = generate_structured_cubes(2);
  const VemSpace space(m, 2);
  const ReducedComparison z = reduce_and_compare(space, zero_problem());
  CHECK(z.full.u.norm() == 0.);
  CHECK(z.reduced.u.norm() == 0.);
}
