#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "reproduction.hpp"

using namespace dfvem;
using namespace testing;

namespace {

void check_cell(const PolyMesh& m, int k, double tol, std::mt19937& rng) {
  const Errors e = reproduction_errors(m, k, rng);
  CHECK(e.pi_d < tol);
  CHECK(e.pi0 < tol);
  CHECK(e.pi_nabla < tol);
  CHECK(e.grad < tol);
  CHECK(e.idem < tol);
  CHECK(e.face < tol);
  CHECK(e.div < tol);
}

} // namespace

TEST_CASE("polynomial reproduction k = 2") {
  std::mt19937 rng(11);
  check_cell(single_cube(), 2, 1e-11, rng);
  check_cell(single_tet(), 2, 1e-11, rng);
  check_cell(distorted_hex(), 2, 1e-11, rng);
  check_cell(load_json_mesh(data_path("voronoi_cell.json")), 2, 1e-11, rng);
}

TEST_CASE("polynomial reproduction k = 3") {
  std::mt19937 rng(12);
  check_cell(single_cube(), 3, 1e-10, rng);
  check_cell(single_tet(), 3, 1e-9, rng);
  check_cell(distorted_hex(), 3, 1e-10, rng);
}

TEST_CASE("polynomial reproduction k = 4") {
  // Higher degrees lose digits to the conditioning of the scaled monomials.
  std::mt19937 rng(13);
  check_cell(single_cube(), 4, 1e-8, rng);
  check_cell(single_tet(), 4, 1e-6, rng);
}

TEST_CASE("projections are invariant under translation and scaling") {
  const PolyMesh a = distorted_hex();
  const PolyMesh b = transform_mesh(a, [](const Vec3& x) { return Vec3(3. * x + Vec3(10., -4., 2.)); });
  const VemSpace sa(a, 2), sb(b, 2);
  CHECK((sa.cell(0).pi_d - sb.cell(0).pi_d).norm() < 1e-10);
  CHECK((sa.cell(0).pi0 - sb.cell(0).pi0).norm() < 1e-10);
  CHECK((sa.cell(0).div_coeffs - 3. * sb.cell(0).div_coeffs).norm() < 1e-9);
}

TEST_CASE("mass matrix and moments") {
  const PolyMesh m = single_cube();
  const VemSpace s(m, 2);
  const LocalProjections& P = s.cell(0);
  CHECK(P.volume == doctest::Approx(1.));
  CHECK(P.diameter == doctest::Approx(std::sqrt(3.)));
  CHECK(P.mass(0, 0) == doctest::Approx(1.));
  // int (x~)^2 with x~ = (x - 1/2)/sqrt(3): 1/36
  CHECK(P.integral2(monomial_index3(1, 0, 0), monomial_index3(1, 0, 0)) == doctest::Approx(1. / 36.));
  CHECK(P.mass.isApprox(P.mass.transpose()));
  CHECK(P.mass.ldlt().info() == Eigen::Success);
}
