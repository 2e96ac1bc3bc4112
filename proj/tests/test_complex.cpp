#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"

using namespace dfvem;
using namespace testing;

TEST_CASE("alternating sums") {
  const ExactnessCheck c = check_exactness_dims(single_cube(), 2);
  CHECK(c.applicable);
  CHECK(c.pass);
  CHECK(1 - 8 + 84 - 81 + 4 == c.dims.alternating_sum());
  for (int k : {2, 3}) {
    CHECK(check_exactness_dims(generate_structured_cubes(3), k).pass);
    CHECK(check_exactness_dims(generate_kuhn_tetra(2), k).pass);
    CHECK(check_exactness_dims(load_json_mesh(data_path("voronoi_cell.json")), k).pass);
  }
  const PolyMesh torus = generate_box(3, 3, 1, Vec3::Zero(), Vec3::Ones(),
                                      [](int i, int j, int) { return !(i == 1 && j == 1); });
  const ExactnessCheck t = check_exactness_dims(torus, 2);
  CHECK_FALSE(t.applicable);
  CHECK(t.dims.euler == 0);
  CHECK(complex_report_json(t, nullptr, nullptr).find("not applicable") != std::string::npos);
}

TEST_CASE("divergence is onto the pressure space") {
  {
    const PolyMesh m = single_cube();
    const SurjectivityCheck s = check_div_surjectivity(VemSpace(m, 2));
    CHECK(s.rank.rank == 4);
    CHECK(s.dim_v == 81);
    CHECK(s.pass);
  }
  {
    const PolyMesh m = single_tet();
    const SurjectivityCheck s = check_div_surjectivity(VemSpace(m, 2));
    CHECK(s.rank.rank == 4);
    CHECK(s.kernel_dim == 41);
    CHECK(s.expected_kernel == 41);
    CHECK(s.pass);
  }
  {
    const PolyMesh m = generate_box(2, 1, 1, Vec3::Zero(), Vec3(2., 1., 1.));
    const SurjectivityCheck s = check_div_surjectivity(VemSpace(m, 2));
    CHECK(s.rank.rank == 8);
    CHECK(s.pass);
    const SurjectivityCheck s3 = check_div_surjectivity(VemSpace(m, 3));
    CHECK(s3.rank.rank == 20);
    CHECK(s3.pass);
  }
  {
    const PolyMesh m = generate_structured_cubes(3);
    CHECK(check_div_surjectivity(VemSpace(m, 2), 500).skipped);
  }
}

TEST_CASE("rank is invariant under permutation and scaling") {
  std::mt19937 rng(31);
  const PolyMesh m = transform_mesh(generate_box(2, 1, 1), random_projective(rng));
  const VemSpace space(m, 2);
  const Matrix B(divergence_matrix(space));
  const long r0 = matrix_rank(B).rank;
  std::vector<int> perm(B.cols());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix P(B.rows(), B.cols());
  for (int j = 0; j < B.cols(); ++j) P.col(j) = B.col(perm[j]);
  CHECK(matrix_rank(P).rank == r0);
  for (double lambda : {0.5, 2.}) {
    const PolyMesh s = transform_mesh(m, [lambda](const Vec3& x) { return Vec3(lambda * x); });
    const SurjectivityCheck c = check_div_surjectivity(VemSpace(s, 2));
    CHECK(c.rank.rank == r0);
    CHECK(c.pass);
  }
}

TEST_CASE("matrix rank helper") {
  Matrix M = Matrix::Zero(3, 4);
  M(0, 0) = 1.;
  M(1, 1) = 1e-3;
  CHECK(matrix_rank(M).rank == 2);
  CHECK_FALSE(matrix_rank(M).inconclusive);
  M(2, 2) = 2e-9;
  CHECK(matrix_rank(M).inconclusive);
}

TEST_CASE("divergence-free check") {
  const PolyMesh m = generate_structured_cubes(2);
  const VemSpace space(m, 2);
  CHECK(check_divfree(space, Vector::Zero(space.vmap().size())).value == 0.);
  const ManufacturedCase mc = make_case("ex1-stokes", 2);
  const FlowSolution s = solve_stokes(space, mc.problem());
  const DivFreeCheck d = check_divfree(space, s.u);
  CHECK(d.pass);
  CHECK(d.value <= 10. * 1e-10);
  // Negative control: interpolant of a field with nonzero divergence.
  const VectorField g{[](const Vec3& x) { return Vec3(x[0] * x[0], 0., 0.); },
                      [](const Vec3& x) {
                        Mat3 G = Mat3::Zero();
                        G(0, 0) = 2. * x[0];
                        return G;
                      }};
  const Vector gi = interpolate(m, space.vmap(), g, 6);
  CHECK(check_divfree(space, gi).value > 1e-3);
  CHECK_FALSE(check_divfree(space, gi).pass);
}

TEST_CASE("inf-sup constant stays bounded below") {
  std::vector<double> beta;
  for (int n : {1, 2, 3}) {
    const PolyMesh m = generate_structured_cubes(n);
    beta.push_back(infsup_constant(VemSpace(m, 2)));
  }
  for (double b : beta) CHECK(b > 0.05);
  CHECK(beta[2] > 0.5 * beta[1]);
}
