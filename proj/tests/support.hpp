#pragma once

#include <random>
#include <string>

#include "dfvem/complex.hpp"

namespace testing {

using namespace dfvem;

inline std::string data_path(const std::string& name) { return std::string(DFVEM_TEST_DATA_DIR) + "/" + name; }

/// Vector polynomial sum_c sum_a coeffs[c*dim+a] m_a e_c with its Jacobian.
inline VectorField poly_field(const Vector& coeffs, const MonomialBasis3& basis) {
  return {[coeffs, basis](const Vec3& x) { return eval_vector_poly(coeffs, basis, x); },
          [coeffs, basis](const Vec3& x) {
            const Matrix G = basis.gradient(x);
            const int n = basis.size();
            Mat3 J;
            for (int i = 0; i < 3; ++i) J.row(i) = coeffs.segment(i * n, n).transpose() * G;
            return J;
          }};
}

inline Mat3 random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat3 M;
  for (int i = 0; i < 9; ++i) M(i) = g(rng);
  Eigen::HouseholderQR<Mat3> qr(M);
  Mat3 Q = qr.householderQ();
  if (Q.determinant() < 0.) Q.col(0) *= -1.;
  return Q;
}

/// Rotation times a diagonal stretch in [0.5, 2] and a small shear, plus a shift.
inline std::function<Vec3(const Vec3&)> random_affine(std::mt19937& rng) {
  std::uniform_real_distribution<double> s(0.5, 2.), sh(-0.3, 0.3), t(-5., 5.);
  Mat3 D = Mat3::Identity();
  for (int i = 0; i < 3; ++i) D(i, i) = s(rng);
  D(0, 1) = sh(rng);
  D(1, 2) = sh(rng);
  const Mat3 A = random_rotation(rng) * D;
  const Vec3 b(t(rng), t(rng), t(rng));
  return [A, b](const Vec3& x) { return Vec3(A * x + b); };
}

/// Projective map x -> (x + b) / (1 + c.x) on the unit cube; keeps faces planar.
inline std::function<Vec3(const Vec3&)> projective_map(const Vec3& c) {
  return [c](const Vec3& x) { return Vec3(x / (1. + c.dot(x))); };
}

inline std::function<Vec3(const Vec3&)> random_projective(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  return projective_map(Vec3(u(rng), u(rng), u(rng)));
}

inline PolyMesh single_cube() { return generate_structured_cubes(1); }

inline PolyMesh single_tet(const Vec3& a = Vec3(0, 0, 0), const Vec3& b = Vec3(1, 0, 0), const Vec3& c = Vec3(0, 1, 0),
                           const Vec3& d = Vec3(0, 0, 1)) {
  return build_tetra_mesh({a, b, c, d}, {{0, 1, 2, 3}});
}

inline PolyMesh distorted_hex() { return transform_mesh(single_cube(), projective_map(Vec3(0.2, -0.15, 0.1))); }

inline Vector random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1., 1.);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

} // namespace testing
