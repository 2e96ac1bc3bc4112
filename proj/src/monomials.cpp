#include <cmath>
#include <stdexcept>

#include "dfvem/polyquad.hpp"

namespace dfvem {

int dim_poly(int n, int d) {
  if (n < 0) return 0;
  long r = 1;
  for (int i = 1; i <= d; ++i) r = r * (n + i) / i;
  return static_cast<int>(r);
}

std::span<const std::array<int, 3>> exponents3(int n) {
  static const std::vector<std::array<int, 3>> table = [] {
    std::vector<std::array<int, 3>> t;
    for (int d = 0; d <= max_monomial_degree; ++d)
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b) t.push_back({a, b, d - a - b});
    return t;
  }();
  if (n > max_monomial_degree) throw std::out_of_range("monomial degree too large");
  return {table.data(), static_cast<size_t>(dim_poly(n, 3))};
}

std::span<const std::array<int, 2>> exponents2(int n) {
  static const std::vector<std::array<int, 2>> table = [] {
    std::vector<std::array<int, 2>> t;
    for (int d = 0; d <= max_monomial_degree; ++d)
      for (int a = d; a >= 0; --a) t.push_back({a, d - a});
    return t;
  }();
  if (n > max_monomial_degree) throw std::out_of_range("monomial degree too large");
  return {table.data(), static_cast<size_t>(dim_poly(n, 2))};
}

//------------------------------------------------------------------------------

MonomialBasis3::MonomialBasis3(int degree, const Vec3& center, double scale)
    : m_degree(degree), m_size(dim_poly(degree, 3)), m_center(center), m_scale(scale) {}

Vector MonomialBasis3::evaluate(const Vec3& x) const {
  const Vec3 y = scaled(x);
  Eigen::Matrix<double, 3, Eigen::Dynamic> pw(3, m_degree + 1);
  pw.col(0).setOnes();
  for (int p = 1; p <= m_degree; ++p) pw.col(p) = pw.col(p - 1).cwiseProduct(y);
  Vector v(m_size);
  const auto ex = exponents3(m_degree);
  for (int i = 0; i < m_size; ++i) v[i] = pw(0, ex[i][0]) * pw(1, ex[i][1]) * pw(2, ex[i][2]);
  return v;
}

Matrix MonomialBasis3::gradient(const Vec3& x) const {
  const Vec3 y = scaled(x);
  Eigen::Matrix<double, 3, Eigen::Dynamic> pw(3, m_degree + 1);
  pw.col(0).setOnes();
  for (int p = 1; p <= m_degree; ++p) pw.col(p) = pw.col(p - 1).cwiseProduct(y);
  auto P = [&](int j, int e) { return e > 0 ? e * pw(j, e - 1) : 0.; };
  Matrix g(m_size, 3);
  const auto ex = exponents3(m_degree);
  for (int i = 0; i < m_size; ++i) {
    const auto& a = ex[i];
    g(i, 0) = P(0, a[0]) * pw(1, a[1]) * pw(2, a[2]) / m_scale;
    g(i, 1) = pw(0, a[0]) * P(1, a[1]) * pw(2, a[2]) / m_scale;
    g(i, 2) = pw(0, a[0]) * pw(1, a[1]) * P(2, a[2]) / m_scale;
  }
  return g;
}

//------------------------------------------------------------------------------

MonomialBasis2::MonomialBasis2(int degree, const Vec3& center, const Vec3& tau1, const Vec3& tau2, double scale)
    : m_degree(degree), m_size(dim_poly(degree, 2)), m_center(center), m_tau1(tau1), m_tau2(tau2), m_scale(scale) {}

MonomialBasis2 MonomialBasis2::on_face(const PolyMesh& mesh, int face, int degree) {
  const auto& g = mesh.face_geometry(face);
  return MonomialBasis2(degree, g.centroid, g.tau1, g.tau2, g.diameter);
}

Eigen::Vector2d MonomialBasis2::local(const Vec3& x) const {
  const Vec3 d = x - m_center;
  return Eigen::Vector2d(d.dot(m_tau1), d.dot(m_tau2)) / m_scale;
}

Vector MonomialBasis2::evaluate(const Vec3& x) const {
  const Eigen::Vector2d y = local(x);
  Eigen::Matrix<double, 2, Eigen::Dynamic> pw(2, m_degree + 1);
  pw.col(0).setOnes();
  for (int p = 1; p <= m_degree; ++p) pw.col(p) = pw.col(p - 1).cwiseProduct(y);
  Vector v(m_size);
  const auto ex = exponents2(m_degree);
  for (int i = 0; i < m_size; ++i) v[i] = pw(0, ex[i][0]) * pw(1, ex[i][1]);
  return v;
}

Matrix MonomialBasis2::gradient(const Vec3& x) const {
  const Eigen::Vector2d y = local(x);
  Eigen::Matrix<double, 2, Eigen::Dynamic> pw(2, m_degree + 1);
  pw.col(0).setOnes();
  for (int p = 1; p <= m_degree; ++p) pw.col(p) = pw.col(p - 1).cwiseProduct(y);
  auto P = [&](int j, int e) { return e > 0 ? e * pw(j, e - 1) : 0.; };
  Matrix g(m_size, 2);
  const auto ex = exponents2(m_degree);
  for (int i = 0; i < m_size; ++i) {
    g(i, 0) = P(0, ex[i][0]) * pw(1, ex[i][1]) / m_scale;
    g(i, 1) = pw(0, ex[i][0]) * P(1, ex[i][1]) / m_scale;
  }
  return g;
}

//------------------------------------------------------------------------------
// Vector polynomial helpers
//------------------------------------------------------------------------------

VectorPoly scaled_gradient(int beta, int n) {
  const int np = dim_poly(n, 3);
  VectorPoly g = VectorPoly::Zero(3 * np);
  const auto& b = exponents3(max_monomial_degree)[beta];
  for (int j = 0; j < 3; ++j) {
    if (b[j] == 0) continue;
    auto e = b;
    --e[j];
    const int idx = monomial_index3(e[0], e[1], e[2]);
    if (idx >= np) throw std::invalid_argument("gradient degree exceeds target degree");
    g[j * np + idx] = b[j];
  }
  return g;
}

std::vector<VectorPoly> cross_basis(int n) {
  std::vector<VectorPoly> out;
  if (n < 1) return out;
  const int np = dim_poly(n, 3);
  const auto ex = exponents3(n - 1);
  // x~ ^ (m e_i): e_0 -> (0, z m, -y m), e_1 -> (-z m, 0, x m), e_2 -> (y m, -x m, 0).
  auto times = [&](int beta, int j) {
    auto e = ex[beta];
    ++e[j];
    return monomial_index3(e[0], e[1], e[2]);
  };
  std::vector<Vector> kept_orth; // orthonormalized copies for the pivoting test
  for (int d = 0; d <= n - 1; ++d) {
    for (int beta = dim_poly(d - 1, 3); beta < dim_poly(d, 3); ++beta) {
      for (int i = 0; i < 3; ++i) {
        VectorPoly v = VectorPoly::Zero(3 * np);
        const int a = (i + 1) % 3, b = (i + 2) % 3;
        // (x ^ e_i)_a = x_b, (x ^ e_i)_b = -x_a
        v[a * np + times(beta, b)] += 1.;
        v[b * np + times(beta, a)] -= 1.;
        Vector r = v;
        for (const auto& q : kept_orth) r -= q.dot(r) * q;
        for (const auto& q : kept_orth) r -= q.dot(r) * q;
        if (r.norm() > 1e-10 * v.norm()) {
          kept_orth.push_back(r.normalized());
          out.push_back(v);
        }
      }
    }
  }
  return out;
}

} // namespace dfvem
