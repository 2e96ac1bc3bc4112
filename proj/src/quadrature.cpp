#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "dfvem/polyquad.hpp"

namespace dfvem {

double QuadRule::measure() const { return std::accumulate(weights.begin(), weights.end(), 0.); }

//------------------------------------------------------------------------------
// One-dimensional rules
//------------------------------------------------------------------------------

namespace {

// Legendre P_n and its derivative at x in [-1,1].
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1., p1 = x;
  if (n == 0) return {1., 0.};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2. * k - 1.) * x * p1 - (k - 1.) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.);
  return {p1, dp};
}

} // namespace

Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    r.x[n - 1 - i] = 0.5 * (x + 1.);
    r.w[n - 1 - i] = 1. / ((1. - x * x) * dp * dp);
  }
  return r;
}

Rule1D gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("Gauss-Lobatto rule needs at least two points");
  const int m = n - 1;
  Rule1D r;
  r.x.assign(n, 0.);
  r.w.assign(n, 0.);
  r.x[0] = 0.;
  r.x[n - 1] = 1.;
  r.w[0] = r.w[n - 1] = 1. / (n * (n - 1.));
  for (int i = 1; i < m; ++i) {
    // Interior nodes are the roots of P'_m.
    double x = -std::cos(M_PI * i / m);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(m, x);
      const double d2p = (2. * x * dp - m * (m + 1.) * p) / (1. - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double p = legendre(m, x).first;
    r.x[i] = 0.5 * (x + 1.);
    r.w[i] = 1. / (n * (n - 1.) * p * p);
  }
  return r;
}

//------------------------------------------------------------------------------
// Grundmann-Moeller simplex rules
//------------------------------------------------------------------------------

namespace {

void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur.push_back(v);
    compositions(total - v, parts - 1, cur, out);
    cur.pop_back();
  }
}

SimplexRule grundmann_moeller(int dim, int exactness) {
  const int s = std::max(0, exactness / 2);
  const int d = 2 * s + 1;
  SimplexRule r;
  double total = 0.;
  for (int i = 0; i <= s; ++i) {
    const double denom_base = d + dim - 2 * i;
    double w = std::pow(-1., i) * std::pow(2., -2 * s) * std::pow(denom_base, d);
    w /= std::tgamma(i + 1.) * std::tgamma(d + dim - i + 1.);
    std::vector<std::vector<int>> betas;
    std::vector<int> cur;
    compositions(s - i, dim + 1, cur, betas);
    for (const auto& b : betas) {
      std::vector<double> lam(dim + 1);
      for (int j = 0; j <= dim; ++j) lam[j] = (2. * b[j] + 1.) / denom_base;
      r.bary.push_back(std::move(lam));
      r.w.push_back(w);
      total += w;
    }
  }
  for (double& w : r.w) w /= total;
  return r;
}

} // namespace

const SimplexRule& simplex_rule(int dim, int exactness) {
  static std::map<std::pair<int, int>, SimplexRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const int d = std::max(1, exactness | 1);
  auto key = std::make_pair(dim, d);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, grundmann_moeller(dim, d)).first;
  return it->second;
}

//------------------------------------------------------------------------------
// Rules on mesh entities
//------------------------------------------------------------------------------

QuadRule cell_quadrature(const PolyMesh& mesh, int c, int exactness) {
  const auto& cell = mesh.cell(c);
  const auto& cg = mesh.cell_geometry(c);
  const SimplexRule& ref = simplex_rule(3, exactness);
  QuadRule q;
  q.exactness = exactness;
  const double tol = 1e-14 * std::pow(cg.diameter, 3);
  if (cell.vertices.size() == 4) {
    // Tetrahedron: integrate on the cell itself.
    std::array<Vec3, 4> t;
    for (int k = 0; k < 4; ++k) t[k] = mesh.vertex(cell.vertices[k]);
    const double vol = std::abs((t[1] - t[0]).dot((t[2] - t[0]).cross(t[3] - t[0]))) / 6.;
    for (size_t p = 0; p < ref.w.size(); ++p) {
      Vec3 x = Vec3::Zero();
      for (int k = 0; k < 4; ++k) x += ref.bary[p][k] * t[k];
      q.points.push_back(x);
      q.weights.push_back(ref.w[p] * vol);
    }
    return q;
  }
  for (size_t i = 0; i < cell.faces.size(); ++i) {
    const int f = cell.faces[i];
    const auto& loop = mesh.face(f).vertices;
    const Vec3& cf = mesh.face_geometry(f).centroid;
    const size_t n = loop.size();
    for (size_t j = 0; j < n; ++j) {
      Vec3 a = mesh.vertex(loop[j]), b = mesh.vertex(loop[(j + 1) % n]);
      if (cell.face_orient[i] < 0) std::swap(a, b);
      const std::array<Vec3, 4> t{cg.barycenter, cf, a, b};
      const double vol = (t[1] - t[0]).dot((t[2] - t[0]).cross(t[3] - t[0])) / 6.;
      if (!(vol > tol)) throw MeshError("cell " + std::to_string(c) + ": not star-shaped about its barycenter");
      for (size_t p = 0; p < ref.w.size(); ++p) {
        Vec3 x = Vec3::Zero();
        for (int k = 0; k < 4; ++k) x += ref.bary[p][k] * t[k];
        q.points.push_back(x);
        q.weights.push_back(ref.w[p] * vol);
      }
    }
  }
  return q;
}

QuadRule face_quadrature(const PolyMesh& mesh, int f, int exactness) {
  const auto& loop = mesh.face(f).vertices;
  const auto& fg = mesh.face_geometry(f);
  const SimplexRule& ref = simplex_rule(2, exactness);
  QuadRule q;
  q.exactness = exactness;
  const size_t n = loop.size();
  if (n == 3) {
    for (size_t p = 0; p < ref.w.size(); ++p) {
      q.points.push_back(ref.bary[p][0] * mesh.vertex(loop[0]) + ref.bary[p][1] * mesh.vertex(loop[1]) +
                         ref.bary[p][2] * mesh.vertex(loop[2]));
      q.weights.push_back(ref.w[p] * fg.area);
    }
    return q;
  }
  for (size_t j = 0; j < n; ++j) {
    const Vec3& a = mesh.vertex(loop[j]);
    const Vec3& b = mesh.vertex(loop[(j + 1) % n]);
    const double area = 0.5 * fg.normal.dot((a - fg.centroid).cross(b - fg.centroid));
    if (!(area > 1e-14 * fg.diameter * fg.diameter))
      throw MeshError("face " + std::to_string(f) + ": not star-shaped about its centroid");
    for (size_t p = 0; p < ref.w.size(); ++p) {
      q.points.push_back(ref.bary[p][0] * fg.centroid + ref.bary[p][1] * a + ref.bary[p][2] * b);
      q.weights.push_back(ref.w[p] * area);
    }
  }
  return q;
}

QuadRule edge_quadrature(const PolyMesh& mesh, int e, int exactness) {
  const Rule1D r = gauss_legendre(exactness / 2 + 1);
  const Vec3& a = mesh.vertex(mesh.edge(e).vertices[0]);
  const Vec3& b = mesh.vertex(mesh.edge(e).vertices[1]);
  const double len = mesh.edge_geometry(e).length;
  QuadRule q;
  q.exactness = exactness;
  for (size_t i = 0; i < r.x.size(); ++i) {
    q.points.push_back(a + r.x[i] * (b - a));
    q.weights.push_back(r.w[i] * len);
  }
  return q;
}

} // namespace dfvem
