#include <algorithm>

#include <json.hpp>

#include "dfvem/dofs.hpp"
#include "dfvem/polyquad.hpp"

namespace dfvem {

std::vector<double> edge_nodes(int k) {
  if (k < 2) return {};
  const Rule1D r = gauss_lobatto(k + 1);
  return std::vector<double>(r.x.begin() + 1, r.x.end() - 1);
}

int n_d4_dofs(int k) { return static_cast<int>(cross_basis(k - 2).size()); }
int n_d5_dofs(int k) { return dim_poly(k - 1, 3) - 1; }

LocalLayout make_layout(const PolyMesh& mesh, int cell, int k) {
  if (k < 2) throw std::invalid_argument("polynomial degree must be at least 2");
  const Cell& c = mesh.cell(cell);
  LocalLayout L;
  L.k = k;
  L.n_vertices = static_cast<int>(c.vertices.size());
  L.n_edges = static_cast<int>(c.edges.size());
  L.n_faces = static_cast<int>(c.faces.size());
  L.n_face_moments = dim_poly(k - 2, 2);
  L.n_d4 = n_d4_dofs(k);
  L.n_d5 = n_d5_dofs(k);
  L.off_edge = 3 * L.n_vertices;
  L.off_face = L.off_edge + 3 * (k - 1) * L.n_edges;
  L.off_d4 = L.off_face + 3 * L.n_face_moments * L.n_faces;
  L.off_d5 = L.off_d4 + L.n_d4;
  L.size = L.off_d5 + L.n_d5;
  return L;
}

//------------------------------------------------------------------------------

DofMapV::DofMapV(const PolyMesh& mesh, int k) : m_mesh(&mesh), m_k(k) {
  if (k < 2) throw std::invalid_argument("polynomial degree must be at least 2");
  m_nfm = dim_poly(k - 2, 2);
  m_nint = n_d4_dofs(k) + n_d5_dofs(k);
  m_off_edge = 3 * mesh.n_vertices();
  m_off_face = m_off_edge + 3 * (k - 1) * mesh.n_edges();
  m_off_cell = m_off_face + 3 * m_nfm * mesh.n_faces();
  m_size = m_off_cell + m_nint * mesh.n_cells();

  m_boundary.assign(m_size, false);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.is_boundary_vertex(v))
      for (int c = 0; c < 3; ++c) m_boundary[vertex_dof(v, c)] = true;
  for (int e = 0; e < mesh.n_edges(); ++e)
    if (mesh.is_boundary_edge(e))
      for (int j = 0; j < k - 1; ++j)
        for (int c = 0; c < 3; ++c) m_boundary[edge_dof(e, j, c)] = true;
  for (int f = 0; f < mesh.n_faces(); ++f)
    if (mesh.is_boundary_face(f))
      for (int a = 0; a < m_nfm; ++a)
        for (int c = 0; c < 3; ++c) m_boundary[face_dof(f, a, c)] = true;
}

std::vector<int> DofMapV::local_to_global(int cell) const {
  const Cell& c = m_mesh->cell(cell);
  const LocalLayout L = make_layout(*m_mesh, cell, m_k);
  std::vector<int> g(L.size);
  for (int lv = 0; lv < L.n_vertices; ++lv)
    for (int d = 0; d < 3; ++d) g[L.vertex_dof(lv, d)] = vertex_dof(c.vertices[lv], d);
  for (int le = 0; le < L.n_edges; ++le)
    for (int j = 0; j < m_k - 1; ++j)
      for (int d = 0; d < 3; ++d) g[L.edge_dof(le, j, d)] = edge_dof(c.edges[le], j, d);
  for (int lf = 0; lf < L.n_faces; ++lf)
    for (int a = 0; a < m_nfm; ++a)
      for (int d = 0; d < 3; ++d) g[L.face_dof(lf, a, d)] = face_dof(c.faces[lf], a, d);
  for (int i = 0; i < m_nint; ++i) g[L.off_d4 + i] = cell_dof(cell, i);
  return g;
}

DofFamily DofMapV::family(int dof) const {
  if (dof < m_off_edge) return DofFamily::D1;
  if (dof < m_off_face) return DofFamily::D2;
  if (dof < m_off_cell) return DofFamily::D3;
  return ((dof - m_off_cell) % m_nint) < n_d4_dofs(m_k) ? DofFamily::D4 : DofFamily::D5;
}

int DofMapV::count(DofFamily fam) const {
  switch (fam) {
    case DofFamily::D1: return m_off_edge;
    case DofFamily::D2: return m_off_face - m_off_edge;
    case DofFamily::D3: return m_off_cell - m_off_face;
    case DofFamily::D4: return n_d4_dofs(m_k) * m_mesh->n_cells();
    case DofFamily::D5: return n_d5_dofs(m_k) * m_mesh->n_cells();
  }
  return 0;
}

DofMapQ::DofMapQ(const PolyMesh& mesh, int k) : m_per_cell(dim_poly(k - 1, 3)), m_cells(mesh.n_cells()) {}

ComplexDims complex_dims(const PolyMesh& mesh, int k) {
  const long LV = mesh.n_vertices(), Le = mesh.n_edges(), Lf = mesh.n_faces(), LP = mesh.n_cells();
  auto p2 = [](int n) { return static_cast<long>(dim_poly(n, 2)); };
  auto p3 = [](int n) { return static_cast<long>(dim_poly(n, 3)); };
  ComplexDims d;
  d.dim_w = LV;
  d.dim_sigma = 3 * LV + (3 * k - 2) * Le + (3 * p2(k - 2) - 1) * Lf + (3 * p3(k - 2) - p3(k - 1) + 1) * LP;
  d.dim_v = 3 * LV + 3 * (k - 1) * Le + 3 * p2(k - 2) * Lf + 3 * p3(k - 2) * LP;
  d.dim_q = p3(k - 1) * LP;
  d.dim_z = d.dim_v - d.dim_q;
  d.euler = mesh.euler_characteristic();
  return d;
}

//------------------------------------------------------------------------------
// Interpolation
//------------------------------------------------------------------------------

Vector local_interpolate(const PolyMesh& mesh, int k, int cell, const VectorField& u, int exactness) {
  const Cell& c = mesh.cell(cell);
  const LocalLayout L = make_layout(mesh, cell, k);
  Vector dofs = Vector::Zero(L.size);

  for (int lv = 0; lv < L.n_vertices; ++lv) {
    const Vec3 val = u.value(mesh.vertex(c.vertices[lv]));
    for (int d = 0; d < 3; ++d) dofs[L.vertex_dof(lv, d)] = val[d];
  }
  const auto nodes = edge_nodes(k);
  for (int le = 0; le < L.n_edges; ++le) {
    const auto& ev = mesh.edge(c.edges[le]).vertices;
    const Vec3& a = mesh.vertex(ev[0]);
    const Vec3& b = mesh.vertex(ev[1]);
    for (int j = 0; j < k - 1; ++j) {
      const Vec3 val = u.value(a + nodes[j] * (b - a));
      for (int d = 0; d < 3; ++d) dofs[L.edge_dof(le, j, d)] = val[d];
    }
  }
  for (int lf = 0; lf < L.n_faces; ++lf) {
    const int f = c.faces[lf];
    const auto& fg = mesh.face_geometry(f);
    const MonomialBasis2 basis = MonomialBasis2::on_face(mesh, f, k - 2);
    const QuadRule q = face_quadrature(mesh, f, exactness);
    for (size_t p = 0; p < q.size(); ++p) {
      const Vec3 val = u.value(q.points[p]);
      const Vector m = basis.evaluate(q.points[p]);
      const double w = q.weights[p] / fg.area;
      const std::array<double, 3> comps{val.dot(fg.normal), val.dot(fg.tau1), val.dot(fg.tau2)};
      for (int a = 0; a < L.n_face_moments; ++a)
        for (int d = 0; d < 3; ++d) dofs[L.face_dof(lf, a, d)] += w * comps[d] * m[a];
    }
  }
  if (L.n_d4 + L.n_d5 > 0) {
    const auto& cg = mesh.cell_geometry(cell);
    const auto cross = cross_basis(k - 2);
    const int np2 = dim_poly(k - 2, 3);
    const MonomialBasis3 basis(k - 1, cg.barycenter, cg.diameter);
    const QuadRule q = cell_quadrature(mesh, cell, exactness);
    for (size_t p = 0; p < q.size(); ++p) {
      const Vector m = basis.evaluate(q.points[p]);
      const double w = q.weights[p] / cg.volume;
      if (L.n_d4 > 0) {
        const Vec3 val = u.value(q.points[p]);
        for (int j = 0; j < L.n_d4; ++j) {
          double s = 0.;
          for (int d = 0; d < 3; ++d) s += val[d] * cross[j].segment(d * np2, np2).dot(m.head(np2));
          dofs[L.d4_dof(j)] += w * s;
        }
      }
      const double div = u.gradient(q.points[p]).trace();
      for (int a = 1; a <= L.n_d5; ++a) dofs[L.d5_dof(a)] += w * cg.diameter * div * m[a];
    }
  }
  return dofs;
}

Vector interpolate(const PolyMesh& mesh, const DofMapV& map, const VectorField& u, int exactness) {
  Vector out = Vector::Zero(map.size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Vector loc = local_interpolate(mesh, map.k(), c, u, exactness);
    const auto l2g = map.local_to_global(c);
    for (size_t i = 0; i < l2g.size(); ++i) out[l2g[i]] = loc[i];
  }
  return out;
}

std::string dof_summary_json(const PolyMesh& mesh, const DofMapV& vmap, const DofMapQ& qmap) {
  nlohmann::json j;
  j["k"] = vmap.k();
  j["entities"] = {{"vertices", mesh.n_vertices()}, {"edges", mesh.n_edges()},
                   {"faces", mesh.n_faces()}, {"cells", mesh.n_cells()}};
  j["velocity"] = {{"total", vmap.size()},
                   {"D1", vmap.count(DofFamily::D1)},
                   {"D2", vmap.count(DofFamily::D2)},
                   {"D3", vmap.count(DofFamily::D3)},
                   {"D4", vmap.count(DofFamily::D4)},
                   {"D5", vmap.count(DofFamily::D5)},
                   {"boundary", std::count(vmap.boundary_mask().begin(), vmap.boundary_mask().end(), true)}};
  j["pressure"] = {{"total", qmap.size()}, {"per_cell", qmap.per_cell()}};
  const ComplexDims d = complex_dims(mesh, vmap.k());
  j["complex"] = {{"W", d.dim_w}, {"Sigma", d.dim_sigma}, {"V", d.dim_v}, {"Q", d.dim_q},
                  {"Z", d.dim_z}, {"alternating_sum", d.alternating_sum()}, {"euler", d.euler}};
  return j.dump(2);
}

} // namespace dfvem
