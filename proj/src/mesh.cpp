#include "dfvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace dfvem {

namespace {

double max_pair_distance(const std::vector<Vec3>& pts, const std::vector<int>& ids) {
  double d = 0.;
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = i + 1; j < ids.size(); ++j)
      d = std::max(d, (pts[ids[i]] - pts[ids[j]]).norm());
  return d;
}

std::string where(const char* what, size_t id) { return std::string(what) + " " + std::to_string(id) + ": "; }

} // namespace

//------------------------------------------------------------------------------
// Construction
//------------------------------------------------------------------------------

PolyMesh PolyMesh::build(std::vector<Vec3> vertices, std::vector<std::vector<int>> face_loops,
                         const std::vector<std::vector<int>>& cell_faces) {
  PolyMesh m;
  const int nV = static_cast<int>(vertices.size());
  const int nF = static_cast<int>(face_loops.size());
  if (nV == 0 || nF == 0 || cell_faces.empty()) throw MeshError("empty mesh");

  for (size_t f = 0; f < face_loops.size(); ++f) {
    const auto& loop = face_loops[f];
    if (loop.size() < 3) throw MeshError(where("face", f) + "fewer than 3 vertices");
    for (int v : loop)
      if (v < 0 || v >= nV) throw MeshError(where("face", f) + "vertex index out of range");
    std::vector<int> sorted = loop;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw MeshError(where("face", f) + "repeated vertex");
  }

  // Face incidence, in increasing cell order.
  std::vector<std::vector<std::pair<int, int>>> incidence(nF);
  m.m_cells.resize(cell_faces.size());
  for (size_t c = 0; c < cell_faces.size(); ++c) {
    const auto& list = cell_faces[c];
    if (list.size() < 4) throw MeshError(where("cell", c) + "fewer than 4 faces");
    for (int s : list) {
      const int f = std::abs(s) - 1;
      if (s == 0 || f >= nF) throw MeshError(where("cell", c) + "face index out of range");
      for (const auto& [cc, ss] : incidence[f])
        if (cc == static_cast<int>(c)) throw MeshError(where("cell", c) + "face listed twice");
      incidence[f].emplace_back(static_cast<int>(c), s > 0 ? 1 : -1);
    }
  }
  for (int f = 0; f < nF; ++f) {
    auto& inc = incidence[f];
    if (inc.empty()) throw MeshError(where("face", f) + "not used by any cell");
    if (inc.size() > 2) throw MeshError(where("face", f) + "non-manifold (shared by more than two cells)");
    if (inc.size() == 2 && inc[0].second == inc[1].second)
      throw MeshError(where("face", f) + "inconsistent orientation between its two cells");
    // The lower-numbered cell sees the loop counter-clockwise from outside.
    if (inc[0].second < 0) {
      std::reverse(face_loops[f].begin(), face_loops[f].end());
      for (auto& p : inc) p.second = -p.second;
    }
  }

  m.m_vertices = std::move(vertices);

  // Edges, keyed by sorted vertex pair, in order of first appearance.
  std::map<std::pair<int, int>, int> edge_ids;
  m.m_faces.resize(nF);
  for (int f = 0; f < nF; ++f) {
    Face& face = m.m_faces[f];
    face.vertices = std::move(face_loops[f]);
    const size_t n = face.vertices.size();
    for (size_t i = 0; i < n; ++i) {
      const int a = face.vertices[i], b = face.vertices[(i + 1) % n];
      const std::pair<int, int> key(std::min(a, b), std::max(a, b));
      auto it = edge_ids.find(key);
      int e;
      if (it == edge_ids.end()) {
        e = static_cast<int>(m.m_edges.size());
        edge_ids.emplace(key, e);
        m.m_edges.push_back(Edge{{key.first, key.second}});
      } else {
        e = it->second;
      }
      face.edges.push_back(e);
      face.edge_orient.push_back(a < b ? 1 : -1);
    }
    face.cells[0] = incidence[f][0].first;
    if (incidence[f].size() == 2) face.cells[1] = incidence[f][1].first;
  }

  std::vector<bool> used(nV, false);
  for (const auto& face : m.m_faces)
    for (int v : face.vertices) used[v] = true;
  for (int v = 0; v < nV; ++v)
    if (!used[v]) throw MeshError(where("vertex", v) + "not used by any face");

  // Cells: entity lists and closed-surface check.
  for (size_t c = 0; c < cell_faces.size(); ++c) {
    Cell& cell = m.m_cells[c];
    std::map<std::pair<int, int>, int> directed;
    for (int s : cell_faces[c]) {
      const int f = std::abs(s) - 1;
      int orient = 0;
      for (const auto& [cc, ss] : incidence[f])
        if (cc == static_cast<int>(c)) orient = ss;
      cell.faces.push_back(f);
      cell.face_orient.push_back(orient);
      const Face& face = m.m_faces[f];
      const size_t n = face.vertices.size();
      for (size_t i = 0; i < n; ++i) {
        int a = face.vertices[i], b = face.vertices[(i + 1) % n];
        if (orient < 0) std::swap(a, b);
        directed[{a, b}] += 1;
        cell.vertices.push_back(a);
        cell.edges.push_back(face.edges[i]);
      }
    }
    for (const auto& [ab, count] : directed) {
      auto rev = directed.find({ab.second, ab.first});
      if (count != 1 || rev == directed.end() || rev->second != 1)
        throw MeshError(where("cell", c) + "faces do not form a closed consistently oriented surface");
    }
    std::sort(cell.vertices.begin(), cell.vertices.end());
    cell.vertices.erase(std::unique(cell.vertices.begin(), cell.vertices.end()), cell.vertices.end());
    std::sort(cell.edges.begin(), cell.edges.end());
    cell.edges.erase(std::unique(cell.edges.begin(), cell.edges.end()), cell.edges.end());
  }

  // Geometry.
  const auto& X = m.m_vertices;
  m.m_edge_geo.resize(m.m_edges.size());
  for (size_t e = 0; e < m.m_edges.size(); ++e) {
    const Vec3 d = X[m.m_edges[e].vertices[1]] - X[m.m_edges[e].vertices[0]];
    auto& g = m.m_edge_geo[e];
    g.length = d.norm();
    if (!(g.length > 0.)) throw MeshError(where("edge", e) + "zero length");
    g.tangent = d / g.length;
    g.midpoint = 0.5 * (X[m.m_edges[e].vertices[0]] + X[m.m_edges[e].vertices[1]]);
  }

  m.m_face_geo.resize(nF);
  for (int f = 0; f < nF; ++f) {
    const auto& loop = m.m_faces[f].vertices;
    const size_t n = loop.size();
    auto& g = m.m_face_geo[f];
    Vec3 area_vec = Vec3::Zero();
    Vec3 mean = Vec3::Zero();
    for (size_t i = 0; i < n; ++i) {
      area_vec += 0.5 * X[loop[i]].cross(X[loop[(i + 1) % n]]);
      mean += X[loop[i]];
    }
    mean /= static_cast<double>(n);
    g.diameter = max_pair_distance(X, loop);
    if (!(area_vec.norm() > 1e-14 * g.diameter * g.diameter)) throw MeshError(where("face", f) + "degenerate");
    g.normal = area_vec.normalized();
    double area = 0.;
    Vec3 centroid = Vec3::Zero();
    for (size_t i = 0; i < n; ++i) {
      const Vec3& a = X[loop[i]];
      const Vec3& b = X[loop[(i + 1) % n]];
      const double t = 0.5 * g.normal.dot((a - mean).cross(b - mean));
      area += t;
      centroid += t * (mean + a + b) / 3.;
    }
    g.area = area;
    g.centroid = centroid / area;
    for (size_t i = 0; i < n; ++i)
      if (std::abs(g.normal.dot(X[loop[i]] - g.centroid)) > 1e-9 * g.diameter)
        throw MeshError(where("face", f) + "not planar");
    Vec3 t1 = X[loop[1]] - X[loop[0]];
    t1 -= g.normal.dot(t1) * g.normal;
    g.tau1 = t1.normalized();
    g.tau2 = g.normal.cross(g.tau1);
  }

  m.m_cell_geo.resize(m.m_cells.size());
  for (size_t c = 0; c < m.m_cells.size(); ++c) {
    const Cell& cell = m.m_cells[c];
    auto& g = m.m_cell_geo[c];
    Vec3 ref = Vec3::Zero();
    for (int v : cell.vertices) ref += X[v];
    ref /= static_cast<double>(cell.vertices.size());
    double vol = 0.;
    Vec3 moment = Vec3::Zero();
    for (size_t i = 0; i < cell.faces.size(); ++i) {
      const auto& fg = m.m_face_geo[cell.faces[i]];
      const auto& loop = m.m_faces[cell.faces[i]].vertices;
      const size_t n = loop.size();
      for (size_t j = 0; j < n; ++j) {
        const Vec3& a = X[loop[j]];
        const Vec3& b = X[loop[(j + 1) % n]];
        const double t = cell.face_orient[i] * (fg.centroid - ref).dot((a - fg.centroid).cross(b - fg.centroid)) / 6.;
        vol += t;
        moment += t * (ref + fg.centroid + a + b) / 4.;
      }
    }
    g.diameter = max_pair_distance(X, cell.vertices);
    if (!(vol > 1e-14 * std::pow(g.diameter, 3))) throw MeshError(where("cell", c) + "inverted or degenerate");
    g.volume = vol;
    g.barycenter = moment / vol;
  }

  m.m_boundary_edge.assign(m.m_edges.size(), false);
  m.m_boundary_vertex.assign(nV, false);
  for (int f = 0; f < nF; ++f) {
    if (!m.is_boundary_face(f)) continue;
    for (int e : m.m_faces[f].edges) m.m_boundary_edge[e] = true;
    for (int v : m.m_faces[f].vertices) m.m_boundary_vertex[v] = true;
  }
  return m;
}

Vec3 PolyMesh::edge_normal_in_face(int f, int i) const {
  const auto& loop = m_faces[f].vertices;
  const Vec3 t = (m_vertices[loop[(i + 1) % loop.size()]] - m_vertices[loop[i]]).normalized();
  return t.cross(m_face_geo[f].normal);
}

std::vector<std::vector<int>> PolyMesh::signed_cell_faces() const {
  std::vector<std::vector<int>> out(m_cells.size());
  for (size_t c = 0; c < m_cells.size(); ++c)
    for (size_t i = 0; i < m_cells[c].faces.size(); ++i)
      out[c].push_back(m_cells[c].face_orient[i] * (m_cells[c].faces[i] + 1));
  return out;
}

//------------------------------------------------------------------------------
// Generators
//------------------------------------------------------------------------------

PolyMesh generate_box(int nx, int ny, int nz, const Vec3& lo, const Vec3& hi,
                      const std::function<bool(int, int, int)>& keep) {
  if (nx < 1 || ny < 1 || nz < 1) throw MeshError("box dimensions must be positive");
  auto vid = [&](int i, int j, int l) { return i + (nx + 1) * (j + (ny + 1) * l); };
  std::map<std::array<int, 4>, int> face_ids; // (direction, i, j, l)
  std::vector<std::vector<int>> loops;
  std::vector<std::vector<int>> cells;

  auto face = [&](int dir, int i, int j, int l) {
    const std::array<int, 4> key{dir, i, j, l};
    auto it = face_ids.find(key);
    if (it != face_ids.end()) return it->second;
    std::vector<int> loop;
    if (dir == 0) loop = {vid(i, j, l), vid(i, j + 1, l), vid(i, j + 1, l + 1), vid(i, j, l + 1)};
    else if (dir == 1) loop = {vid(i, j, l), vid(i, j, l + 1), vid(i + 1, j, l + 1), vid(i + 1, j, l)};
    else loop = {vid(i, j, l), vid(i + 1, j, l), vid(i + 1, j + 1, l), vid(i, j + 1, l)};
    const int id = static_cast<int>(loops.size());
    loops.push_back(std::move(loop));
    face_ids.emplace(key, id);
    return id;
  };

  for (int l = 0; l < nz; ++l)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (keep && !keep(i, j, l)) continue;
        cells.push_back({-(face(0, i, j, l) + 1), face(0, i + 1, j, l) + 1, -(face(1, i, j, l) + 1),
                         face(1, i, j + 1, l) + 1, -(face(2, i, j, l) + 1), face(2, i, j, l + 1) + 1});
      }
  if (cells.empty()) throw MeshError("box mask removed every cell");

  // Compact the vertex numbering to the vertices actually used.
  const int nall = (nx + 1) * (ny + 1) * (nz + 1);
  std::vector<int> renum(nall, -1);
  for (const auto& loop : loops)
    for (int v : loop) renum[v] = 0;
  std::vector<Vec3> verts;
  for (int l = 0; l <= nz; ++l)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) {
        const int v = vid(i, j, l);
        if (renum[v] < 0) continue;
        renum[v] = static_cast<int>(verts.size());
        verts.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny,
                           lo.z() + (hi.z() - lo.z()) * l / nz);
      }
  for (auto& loop : loops)
    for (int& v : loop) v = renum[v];
  return PolyMesh::build(std::move(verts), std::move(loops), cells);
}

PolyMesh generate_structured_cubes(int n) { return generate_box(n, n, n); }

PolyMesh generate_kuhn_tetra(int n) {
  if (n < 1) throw MeshError("number of cubes per direction must be positive");
  std::vector<Vec3> nodes;
  for (int l = 0; l <= n; ++l)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) nodes.emplace_back(double(i) / n, double(j) / n, double(l) / n);
  auto vid = [&](const std::array<int, 3>& p) { return p[0] + (n + 1) * (p[1] + (n + 1) * p[2]); };
  const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& perm : perms) {
          std::array<int, 3> p{i, j, l};
          std::array<int, 4> t;
          t[0] = vid(p);
          for (int s = 0; s < 3; ++s) {
            ++p[perm[s]];
            t[s + 1] = vid(p);
          }
          tets.push_back(t);
        }
  return build_tetra_mesh(nodes, tets);
}

PolyMesh build_tetra_mesh(const std::vector<Vec3>& nodes, const std::vector<std::array<int, 4>>& tets) {
  const int nN = static_cast<int>(nodes.size());
  std::map<std::array<int, 3>, int> face_ids;
  std::vector<std::vector<int>> loops;
  std::vector<std::vector<int>> cells;
  for (size_t t = 0; t < tets.size(); ++t) {
    auto tet = tets[t];
    for (int v : tet)
      if (v < 0 || v >= nN) throw MeshError(where("tetrahedron", t) + "node index out of range");
    const double det = (nodes[tet[1]] - nodes[tet[0]]).cross(nodes[tet[2]] - nodes[tet[0]]).dot(nodes[tet[3]] - nodes[tet[0]]);
    double scale = 0.;
    for (int a = 1; a < 4; ++a) scale = std::max(scale, (nodes[tet[a]] - nodes[tet[0]]).norm());
    if (!(std::abs(det) > 1e-14 * scale * scale * scale)) throw MeshError(where("tetrahedron", t) + "degenerate");
    if (det < 0) std::swap(tet[2], tet[3]);
    const std::array<std::array<int, 3>, 4> outward{{{tet[1], tet[2], tet[3]},
                                                     {tet[0], tet[3], tet[2]},
                                                     {tet[0], tet[1], tet[3]},
                                                     {tet[0], tet[2], tet[1]}}};
    std::vector<int> cf;
    for (const auto& tri : outward) {
      std::array<int, 3> key = tri;
      std::sort(key.begin(), key.end());
      auto it = face_ids.find(key);
      if (it == face_ids.end()) {
        const int id = static_cast<int>(loops.size());
        face_ids.emplace(key, id);
        loops.push_back({tri[0], tri[1], tri[2]});
        cf.push_back(id + 1);
      } else {
        cf.push_back(-(it->second + 1));
      }
    }
    cells.push_back(std::move(cf));
  }
  return PolyMesh::build(nodes, std::move(loops), cells);
}

PolyMesh transform_mesh(const PolyMesh& mesh, const std::function<Vec3(const Vec3&)>& map) {
  std::vector<Vec3> verts;
  verts.reserve(mesh.n_vertices());
  for (const auto& x : mesh.vertices()) verts.push_back(map(x));
  std::vector<std::vector<int>> loops;
  for (int f = 0; f < mesh.n_faces(); ++f) loops.push_back(mesh.face(f).vertices);
  return PolyMesh::build(std::move(verts), std::move(loops), mesh.signed_cell_faces());
}

//------------------------------------------------------------------------------
// Size and quality
//------------------------------------------------------------------------------

double mesh_size(const PolyMesh& mesh) {
  double s = 0.;
  for (int c = 0; c < mesh.n_cells(); ++c) s += mesh.cell_geometry(c).diameter;
  return s / mesh.n_cells();
}

QualityReport quality_check(const PolyMesh& mesh, double rho) {
  QualityReport r;
  r.rho = rho;
  r.min_edge_ratio = r.min_face_ratio = r.min_ball_ratio = r.min_disk_ratio = 1e300;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Cell& cell = mesh.cell(c);
    const auto& cg = mesh.cell_geometry(c);
    const double hP = cg.diameter;
    CellQuality q;
    q.edge_ratio = q.face_ratio = q.ball_ratio = q.disk_ratio = 1e300;
    for (int e : cell.edges) q.edge_ratio = std::min(q.edge_ratio, mesh.edge_geometry(e).length / hP);
    for (int f : cell.faces) {
      const auto& fg = mesh.face_geometry(f);
      q.face_ratio = std::min(q.face_ratio, fg.diameter / hP);
      q.ball_ratio = std::min(q.ball_ratio, std::abs(fg.normal.dot(fg.centroid - cg.barycenter)) / hP);
      const auto& loop = mesh.face(f).vertices;
      for (size_t i = 0; i < loop.size(); ++i) {
        const Vec3& a = mesh.vertex(loop[i]);
        const double d = mesh.edge_normal_in_face(f, static_cast<int>(i)).dot(a - fg.centroid);
        q.disk_ratio = std::min(q.disk_ratio, std::abs(d) / hP);
      }
    }
    r.min_edge_ratio = std::min(r.min_edge_ratio, q.edge_ratio);
    r.min_face_ratio = std::min(r.min_face_ratio, q.face_ratio);
    r.min_ball_ratio = std::min(r.min_ball_ratio, q.ball_ratio);
    r.min_disk_ratio = std::min(r.min_disk_ratio, q.disk_ratio);
    r.cells.push_back(q);
  }
  r.pass = r.min_edge_ratio >= rho;
  return r;
}

} // namespace dfvem
