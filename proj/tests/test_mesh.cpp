#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "support.hpp"

using namespace dfvem;
using namespace testing;

namespace {

double total_volume(const PolyMesh& m) {
  double v = 0.;
  for (int c = 0; c < m.n_cells(); ++c) v += m.cell_geometry(c).volume;
  return v;
}

const char* cube_json = R"({
  "vertices": [[0,0,0],[1,0,0],[1,1,0],[0,1,0],[0,0,1],[1,0,1],[1,1,1],[0,1,1]],
  "faces": [[0,3,2,1],[4,5,6,7],[0,1,5,4],[2,3,7,6],[1,2,6,5],[0,4,7,3]],
  "cells": [[1,2,3,4,5,6]]
})";

} // namespace

TEST_CASE("structured cube counts") {
  const PolyMesh m = generate_structured_cubes(3);
  CHECK(m.n_vertices() == 64);
  CHECK(m.n_edges() == 144);
  CHECK(m.n_faces() == 108);
  CHECK(m.n_cells() == 27);
  CHECK(m.euler_characteristic() == 1);
  CHECK(total_volume(m) == doctest::Approx(1.).epsilon(1e-14));
  CHECK(mesh_size(m) == doctest::Approx(std::sqrt(3.) / 3.));
}

TEST_CASE("kuhn tetrahedra counts") {
  const PolyMesh m = generate_kuhn_tetra(2);
  CHECK(m.n_vertices() == 27);
  CHECK(m.n_cells() == 48);
  CHECK(m.euler_characteristic() == 1);
  CHECK(total_volume(m) == doctest::Approx(1.).epsilon(1e-14));
  for (int c = 0; c < m.n_cells(); ++c) CHECK(m.cell_geometry(c).volume == doctest::Approx(1. / 48.));
}

TEST_CASE("boundary normals point outward") {
  const PolyMesh m = generate_structured_cubes(2);
  int boundary = 0;
  for (int f = 0; f < m.n_faces(); ++f) {
    if (!m.is_boundary_face(f)) continue;
    ++boundary;
    const FaceGeometry& g = m.face_geometry(f);
    CHECK(g.normal.dot(g.centroid - Vec3(0.5, 0.5, 0.5)) > 0.);
  }
  CHECK(boundary == 24);
}

TEST_CASE("json parse and round trip") {
  const PolyMesh m = parse_json_mesh(cube_json);
  CHECK(m.n_cells() == 1);
  CHECK(m.cell_geometry(0).volume == doctest::Approx(1.));
  const PolyMesh k = generate_kuhn_tetra(1);
  const PolyMesh r = parse_json_mesh(mesh_to_json(k));
  CHECK(r.n_vertices() == k.n_vertices());
  CHECK(r.n_faces() == k.n_faces());
  CHECK(r.n_cells() == k.n_cells());
  for (int c = 0; c < k.n_cells(); ++c) CHECK(r.cell_geometry(c).volume == doctest::Approx(k.cell_geometry(c).volume));
}

TEST_CASE("mesh errors") {
  CHECK_THROWS_AS(parse_json_mesh("{not json"), MeshError);
  CHECK_THROWS_WITH_AS(parse_json_mesh("{not json"), doctest::Contains("parse error"), MeshError);
  // Face referencing a missing vertex.
  CHECK_THROWS_AS(parse_json_mesh(R"({"vertices":[[0,0,0],[1,0,0],[0,1,0],[0,0,1]],
    "faces":[[0,2,1],[0,1,3],[1,2,3],[0,3,9]],"cells":[[1,2,3,4]]})"),
                  MeshError);
  // Wrong orientation sign on one face.
  CHECK_THROWS_AS(parse_json_mesh(R"({"vertices":[[0,0,0],[1,0,0],[0,1,0],[0,0,1]],
    "faces":[[0,2,1],[0,1,3],[1,2,3],[0,3,2]],"cells":[[1,2,3,-4]]})"),
                  MeshError);
  // Unused vertex.
  CHECK_THROWS_AS(parse_json_mesh(R"({"vertices":[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[5,5,5]],
    "faces":[[0,2,1],[0,1,3],[1,2,3],[0,3,2]],"cells":[[1,2,3,4]]})"),
                  MeshError);
  // Non-planar face: lift one vertex of the top quad.
  std::string bent = cube_json;
  bent.replace(bent.find("[1,1,1]"), 7, "[1,1,1.3]");
  CHECK_THROWS_AS(parse_json_mesh(bent), MeshError);
  // Whole cell inverted.
  CHECK_THROWS_AS(parse_json_mesh(R"({"vertices":[[0,0,0],[1,0,0],[0,1,0],[0,0,1]],
    "faces":[[0,1,2],[0,3,1],[1,3,2],[0,2,3]],"cells":[[1,2,3,4]]})"),
                  MeshError);
  CHECK_THROWS_AS(load_json_mesh("/nonexistent/mesh.json"), MeshError);
}

TEST_CASE("tetra list files") {
  const std::string node = "tetra_test.node", ele = "tetra_test.ele";
  {
    std::ofstream n(node);
    n << "# nodes\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n\n1 1 1\n";
    std::ofstream e(ele);
    e << "0 1 2 3\n1 2 3 4\n";
  }
  const PolyMesh m = load_mesh(node, MeshFormat::TetraList);
  CHECK(m.n_cells() == 2);
  CHECK(m.n_faces() == 7);
  CHECK(total_volume(m) == doctest::Approx(1. / 6. + 1. / 3.));
  std::remove(node.c_str());
  std::remove(ele.c_str());
}

TEST_CASE("voronoi fixture") {
  const PolyMesh m = load_json_mesh(data_path("voronoi_cell.json"));
  CHECK(m.n_vertices() == 24);
  CHECK(m.n_edges() == 36);
  CHECK(m.n_faces() == 14);
  // Truncated octahedron with edge a: volume 8 sqrt(2) a^3.
  const double a = std::sqrt(2.) / 4.;
  CHECK(m.cell_geometry(0).volume == doctest::Approx(8. * std::sqrt(2.) * a * a * a));
  CHECK(m.euler_characteristic() == 1);
}

TEST_CASE("quality ratios") {
  const QualityReport q = quality_check(single_cube(), 0.1);
  CHECK(q.min_edge_ratio == doctest::Approx(1. / std::sqrt(3.)));
  CHECK(q.min_face_ratio == doctest::Approx(std::sqrt(2.) / std::sqrt(3.)));
  CHECK(q.min_ball_ratio == doctest::Approx(0.5 / std::sqrt(3.)));
  CHECK(q.pass);
  CHECK_FALSE(quality_check(single_cube(), 0.9).pass);
}

TEST_CASE("torus has Euler characteristic zero") {
  const PolyMesh m = generate_box(3, 3, 1, Vec3::Zero(), Vec3::Ones(),
                                  [](int i, int j, int) { return !(i == 1 && j == 1); });
  CHECK(m.n_cells() == 8);
  CHECK(m.euler_characteristic() == 0);
}

TEST_CASE("transform keeps topology") {
  std::mt19937 rng(3);
  const PolyMesh m = generate_structured_cubes(2);
  const PolyMesh t = transform_mesh(m, random_projective(rng));
  CHECK(t.n_faces() == m.n_faces());
  CHECK(t.euler_characteristic() == 1);
}
