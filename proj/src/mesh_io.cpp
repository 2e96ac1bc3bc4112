#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dfvem/mesh.hpp"

namespace dfvem {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Non-empty lines that are not comments, with their 1-based line numbers.
std::vector<std::pair<int, std::string>> data_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path);
  std::vector<std::pair<int, std::string>> out;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    out.emplace_back(no, line);
  }
  return out;
}

} // namespace

PolyMesh parse_json_mesh(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw MeshError(std::string("parse error: ") + e.what());
  }
  try {
    std::vector<Vec3> verts;
    for (const auto& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 3) throw MeshError("parse error: vertex must have 3 coordinates");
      verts.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }
    auto loops = j.at("faces").get<std::vector<std::vector<int>>>();
    auto cells = j.at("cells").get<std::vector<std::vector<int>>>();
    return PolyMesh::build(std::move(verts), std::move(loops), cells);
  } catch (const json::exception& e) {
    throw MeshError(std::string("parse error: ") + e.what());
  }
}

PolyMesh load_json_mesh(const std::string& path) { return parse_json_mesh(read_file(path)); }

PolyMesh load_tetra_list(const std::string& node_path, const std::string& element_path) {
  std::vector<Vec3> nodes;
  for (const auto& [no, line] : data_lines(node_path)) {
    std::istringstream is(line);
    Vec3 x;
    if (!(is >> x[0] >> x[1] >> x[2])) throw MeshError("parse error: " + node_path + ":" + std::to_string(no));
    nodes.push_back(x);
  }
  std::vector<std::array<int, 4>> tets;
  for (const auto& [no, line] : data_lines(element_path)) {
    std::istringstream is(line);
    std::array<int, 4> t;
    if (!(is >> t[0] >> t[1] >> t[2] >> t[3])) throw MeshError("parse error: " + element_path + ":" + std::to_string(no));
    tets.push_back(t);
  }
  return build_tetra_mesh(nodes, tets);
}

PolyMesh load_mesh(const std::string& path, MeshFormat format) {
  if (format == MeshFormat::Json) return load_json_mesh(path);
  const auto dot = path.find_last_of('.');
  const std::string stem = (dot == std::string::npos) ? path : path.substr(0, dot);
  return load_tetra_list(path, stem + ".ele");
}

std::string mesh_to_json(const PolyMesh& mesh) {
  json j;
  j["vertices"] = json::array();
  for (const auto& x : mesh.vertices()) j["vertices"].push_back({x[0], x[1], x[2]});
  j["faces"] = json::array();
  for (int f = 0; f < mesh.n_faces(); ++f) j["faces"].push_back(mesh.face(f).vertices);
  j["cells"] = mesh.signed_cell_faces();
  return j.dump();
}

void save_json_mesh(const PolyMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write " + path);
  out << mesh_to_json(mesh) << '\n';
}

std::string quality_to_json(const QualityReport& r) {
  json j;
  j["rho"] = r.rho;
  j["pass"] = r.pass;
  j["min_edge_ratio"] = r.min_edge_ratio;
  j["min_face_ratio"] = r.min_face_ratio;
  j["min_ball_ratio"] = r.min_ball_ratio;
  j["min_disk_ratio"] = r.min_disk_ratio;
  j["cells"] = json::array();
  for (const auto& q : r.cells)
    j["cells"].push_back({{"edge_ratio", q.edge_ratio}, {"face_ratio", q.face_ratio},
                          {"ball_ratio", q.ball_ratio}, {"disk_ratio", q.disk_ratio}});
  return j.dump(2);
}

} // namespace dfvem
