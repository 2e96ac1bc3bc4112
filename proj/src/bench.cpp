#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dfvem/bench.hpp"

namespace dfvem {

double error_h1_velocity(const VemSpace& space, const Vector& uh, const ManufacturedCase& c) {
  const PolyMesh& mesh = space.mesh();
  const int k = space.k();
  const int nk1 = dim_poly(k - 1, 3);
  double total = 0.;
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const LocalProjections& P = space.cell(cell);
    const std::vector<int>& l2g = space.l2g(cell);
    Vector loc(l2g.size());
    for (size_t i = 0; i < l2g.size(); ++i) loc[i] = uh[l2g[i]];
    const Vector G = P.pi0_grad * loc;
    const MonomialBasis3 basis(k - 1, P.center, P.diameter);
    const QuadRule rule = cell_quadrature(mesh, cell, 2 * k + 2);
    for (size_t q = 0; q < rule.size(); ++q) {
      const Vec3& x = rule.points[q];
      const Vector m = basis.evaluate(x);
      const Mat3 exact = c.grad_u(x);
      double s = 0.;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double d = exact(i, j) - G.segment((3 * i + j) * nk1, nk1).dot(m);
          s += d * d;
        }
      total += rule.weights[q] * s;
    }
  }
  return std::sqrt(total);
}

double error_l2_pressure(const VemSpace& space, const Vector& ph, const ManufacturedCase& c, bool zero_mean) {
  const PolyMesh& mesh = space.mesh();
  const int k = space.k();
  const int nq = space.qmap().per_cell();
  const int ex = 2 * k + 2;
  double shift = 0.;
  if (zero_mean) {
    double integral = 0., volume = 0.;
    for (int cell = 0; cell < mesh.n_cells(); ++cell) {
      const QuadRule rule = cell_quadrature(mesh, cell, ex);
      for (size_t q = 0; q < rule.size(); ++q) {
        integral += rule.weights[q] * c.p(rule.points[q]);
        volume += rule.weights[q];
      }
    }
    shift = integral / volume;
  }
  double total = 0.;
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const LocalProjections& P = space.cell(cell);
    const MonomialBasis3 basis(k - 1, P.center, P.diameter);
    const Vector coeffs = ph.segment(space.qmap().dof(cell, 0), nq);
    const QuadRule rule = cell_quadrature(mesh, cell, ex);
    for (size_t q = 0; q < rule.size(); ++q) {
      const double d = c.p(rule.points[q]) - shift - coeffs.dot(basis.evaluate(rule.points[q]));
      total += rule.weights[q] * d * d;
    }
  }
  return std::sqrt(total);
}

double divergence_measure(const VemSpace& space, const Vector& uh) {
  double worst = 0.;
  for (int cell = 0; cell < space.mesh().n_cells(); ++cell) {
    const LocalProjections& P = space.cell(cell);
    const std::vector<int>& l2g = space.l2g(cell);
    Vector loc(l2g.size());
    for (size_t i = 0; i < l2g.size(); ++i) loc[i] = uh[l2g[i]];
    worst = std::max(worst, P.diameter * (P.div_coeffs * loc).lpNorm<Eigen::Infinity>());
  }
  const double umax = uh.lpNorm<Eigen::Infinity>();
  return umax > 0. ? worst / umax : worst;
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& e, int npoints) {
  const int n = static_cast<int>(h.size());
  if (n != static_cast<int>(e.size()) || npoints < 2 || npoints > n)
    throw std::invalid_argument("fit_slope: need at least two points");
  double sx = 0., sy = 0., sxx = 0., sxy = 0.;
  for (int i = n - npoints; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = npoints;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double report_slope(const std::vector<double>& h, const std::vector<double>& e) {
  const int n = static_cast<int>(h.size());
  return fit_slope(h, e, std::max(n - 1, 2));
}

PolyMesh family_mesh(const std::string& family, int n, const std::string& file) {
  if (family == "structured") return generate_structured_cubes(n);
  if (family == "tetra") return generate_kuhn_tetra(n);
  if (family == "files") return load_json_mesh(file);
  throw std::invalid_argument("unknown mesh family: " + family);
}

ErrorReport run_convergence(const std::string& case_name, const std::string& family, int k, int levels,
                            const ConvergenceOptions& opt) {
  if (levels < 1) throw std::invalid_argument("levels must be positive");
  ErrorReport rep;
  rep.case_name = case_name;
  rep.family = family;
  rep.k = k;
  const ManufacturedCase mc = make_case(case_name, k, opt.nu);
  const ProblemSpec spec = mc.problem(opt.stabilization);
  for (int l = 1; l <= levels; ++l) {
    const int n = static_cast<int>(l - 1) < static_cast<int>(opt.sizes.size()) ? opt.sizes[l - 1] : (1 << l);
    std::string file;
    if (family == "files") {
      if (l > static_cast<int>(opt.mesh_files.size())) throw std::invalid_argument("not enough mesh files");
      file = opt.mesh_files[l - 1];
    }
    const PolyMesh mesh = family_mesh(family, n, file);
    const auto t0 = std::chrono::steady_clock::now();
    const VemSpace space(mesh, k);
    const FlowSolution sol =
        mc.navier_stokes ? solve_navier_stokes(space, spec, opt.newton) : solve_stokes(space, spec);
    const auto t1 = std::chrono::steady_clock::now();
    ErrorRow row;
    row.level = l;
    row.h = mesh_size(mesh);
    row.ndof_u = space.vmap().size();
    row.ndof_p = space.qmap().size();
    row.e_h1u = error_h1_velocity(space, sol.u, mc);
    row.e_l2p = error_l2_pressure(space, sol.p, mc, !mc.neumann);
    row.newton_iters = sol.newton_iterations;
    row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    row.divfree = divergence_measure(space, sol.u);
    rep.rows.push_back(row);
  }
  if (rep.rows.size() >= 3) {
    std::vector<double> h, e1, e2;
    for (const ErrorRow& r : rep.rows) {
      h.push_back(r.h);
      e1.push_back(r.e_h1u);
      e2.push_back(r.e_l2p);
    }
    rep.slope_h1u = report_slope(h, e1);
    rep.slope_l2p = report_slope(h, e2);
  }
  return rep;
}

std::string report_csv(const ErrorReport& report) {
  std::ostringstream os;
  os << "level,h,ndof_u,ndof_p,eH1u,eL2p,newton_iters,wall_time_s\n";
  char buf[256];
  for (const ErrorRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.12e,%d,%d,%.12e,%.12e,%d,%.6f\n", r.level, r.h, r.ndof_u, r.ndof_p, r.e_h1u,
                  r.e_l2p, r.newton_iters, r.wall_time_s);
    os << buf;
  }
  return os.str();
}

void write_report_csv(const ErrorReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << report_csv(report);
}

ErrorReport read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  ErrorReport rep;
  std::string line;
  std::getline(in, line);
  if (line.rfind("level,h,", 0) != 0) throw std::runtime_error(path + ": unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> f;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() < 8) throw std::runtime_error(path + ": short row");
    ErrorRow r;
    r.level = std::stoi(f[0]);
    r.h = std::stod(f[1]);
    r.ndof_u = std::stoi(f[2]);
    r.ndof_p = std::stoi(f[3]);
    r.e_h1u = std::stod(f[4]);
    r.e_l2p = std::stod(f[5]);
    r.newton_iters = std::stoi(f[6]);
    r.wall_time_s = std::stod(f[7]);
    rep.rows.push_back(r);
  }
  if (rep.rows.size() >= 3) {
    std::vector<double> h, e1, e2;
    for (const ErrorRow& r : rep.rows) {
      h.push_back(r.h);
      e1.push_back(r.e_h1u);
      e2.push_back(r.e_l2p);
    }
    rep.slope_h1u = report_slope(h, e1);
    rep.slope_l2p = report_slope(h, e2);
  }
  return rep;
}

std::string report_json(const ErrorReport& report) {
  nlohmann::json j;
  j["case"] = report.case_name;
  j["family"] = report.family;
  j["k"] = report.k;
  j["rows"] = nlohmann::json::array();
  for (const ErrorRow& r : report.rows)
    j["rows"].push_back({{"level", r.level}, {"h", r.h}, {"ndof_u", r.ndof_u}, {"ndof_p", r.ndof_p},
                         {"eH1u", r.e_h1u}, {"eL2p", r.e_l2p}, {"newton_iters", r.newton_iters},
                         {"wall_time_s", r.wall_time_s}, {"divfree", r.divfree}});
  j["slope_eH1u"] = report.slope_h1u ? nlohmann::json(*report.slope_h1u) : nlohmann::json();
  j["slope_eL2p"] = report.slope_l2p ? nlohmann::json(*report.slope_l2p) : nlohmann::json();
  return j.dump(2);
}

std::string solution_json(const VemSpace& space, const FlowSolution& sol, const std::string& case_name) {
  nlohmann::json j;
  j["case"] = case_name;
  j["k"] = space.k();
  j["n_cells"] = space.mesh().n_cells();
  j["newton_iterations"] = sol.newton_iterations;
  j["converged"] = sol.converged;
  j["increments"] = sol.increments;
  j["linear_residual"] = sol.linear_residual;
  j["u"] = std::vector<double>(sol.u.data(), sol.u.data() + sol.u.size());
  j["p"] = std::vector<double>(sol.p.data(), sol.p.data() + sol.p.size());
  return j.dump(1);
}

std::string solution_cells_csv(const VemSpace& space, const FlowSolution& sol) {
  std::ostringstream os;
  os << "cell,x,y,z,u_x,u_y,u_z,p_mean\n";
  const Vector pm = pressure_cell_means(space, sol.p);
  char buf[256];
  for (int cell = 0; cell < space.mesh().n_cells(); ++cell) {
    const LocalProjections& P = space.cell(cell);
    const std::vector<int>& l2g = space.l2g(cell);
    Vector loc(l2g.size());
    for (size_t i = 0; i < l2g.size(); ++i) loc[i] = sol.u[l2g[i]];
    const MonomialBasis3 basis(space.k(), P.center, P.diameter);
    const Vec3 x = space.mesh().cell_geometry(cell).barycenter;
    const Vec3 u = eval_vector_poly(P.pi0 * loc, basis, x);
    std::snprintf(buf, sizeof buf, "%d,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e\n", cell, x[0], x[1], x[2], u[0],
                  u[1], u[2], pm[cell]);
    os << buf;
  }
  return os.str();
}

} // namespace dfvem
