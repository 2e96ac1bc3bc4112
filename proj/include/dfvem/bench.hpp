#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dfvem/solver.hpp"

namespace dfvem {

/// Closed-form solution (u, p) of the Stokes or Navier-Stokes equations with
/// the load f = -nu div eps(u) + [(grad u) u] - grad p derived from it.
struct ManufacturedCase {
  std::string name;
  double nu = 1.;
  bool navier_stokes = false;
  bool neumann = false; // traction nu eps(u) n + p n on the faces x = 0 and x = 1
  VectorFunction u;
  std::function<Mat3(const Vec3&)> grad_u; // (i,j) = d u_i / d x_j
  VectorFunction lap_u;
  ScalarFunction p;
  VectorFunction grad_p;

  VectorField velocity() const { return {u, grad_u}; }
  Vec3 forcing(const Vec3& x) const;
  ProblemSpec problem(Stabilization stab = Stabilization::DRecipe) const;
};

/// Cases: ex1-stokes, ex1-stokes-neumann, ex2-ns, ex2-stokes, ex3-p1, ex3-p2
/// (Stokes), ex3-p1-ns, ex3-p2-ns. The ex3 velocity depends on k.
ManufacturedCase make_case(const std::string& name, int k, double nu = 1.);
std::vector<std::string> case_names();

/// Divergence-free u in [P_k]^3 with a pressure in P_{k-1} that has zero mean on `mesh`.
ManufacturedCase make_patch_case(int k, const PolyMesh& mesh, bool navier_stokes = false);

/// sqrt(sum_P ||grad u - Pi0_{k-1} grad u_h||^2), quadrature exact to 2k+2.
double error_h1_velocity(const VemSpace& space, const Vector& uh, const ManufacturedCase& c);
/// ||p - p_h||; with `zero_mean` the exact pressure is shifted to zero mean first.
double error_l2_pressure(const VemSpace& space, const Vector& ph, const ManufacturedCase& c, bool zero_mean);
/// Max over cells of h_P * max |div coefficient|, relative to max |u| when nonzero.
double divergence_measure(const VemSpace& space, const Vector& uh);

struct ErrorRow {
  int level = 0;
  double h = 0.;
  int ndof_u = 0, ndof_p = 0;
  double e_h1u = 0., e_l2p = 0.;
  int newton_iters = 0;
  double wall_time_s = 0.;
  double divfree = 0.;
};

struct ErrorReport {
  std::string case_name, family;
  int k = 2;
  std::vector<ErrorRow> rows;
  std::optional<double> slope_h1u, slope_l2p; // present with at least 3 levels
};

/// Least-squares slope of log(e) against log(h) over the last `npoints` entries.
double fit_slope(const std::vector<double>& h, const std::vector<double>& e, int npoints);
/// Slope fitted over the last max(n-1, 2) points.
double report_slope(const std::vector<double>& h, const std::vector<double>& e);

struct ConvergenceOptions {
  double nu = 1.;
  Stabilization stabilization = Stabilization::DRecipe;
  NewtonOptions newton;
  std::vector<std::string> mesh_files; // family "files": JSON meshes, one per level
  std::vector<int> sizes;              // cubes per direction; default 2, 4, 8, ...
};

/// Mesh of the given family at a level (sizes[level-1] cubes per direction).
PolyMesh family_mesh(const std::string& family, int n, const std::string& file = {});

/// Solves one case on a sequence of meshes. Families: structured, tetra, files.
ErrorReport run_convergence(const std::string& case_name, const std::string& family, int k, int levels,
                            const ConvergenceOptions& opt = {});

std::string report_csv(const ErrorReport& report);
void write_report_csv(const ErrorReport& report, const std::string& path);
ErrorReport read_report_csv(const std::string& path);
std::string report_json(const ErrorReport& report);

/// Solution export: DoF vectors and metadata as JSON, cell samples as CSV.
std::string solution_json(const VemSpace& space, const FlowSolution& sol, const std::string& case_name);
std::string solution_cells_csv(const VemSpace& space, const FlowSolution& sol);

} // namespace dfvem
