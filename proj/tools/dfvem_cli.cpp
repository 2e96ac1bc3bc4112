#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfvem/complex.hpp"

using namespace dfvem;

namespace {

struct MeshArgs {
  int cubes = 0;
  int tetra = 0;
  std::string file;
  std::string format = "json";

  void add(CLI::App* app) {
    app->add_option("--cubes", cubes, "structured mesh with n^3 cubes");
    app->add_option("--tetra", tetra, "n^3 cubes, six tetrahedra each");
    app->add_option("--mesh", file, "mesh file");
    app->add_option("--format", format, "json or tetra (node file; elements in <stem>.ele)")
        ->check(CLI::IsMember({"json", "tetra"}));
  }

  PolyMesh load() const {
    if (!file.empty()) return load_mesh(file, format == "json" ? MeshFormat::Json : MeshFormat::TetraList);
    if (tetra > 0) return generate_kuhn_tetra(tetra);
    if (cubes > 0) return generate_structured_cubes(cubes);
    throw std::invalid_argument("no mesh given (--cubes, --tetra or --mesh)");
  }
};

Stabilization parse_stab(const std::string& s) { return s == "unit" ? Stabilization::Unit : Stabilization::DRecipe; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divergence-free virtual elements for Stokes and Navier-Stokes"};
  app.require_subcommand(1);
  int status = 0;

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "mesh generation and checks");
  mesh_cmd->require_subcommand(1);
  auto* gen = mesh_cmd->add_subcommand("gen", "generate a mesh of the unit cube");
  int gen_cubes = 2;
  bool gen_tetra = false;
  std::string gen_out;
  gen->add_option("--cubes", gen_cubes, "cubes per direction")->required();
  gen->add_flag("--tetra", gen_tetra, "split each cube into six tetrahedra");
  gen->add_option("--out", gen_out, "output JSON file (default stdout)");
  gen->callback([&] {
    const PolyMesh m = gen_tetra ? generate_kuhn_tetra(gen_cubes) : generate_structured_cubes(gen_cubes);
    write_text(gen_out, mesh_to_json(m));
  });

  auto* check = mesh_cmd->add_subcommand("check", "validate a mesh and report shape-regularity");
  double rho = 0.1;
  std::string check_file, check_format = "json";
  check->add_option("--rho", rho, "minimum edge-to-cell diameter ratio");
  check->add_option("file", check_file, "mesh file")->required();
  check->add_option("--format", check_format)->check(CLI::IsMember({"json", "tetra"}));
  check->callback([&] {
    const PolyMesh m = load_mesh(check_file, check_format == "json" ? MeshFormat::Json : MeshFormat::TetraList);
    const QualityReport q = quality_check(m, rho);
    std::cout << quality_to_json(q) << '\n';
    if (!q.pass) status = 1;
  });

  // dofs
  auto* dofs = app.add_subcommand("dofs", "DoF counts and complex dimensions");
  MeshArgs dofs_mesh;
  int dofs_k = 2;
  dofs_mesh.add(dofs);
  dofs->add_option("--k", dofs_k)->check(CLI::Range(2, 6));
  dofs->callback([&] {
    const PolyMesh m = dofs_mesh.load();
    std::cout << dof_summary_json(m, DofMapV(m, dofs_k), DofMapQ(m, dofs_k)) << '\n';
  });

  // complex-check
  auto* cx = app.add_subcommand("complex-check", "verify the discrete complex identities");
  MeshArgs cx_mesh;
  int cx_k = 2, cx_cap = 3000;
  std::string cx_case;
  cx_mesh.add(cx);
  cx->add_option("--k", cx_k)->check(CLI::Range(2, 6));
  cx->add_option("--max-dofs", cx_cap, "largest velocity space for the dense rank check");
  cx->add_option("--solve", cx_case, "also solve this full-Dirichlet case and check div u_h = 0");
  cx->callback([&] {
    const PolyMesh m = cx_mesh.load();
    const ExactnessCheck ex = check_exactness_dims(m, cx_k);
    const VemSpace space(m, cx_k);
    const SurjectivityCheck s = check_div_surjectivity(space, cx_cap);
    DivFreeCheck d;
    if (!cx_case.empty()) {
      const ManufacturedCase mc = make_case(cx_case, cx_k);
      if (mc.neumann) throw std::invalid_argument("divergence check needs a full-Dirichlet case");
      const ProblemSpec spec = mc.problem();
      const FlowSolution sol = mc.navier_stokes ? solve_navier_stokes(space, spec) : solve_stokes(space, spec);
      d = check_divfree(space, sol.u);
    }
    std::cout << complex_report_json(ex, &s, cx_case.empty() ? nullptr : &d) << '\n';
    if ((ex.applicable && !ex.pass) || (!s.skipped && !s.pass) || (!cx_case.empty() && !d.pass)) status = 1;
  });

  // solve
  auto* solve = app.add_subcommand("solve", "solve a manufactured case on one mesh");
  MeshArgs solve_mesh;
  int solve_k = 2;
  double solve_nu = 1.;
  std::string solve_case = "ex1-stokes", solve_stab = "d-recipe", solve_json, solve_csv, solve_coo;
  bool solve_zero_guess = false;
  solve_mesh.add(solve);
  solve->add_option("--case", solve_case)->check(CLI::IsMember(case_names()));
  solve->add_option("--k", solve_k)->check(CLI::Range(2, 6));
  solve->add_option("--nu", solve_nu)->check(CLI::PositiveNumber);
  solve->add_option("--stab", solve_stab)->check(CLI::IsMember({"d-recipe", "unit"}));
  solve->add_option("--json", solve_json, "write DoF vectors and metadata");
  solve->add_option("--csv", solve_csv, "write cell barycenter samples");
  solve->add_option("--coo", solve_coo, "write A and B as <prefix>_A.coo, <prefix>_B.coo");
  solve->add_flag("--zero-guess", solve_zero_guess, "start Newton from zero instead of the Stokes solution");
  solve->callback([&] {
    const PolyMesh m = solve_mesh.load();
    const VemSpace space(m, solve_k);
    const ManufacturedCase mc = make_case(solve_case, solve_k, solve_nu);
    const ProblemSpec spec = mc.problem(parse_stab(solve_stab));
    if (!solve_coo.empty()) {
      const GlobalSystem sys = assemble_system(space, spec);
      write_coo(sys.A, solve_coo + "_A.coo");
      write_coo(sys.B, solve_coo + "_B.coo");
    }
    NewtonOptions opt;
    opt.zero_initial_guess = solve_zero_guess;
    const FlowSolution sol = mc.navier_stokes ? solve_navier_stokes(space, spec, opt) : solve_stokes(space, spec);
    nlohmann::json j;
    j["case"] = solve_case;
    j["k"] = solve_k;
    j["h"] = mesh_size(m);
    j["ndof_u"] = space.vmap().size();
    j["ndof_p"] = space.qmap().size();
    j["eH1u"] = error_h1_velocity(space, sol.u, mc);
    j["eL2p"] = error_l2_pressure(space, sol.p, mc, !mc.neumann);
    j["divfree"] = divergence_measure(space, sol.u);
    j["newton_iters"] = sol.newton_iterations;
    j["converged"] = sol.converged;
    j["linear_residual"] = sol.linear_residual;
    std::cout << j.dump(2) << '\n';
    if (!solve_json.empty()) write_text(solve_json, solution_json(space, sol, solve_case));
    if (!solve_csv.empty()) write_text(solve_csv, solution_cells_csv(space, sol));
    if (!sol.converged) status = 1;
  });

  // bench
  auto* bench = app.add_subcommand("bench", "convergence studies");
  bench->require_subcommand(1);
  auto* run = bench->add_subcommand("run", "solve a case on a sequence of meshes");
  std::string run_case = "ex1-stokes", run_family = "structured", run_out, run_json, run_stab = "d-recipe";
  int run_k = 2, run_levels = 3;
  ConvergenceOptions run_opt;
  run->add_option("--case", run_case)->check(CLI::IsMember(case_names()));
  run->add_option("--family", run_family)->check(CLI::IsMember({"structured", "tetra", "files"}));
  run->add_option("--k", run_k)->check(CLI::Range(2, 6));
  run->add_option("--levels", run_levels)->check(CLI::PositiveNumber);
  run->add_option("--sizes", run_opt.sizes, "cubes per direction at each level (default 2, 4, 8, ...)");
  run->add_option("--meshes", run_opt.mesh_files, "JSON meshes for the files family, one per level");
  run->add_option("--nu", run_opt.nu)->check(CLI::PositiveNumber);
  run->add_option("--stab", run_stab)->check(CLI::IsMember({"d-recipe", "unit"}));
  run->add_option("--out", run_out, "CSV output (default stdout)");
  run->add_option("--json", run_json, "JSON summary with slopes");
  run->callback([&] {
    run_opt.stabilization = parse_stab(run_stab);
    if (run_family == "files" && run_levels > static_cast<int>(run_opt.mesh_files.size()))
      run_levels = static_cast<int>(run_opt.mesh_files.size());
    const ErrorReport rep = run_convergence(run_case, run_family, run_k, run_levels, run_opt);
    write_text(run_out, report_csv(rep));
    if (!run_json.empty()) write_text(run_json, report_json(rep));
    if (!run_out.empty()) std::cout << report_json(rep) << '\n';
  });

  auto* rates = bench->add_subcommand("rates", "fitted slopes of a results CSV");
  std::string rates_file;
  rates->add_option("file", rates_file)->required();
  rates->callback([&] {
    ErrorReport rep = read_report_csv(rates_file);
    nlohmann::json j;
    j["levels"] = rep.rows.size();
    j["slope_eH1u"] = rep.slope_h1u ? nlohmann::json(*rep.slope_h1u) : nlohmann::json();
    j["slope_eL2p"] = rep.slope_l2p ? nlohmann::json(*rep.slope_l2p) : nlohmann::json();
    nlohmann::json pairs = nlohmann::json::array();
    for (size_t i = 1; i < rep.rows.size(); ++i) {
      const ErrorRow &a = rep.rows[i - 1], &b = rep.rows[i];
      pairs.push_back({{"levels", {a.level, b.level}},
                       {"eH1u", std::log(a.e_h1u / b.e_h1u) / std::log(a.h / b.h)},
                       {"eL2p", std::log(a.e_l2p / b.e_l2p) / std::log(a.h / b.h)}});
    }
    j["observed_rates"] = pairs;
    std::cout << j.dump(2) << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return status;
}
