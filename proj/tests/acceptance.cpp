// Acceptance run: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "reproduction.hpp"

using namespace dfvem;
using namespace testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int n_fail = 0;

void report(int id, const std::string& title, Outcome& o) {
  std::printf("criterion %2d: %s  %s |%s\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), o.detail.str().c_str());
  std::fflush(stdout);
  if (!o.pass) ++n_fail;
}

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

double rate(const ErrorRow& a, const ErrorRow& b, bool velocity) {
  const double ea = velocity ? a.e_h1u : a.e_l2p, eb = velocity ? b.e_h1u : b.e_l2p;
  return std::log(ea / eb) / std::log(a.h / b.h);
}

// Largest divergence residual over all full-Dirichlet solves of criteria 1-4.
double divfree_max = 0.;
int divfree_solves = 0;

void record_divfree(const ErrorReport& r) {
  for (const ErrorRow& row : r.rows) {
    divfree_max = std::max(divfree_max, row.divfree);
    ++divfree_solves;
  }
}

ErrorReport run(const std::string& name, const std::string& family, int k, std::vector<int> sizes,
                Stabilization stab = Stabilization::DRecipe) {
  ConvergenceOptions opt;
  opt.sizes = sizes;
  opt.stabilization = stab;
  ErrorReport r = run_convergence(name, family, k, static_cast<int>(sizes.size()), opt);
  if (!make_case(name, k).neumann) record_divfree(r);
  return r;
}

std::pair<double, double> slopes(const ErrorReport& r) { return {*r.slope_h1u, *r.slope_l2p}; }

// Random tetrahedron: a perturbed regular one under a random affine map.
PolyMesh random_tet(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  std::array<Vec3, 4> v{Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  for (Vec3& p : v) p += Vec3(u(rng), u(rng), u(rng));
  const auto map = random_affine(rng);
  for (Vec3& p : v) p = map(p);
  return build_tetra_mesh({v[0], v[1], v[2], v[3]}, {{0, 1, 2, 3}});
}

} // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::pair<double, double> base_slopes;

  // 1. Stokes convergence.
  {
    Outcome o;
    const ErrorReport r2 = run("ex1-stokes", "structured", 2, {2, 4, 8});
    base_slopes = slopes(r2);
    o.detail << " k=2 slopes eH1u " << fmt(base_slopes.first) << " eL2p " << fmt(base_slopes.second);
    o.require(in_range(base_slopes.first, 1.8, 2.3), "k=2 eH1u slope in [1.8, 2.3]");
    o.require(in_range(base_slopes.second, 1.8, 2.3), "k=2 eL2p slope in [1.8, 2.3]");
    const ErrorReport r3 = run("ex1-stokes", "structured", 3, {2, 4});
    const double su = rate(r3.rows[0], r3.rows[1], true), sp = rate(r3.rows[0], r3.rows[1], false);
    o.detail << "; k=3 structured rates " << fmt(su) << " " << fmt(sp);
    o.require(su >= 2.6 && sp >= 2.6, "k=3 structured rate >= 2.6");
    const ErrorReport t3 = run("ex1-stokes", "tetra", 3, {2, 3});
    const double tu = rate(t3.rows[0], t3.rows[1], true), tp = rate(t3.rows[0], t3.rows[1], false);
    o.detail << "; k=3 tetra rates " << fmt(tu) << " " << fmt(tp);
    o.require(tu >= 2.6 && tp >= 2.6, "k=3 tetra rate >= 2.6");
    report(1, "Stokes convergence", o);
  }

  // 2. Navier-Stokes convergence.
  {
    Outcome o;
    const ErrorReport r = run("ex2-ns", "structured", 2, {2, 4, 8});
    const auto s = slopes(r);
    int iters = 0;
    for (const ErrorRow& row : r.rows) iters = std::max(iters, row.newton_iters);
    o.detail << " slopes eH1u " << fmt(s.first) << " eL2p " << fmt(s.second) << "; max Newton iterations " << iters;
    o.require(in_range(s.first, 1.8, 2.3), "eH1u slope in [1.8, 2.3]");
    o.require(in_range(s.second, 1.8, 2.3), "eL2p slope in [1.8, 2.3]");
    o.require(iters <= 10, "Newton iterations <= 10");
    report(2, "Navier-Stokes convergence", o);
  }

  // 3. Polynomial pressure benchmark.
  {
    Outcome o;
    const ErrorReport s = run("ex3-p1", "structured", 2, {3});
    const ErrorReport t = run("ex3-p1", "tetra", 2, {2});
    o.detail << " eH1u structured " << fmt(s.rows[0].e_h1u) << " tetra " << fmt(t.rows[0].e_h1u);
    o.require(s.rows[0].e_h1u <= 1e-9 && t.rows[0].e_h1u <= 1e-9, "eH1u <= 1e-9");
    report(3, "benchmark, polynomial pressure", o);
  }

  // 4. Sinusoidal pressure benchmark.
  {
    Outcome o;
    const ErrorReport r = run("ex3-p2", "structured", 2, {2, 4, 8});
    const auto s = slopes(r);
    o.detail << " slopes eH1u " << fmt(s.first) << " eL2p " << fmt(s.second);
    o.require(in_range(s.first, 3.5, 4.6), "eH1u slope in [3.5, 4.6]");
    o.require(in_range(s.second, 1.8, 2.3), "eL2p slope in [1.8, 2.3]");
    report(4, "benchmark, sinusoidal pressure", o);
  }

  // 5. Complex identities.
  {
    Outcome o;
    std::mt19937 rng(5);
    std::vector<std::pair<std::string, PolyMesh>> meshes;
    meshes.emplace_back("cube", single_cube());
    meshes.emplace_back("tet", single_tet());
    meshes.emplace_back("2x1x1", generate_box(2, 1, 1));
    meshes.emplace_back("cubes3", generate_structured_cubes(3));
    meshes.emplace_back("kuhn2", generate_kuhn_tetra(2));
    meshes.emplace_back("voronoi", load_json_mesh(data_path("voronoi_cell.json")));
    meshes.emplace_back("projective2", transform_mesh(generate_structured_cubes(2), random_projective(rng)));
    int sums = 0;
    for (const auto& [name, m] : meshes)
      for (int k : {2, 3}) {
        const ExactnessCheck c = check_exactness_dims(m, k);
        o.require(c.applicable && c.pass, "alternating sum on " + name + " k=" + std::to_string(k));
        ++sums;
      }
    o.detail << " " << sums << " alternating sums zero;";
    for (int i = 0; i < 3; ++i)
      for (int k : {2, 3}) {
        const VemSpace space(meshes[i].second, k);
        const SurjectivityCheck s = check_div_surjectivity(space);
        o.detail << " " << meshes[i].first << " k=" << k << ": rank " << s.rank.rank << "/" << s.dim_q << " kernel "
                 << s.kernel_dim << "/" << s.expected_kernel << (s.rank.inconclusive ? " (inconclusive)" : "") << ";";
        o.require(s.pass, "rank check on " + meshes[i].first);
      }
    report(5, "exact complex identities", o);
  }

  // 6. Divergence-free velocities (collected from criteria 1-4).
  {
    Outcome o;
    o.detail << " max scaled div coefficient " << fmt(divfree_max) << " over " << divfree_solves << " solves";
    o.require(divfree_solves > 0 && divfree_max <= 1e-9, "divergence <= 1e-9");
    report(6, "divergence-free velocities", o);
  }

  // 7. Projector suite on random cells.
  {
    Outcome o;
    std::mt19937 rng(7);
    const PolyMesh voronoi = load_json_mesh(data_path("voronoi_cell.json"));
    Errors worst;
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 100; ++i) {
      PolyMesh m = [&] {
        switch (i % 4) {
          case 0: return transform_mesh(single_cube(), random_affine(rng));
          case 1: return transform_mesh(transform_mesh(single_cube(), random_projective(rng)), random_affine(rng));
          case 2: return random_tet(rng);
          default: return transform_mesh(voronoi, random_affine(rng));
        }
      }();
      ++counts[i % 4];
      const Errors e = reproduction_errors(m, 2, rng);
      worst.pi_d = std::max(worst.pi_d, e.pi_d);
      worst.pi0 = std::max(worst.pi0, e.pi0);
      worst.pi_nabla = std::max(worst.pi_nabla, e.pi_nabla);
      worst.grad = std::max(worst.grad, e.grad);
      worst.face = std::max(worst.face, e.face);
      worst.idem = std::max(worst.idem, e.idem);
      worst.div = std::max(worst.div, e.div);
    }
    o.detail << " k=2, " << counts[0] << " affine cubes, " << counts[1] << " projective hexahedra, " << counts[2]
             << " tetrahedra, " << counts[3] << " Voronoi cells; max errors PiD " << fmt(worst.pi_d) << " Pi0 "
             << fmt(worst.pi0) << " PiNabla " << fmt(worst.pi_nabla) << " Pi0grad " << fmt(worst.grad) << " face "
             << fmt(worst.face) << " idempotency " << fmt(worst.idem);
    // Degree 3 on a subset, reported only.
    double worst3 = 0.;
    for (int i = 0; i < 20; ++i) {
      const PolyMesh m = i % 2 ? random_tet(rng) : transform_mesh(voronoi, random_affine(rng));
      const Errors e = reproduction_errors(m, 3, rng);
      worst3 = std::max({worst3, e.pi_d, e.pi0, e.pi_nabla, e.grad, e.face, e.idem});
    }
    o.detail << "; k=3 on 20 more cells (not graded) max " << fmt(worst3);
    const double tol = 1e-10;
    o.require(worst.pi_d <= tol && worst.pi0 <= tol && worst.pi_nabla <= tol && worst.grad <= tol && worst.face <= tol,
              "reproduction <= 1e-10");
    o.require(worst.idem <= tol, "idempotency <= 1e-10");
    report(7, "projector suite", o);
  }

  // 8. Patch test.
  {
    Outcome o;
    const PolyMesh hex = distorted_hex();
    const PolyMesh grid = transform_mesh(generate_structured_cubes(2), projective_map(Vec3(0.15, -0.1, 0.2)));
    double eu = 0., ep = 0.;
    for (const PolyMesh* m : {&hex, &grid})
      for (int k : {2, 3})
        for (bool ns : {false, true}) {
          const VemSpace space(*m, k);
          const ManufacturedCase c = make_patch_case(k, *m, ns);
          const FlowSolution s = ns ? solve_navier_stokes(space, c.problem()) : solve_stokes(space, c.problem());
          eu = std::max(eu, error_h1_velocity(space, s.u, c));
          ep = std::max(ep, error_l2_pressure(space, s.p, c, false));
        }
    o.detail << " distorted hexahedron and 2x2x2, k=2,3, Stokes and Navier-Stokes: max eH1u " << fmt(eu) << " eL2p "
             << fmt(ep);
    o.require(eu <= 1e-8 && ep <= 1e-8, "errors <= 1e-8");
    report(8, "patch test", o);
  }

  // 9. Reduced scheme.
  {
    Outcome o;
    const PolyMesh m = generate_structured_cubes(2);
    for (int k : {2, 3}) {
      const VemSpace space(m, k);
      const ReducedComparison r = reduce_and_compare(space, make_case("ex1-stokes", k).problem());
      const int saving = r.full_dofs - r.reduced_dofs;
      const int expected = (2 * dim_poly(k - 1, 3) - 2) * m.n_cells();
      o.detail << " k=" << k << ": du " << fmt(r.velocity_difference) << " dp " << fmt(r.pressure_difference)
               << " saving " << saving << "/" << expected << ";";
      o.require(r.velocity_difference <= 1e-9 && r.pressure_difference <= 1e-9, "agreement <= 1e-9");
      o.require(saving == expected && reduced_saving(space) == expected, "DoF saving");
    }
    report(9, "reduced scheme equivalence", o);
  }

  // 10. Unit stabilization.
  {
    Outcome o;
    ErrorReport r = run("ex1-stokes", "structured", 2, {2, 4, 8}, Stabilization::Unit);
    const auto s = slopes(r);
    const double du = std::abs(s.first - base_slopes.first), dp = std::abs(s.second - base_slopes.second);
    o.detail << " unit-stabilization slopes " << fmt(s.first) << " " << fmt(s.second) << "; changes " << fmt(du) << " "
             << fmt(dp);
    o.require(du < 0.3 && dp < 0.3, "slope change < 0.3");
    report(10, "stabilization robustness", o);
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 10 criteria failed; %.1f s\n", n_fail, secs);
  return n_fail == 0 ? 0 : 1;
}
