#include <cmath>
#include <stdexcept>

#include "dfvem/bench.hpp"

namespace dfvem {

namespace {

constexpr double pi = 3.14159265358979323846;

// x^n, zero for negative n (those terms carry a vanishing factor).
double ipow(double x, int n) {
  if (n < 0) return 0.;
  double r = 1.;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

Mat3 sym(const Mat3& G) { return 0.5 * (G + G.transpose()); }

void set_trig_velocity(ManufacturedCase& c) {
  c.u = [](const Vec3& x) {
    const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]), sz = std::sin(pi * x[2]);
    const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]), cz = std::cos(pi * x[2]);
    return Vec3(sx * cy * cz, cx * sy * cz, -2. * cx * cy * sz);
  };
  c.grad_u = [](const Vec3& x) {
    const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]), sz = std::sin(pi * x[2]);
    const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]), cz = std::cos(pi * x[2]);
    Mat3 G;
    G << cx * cy * cz, -sx * sy * cz, -sx * cy * sz,
        -sx * sy * cz, cx * cy * cz, -cx * sy * sz,
        2. * sx * cy * sz, 2. * cx * sy * sz, -2. * cx * cy * cz;
    return Mat3(pi * G);
  };
  auto u = c.u;
  c.lap_u = [u](const Vec3& x) { return Vec3(-3. * pi * pi * u(x)); };
}

void set_poly_velocity(ManufacturedCase& c, int k) {
  c.u = [k](const Vec3& x) {
    const double zk1 = ipow(x[2], k - 1);
    return Vec3(k * x[0] * zk1, k * x[1] * zk1,
                (2. - k) * ipow(x[0], k) + (2. - k) * ipow(x[1], k) - 2. * ipow(x[2], k));
  };
  c.grad_u = [k](const Vec3& x) {
    const double zk1 = ipow(x[2], k - 1), zk2 = ipow(x[2], k - 2);
    Mat3 G;
    G << k * zk1, 0., k * (k - 1.) * x[0] * zk2,
        0., k * zk1, k * (k - 1.) * x[1] * zk2,
        (2. - k) * k * ipow(x[0], k - 1), (2. - k) * k * ipow(x[1], k - 1), -2. * k * zk1;
    return G;
  };
  c.lap_u = [k](const Vec3& x) {
    const double f = k * (k - 1.) * (k - 2.);
    const double z3 = ipow(x[2], k - 3);
    return Vec3(f * x[0] * z3, f * x[1] * z3,
                (2. - k) * k * (k - 1.) * (ipow(x[0], k - 2) + ipow(x[1], k - 2)) - 2. * k * (k - 1.) * ipow(x[2], k - 2));
  };
}

void set_sine_pressure(ManufacturedCase& c) {
  c.p = [](const Vec3& x) {
    return std::sin(2. * pi * x[0]) * std::sin(2. * pi * x[1]) * std::sin(2. * pi * x[2]);
  };
  c.grad_p = [](const Vec3& x) {
    const double sx = std::sin(2. * pi * x[0]), sy = std::sin(2. * pi * x[1]), sz = std::sin(2. * pi * x[2]);
    const double cx = std::cos(2. * pi * x[0]), cy = std::cos(2. * pi * x[1]), cz = std::cos(2. * pi * x[2]);
    return Vec3(2. * pi * Vec3(cx * sy * sz, sx * cy * sz, sx * sy * cz));
  };
}

} // namespace

Vec3 ManufacturedCase::forcing(const Vec3& x) const {
  // div eps(u) = lap(u)/2 for divergence-free u.
  Vec3 f = -0.5 * nu * lap_u(x) - grad_p(x);
  if (navier_stokes) f += grad_u(x) * u(x);
  return f;
}

ProblemSpec ManufacturedCase::problem(Stabilization stab) const {
  ProblemSpec s;
  s.nu = nu;
  s.stabilization = stab;
  const ManufacturedCase self = *this;
  s.f = [self](const Vec3& x) { return self.forcing(x); };
  s.dirichlet = u;
  if (neumann) {
    s.is_neumann = [](const Vec3& c, const Vec3&) { return std::abs(c[0]) < 1e-12 || std::abs(c[0] - 1.) < 1e-12; };
    s.traction = [self](const Vec3& x, const Vec3& n) {
      return Vec3(self.nu * sym(self.grad_u(x)) * n + self.p(x) * n);
    };
  }
  return s;
}

std::vector<std::string> case_names() {
  return {"ex1-stokes", "ex1-stokes-neumann", "ex2-ns", "ex2-stokes", "ex3-p1", "ex3-p2", "ex3-p1-ns", "ex3-p2-ns"};
}

ManufacturedCase make_case(const std::string& name, int k, double nu) {
  ManufacturedCase c;
  c.name = name;
  c.nu = nu;
  if (name == "ex1-stokes" || name == "ex1-stokes-neumann") {
    set_trig_velocity(c);
    c.neumann = name == "ex1-stokes-neumann";
    c.p = [](const Vec3& x) { return -pi * std::cos(pi * x[0]) * std::cos(pi * x[1]) * std::cos(pi * x[2]); };
    c.grad_p = [](const Vec3& x) {
      const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]), sz = std::sin(pi * x[2]);
      const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]), cz = std::cos(pi * x[2]);
      return Vec3(pi * pi * Vec3(sx * cy * cz, cx * sy * cz, cx * cy * sz));
    };
  } else if (name == "ex2-ns" || name == "ex2-stokes") {
    set_trig_velocity(c);
    set_sine_pressure(c);
    c.navier_stokes = name == "ex2-ns";
  } else if (name == "ex3-p1" || name == "ex3-p1-ns") {
    set_poly_velocity(c, k);
    c.navier_stokes = name == "ex3-p1-ns";
    const double shift = 3. / (2. * (k + 1.));
    c.p = [k, shift](const Vec3& x) {
      return ipow(x[0], k) * x[1] + ipow(x[1], k) * x[2] + ipow(x[2], k) * x[0] - shift;
    };
    c.grad_p = [k](const Vec3& x) {
      return Vec3(k * ipow(x[0], k - 1) * x[1] + ipow(x[2], k), ipow(x[0], k) + k * ipow(x[1], k - 1) * x[2],
                  ipow(x[1], k) + k * ipow(x[2], k - 1) * x[0]);
    };
  } else if (name == "ex3-p2" || name == "ex3-p2-ns") {
    set_poly_velocity(c, k);
    set_sine_pressure(c);
    c.navier_stokes = name == "ex3-p2-ns";
  } else {
    throw std::invalid_argument("unknown case: " + name);
  }
  return c;
}

ManufacturedCase make_patch_case(int k, const PolyMesh& mesh, bool navier_stokes) {
  ManufacturedCase c;
  c.name = "patch";
  c.navier_stokes = navier_stokes;
  set_poly_velocity(c, k);
  auto q = [k](const Vec3& x) { return x[0] + 2. * x[1] - x[2] + (k >= 3 ? x[0] * x[1] : 0.); };
  double integral = 0., volume = 0.;
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const QuadRule rule = cell_quadrature(mesh, cell, 2);
    for (size_t i = 0; i < rule.size(); ++i) {
      integral += rule.weights[i] * q(rule.points[i]);
      volume += rule.weights[i];
    }
  }
  const double mean = integral / volume;
  c.p = [q, mean](const Vec3& x) { return q(x) - mean; };
  c.grad_p = [k](const Vec3& x) { return Vec3(1. + (k >= 3 ? x[1] : 0.), 2. + (k >= 3 ? x[0] : 0.), -1.); };
  return c;
}

} // namespace dfvem
