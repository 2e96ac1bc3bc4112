#pragma once

#include <stdexcept>
#include <vector>

#include "dfvem/forms.hpp"

namespace dfvem {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowSolution {
  Vector u;                      // velocity DoFs (full numbering)
  Vector p;                      // pressure coefficients per cell
  double multiplier = 0.;        // Lagrange multiplier of the zero-mean constraint
  int newton_iterations = 0;     // 0 for Stokes
  bool converged = true;
  std::vector<double> increments; // relative Newton increments
  double linear_residual = 0.;   // largest relative residual of the linear solves
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 25;
  bool zero_initial_guess = false; // default start: the Stokes solution
};

/// Sparse LU solve with one step of iterative refinement. Throws SolverError if
/// the matrix is singular or the relative residual stays above `tol`.
Vector solve_linear(const SparseMatrix& K, const Vector& rhs, double* residual = nullptr, double tol = 1e-10);

FlowSolution solve_stokes(const VemSpace& space, const ProblemSpec& spec);
/// Newton's method started from the Stokes solution; stops when the increment
/// is below tol times the current iterate (free velocity, pressure, multiplier).
/// Without convergence the last iterate is returned with converged = false.
FlowSolution solve_navier_stokes(const VemSpace& space, const ProblemSpec& spec, const NewtonOptions& opt = {});

/// Embedding of the reduced velocity space (D5 removed; the divergence is the
/// constant fixed by the boundary flux) into the full DoF set.
SparseMatrix reduced_embedding(const VemSpace& space);
/// Number of DoFs saved by the reduced pair.
int reduced_saving(const VemSpace& space);

struct ReducedComparison {
  FlowSolution full;
  FlowSolution reduced;      // velocity embedded in the full numbering, pressure as P_{k-1} coefficients
  int full_dofs = 0, reduced_dofs = 0;
  double velocity_difference = 0.; // max |u - E u~| / max |u|
  double pressure_difference = 0.; // max cell-mean difference / max |cell mean|
};

ReducedComparison reduce_and_compare(const VemSpace& space, const ProblemSpec& spec, bool navier_stokes = false,
                                     const NewtonOptions& opt = {});

/// Cell means of a pressure coefficient vector.
Vector pressure_cell_means(const VemSpace& space, const Vector& p);

} // namespace dfvem
