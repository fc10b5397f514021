#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "fl/domain.hpp"

namespace fl {

/// Normalization constant of the fractional Laplacian,
/// c_d = 2^alpha Gamma((d+alpha)/2) / (pi^{d/2} |Gamma(-alpha/2)|),
/// so that the principal-value integral has Fourier symbol -|xi|^alpha.
double c_d_constant(double alpha, int dimension);

/// Pointwise principal-value evaluation in d = 1,
///   c_1 PV int (u(x+y) - u(x)) |y|^{-1-alpha} dy.
/// The inner part is the symmetrized second difference, which removes the
/// principal value; beyond `tail_radius` the integrand uses u frozen at the
/// horizon, so the result is exact for functions supported in the horizon
/// (the frozen tail vanishes) and exactly zero for constants.
double apply_pv(const std::function<double(double)>& u, double alpha, double x,
                double tail_radius = 64.0);

/// Discrete Dirichlet-exterior-condition operator on a 1-d grid.  `matrix` is
/// the symmetric weighted form S (dense, row-major): for the node masses w,
///   S = S^T exactly,  off-diagonal >= 0,  diagonal < 0,
///   row i sums to -w_i kappa_i,
/// and W^{-1} S v approximates the operator pointwise at the nodes.  kappa_i
/// is the closed-form exterior killing rate c_1 int_{D^c} |x_i-y|^{-1-alpha}.
struct DirichletOperator {
  GridPtr grid;
  double alpha = 1.0;
  std::vector<double> matrix;   // n x n, row-major
  std::vector<double> killing;  // kappa_i, per node
};

/// Assembles the operator for interval or truncated half-line grids (d = 1
/// only, at most 4096 nodes; the kernel is nonlocal, so the matrix is dense).
DirichletOperator build_dirichlet_operator(const Domain& d, const GridPtr& grid,
                                           double alpha);

/// Function-space action (W^{-1} S) v: operator values at the nodes for the
/// zero-extension of the grid function v.
std::vector<double> apply_operator(const DirichletOperator& op,
                                   const std::vector<double>& values);

/// Fourier-multiplier reference: applies the symbol -|xi|^alpha to u on a
/// uniform periodic box (grid grading must be 1).  Independent oracle for
/// apply_pv on smooth functions supported well inside the box; writes a
/// warning line to `warnings` when the support fills more than 1/4 of it.
GridFunction spectral_reference(const GridFunction& u, double alpha,
                                std::ostream* warnings = nullptr);

/// Debug dump, one row per entry: i, j, entry.
void dump_operator_csv(std::ostream& os, const DirichletOperator& op);

}  // namespace fl
