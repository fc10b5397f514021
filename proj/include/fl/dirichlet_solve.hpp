#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "fl/domain.hpp"
#include "fl/fraclap.hpp"

namespace fl {

/// (Delta^{alpha/2} - lambda) u = f on the domain, u = 0 outside.  lambda = 0
/// needs a bounded domain (the exterior killing then keeps the discrete
/// operator negative definite).  The grid is taken from f.
struct EllipticProblem {
  Domain domain;
  double alpha = 1.0;
  double lambda = 0.0;
  GridFunction f;
};

/// du/dt = Delta^{alpha/2} u + f on (0, T] from u0, zero exterior values.
/// `forcing(t)` returns nodal values of f(t, .); an empty function is zero
/// forcing.  The grid is taken from u0.
struct ParabolicProblem {
  Domain domain;
  double alpha = 1.0;
  double T = 1.0;
  GridFunction u0;
  std::function<std::vector<double>(double)> forcing;
};

/// Dense samples G(x_i, y_j) of the resolvent kernel: the matrix inverse of
/// (lambda W - S) where S is the weighted operator form and W the cell
/// masses.  Acts on functions through u = G W (-f).
struct GreenFunction {
  GridPtr grid;
  double lambda = 0.0;
  std::size_t n = 0;
  std::vector<double> values;  // n x n, row-major
};

/// Time-indexed solution: states[k] holds the nodal values at times[k];
/// times[0] = 0 carries the initial state.
struct Trajectory {
  GridPtr grid;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

/// Weak solution of the elliptic problem at the nodes: solves
/// (S - lambda W) u = W f by a dense symmetric factorization.
GridFunction solve_elliptic(const EllipticProblem& p);

/// Resolvent kernel samples on the grid; symmetric with nonnegative entries
/// (inverse of an M-matrix).
GreenFunction green_function(const Domain& d, double alpha, double lambda,
                             const GridPtr& grid);

/// Implicit Euler march (Crank-Nicolson behind the flag) with the single
/// factorization of (W - dt S) reused across steps.  Records every state,
/// times 0, dt, ..., T.  Throws at the first non-finite state, naming the
/// step.
Trajectory solve_parabolic(const ParabolicProblem& p, int n_steps,
                           bool crank_nicolson = false);

/// max over recorded t of
///   |<u(t),phi> - <u0,phi> - int_0^t (<u(s), Delta^{alpha/2}phi> +
///    <f(s),phi>) ds|,
/// the operator applied to phi by the pointwise principal-value rule and the
/// time integral by the trapezoid rule.  Writes a warning line when phi is
/// nonzero on the boundary-nearest cells (quadrature degrades there).
double weak_residual(const Trajectory& u, const GridFunction& u0,
                     const std::function<std::vector<double>(double)>& forcing,
                     const std::function<double(double)>& test, double alpha,
                     std::ostream* warnings = nullptr);

/// Transition density samples p(t, x_i, x_j) from the spectral decomposition
/// of S v = mu W v: V e^{t M} V^T with V^T W V = I.  Row-major n x n,
/// symmetric; row i integrated against the cell masses gives the survival
/// probability from x_i.
std::vector<double> heat_kernel_matrix(const DirichletOperator& op, double t);

/// CSV rows "t,x,u", all recorded states.
void dump_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// CSV rows "x,y,g" under the debug convention, row-major order.
void dump_green_csv(std::ostream& os, const GreenFunction& g);

}  // namespace fl
