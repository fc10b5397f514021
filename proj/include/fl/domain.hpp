#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace fl {

/// Point in R^d, d <= 3; trailing coordinates are ignored for lower d.
using Point = std::array<double, 3>;

enum class DomainKind { interval, half_line, ball, half_space };

/// Canonical C^{1,1} domains.  HalfLine is (0, inf) in R^1; HalfSpace(d) is
/// {x_d > 0}; Ball is open.
struct Domain {
  DomainKind kind = DomainKind::interval;
  int dimension = 1;
  double a = -1.0;           // interval endpoints
  double b = 1.0;
  Point center{{0.0, 0.0, 0.0}};  // ball
  double radius = 1.0;            // ball

  static Domain Interval(double a, double b);
  static Domain HalfLine();
  static Domain Ball(const Point& center, double radius, int dimension);
  static Domain HalfSpace(int dimension);
};

bool bounded(const Domain& d);
/// Largest distance-to-boundary value attained in D.  Infinite domains throw.
double inradius(const Domain& d);
/// Lebesgue measure; infinite domains throw.
double volume(const Domain& d);

/// Distance to the boundary for x in D and 0 for x outside, the d_x
/// convention used throughout.
double distance(const Domain& d, const Point& x);
/// 1-d shorthand: the point (x, 0, 0).
double distance(const Domain& d, double x);

/// Graded quadrature grid.  Nodes are stored in the domain's natural 1-d
/// coordinate: position for interval/half-line/half-space (distance from the
/// hyperplane) and radius for balls.  Weights are exact cell measures, so
/// they are positive and sum to the (truncated) volume; `transverse` is the
/// half-space slab cross-section factor already folded into the weights.
struct Grid {
  Domain domain;
  double grading = 2.0;
  double truncation = 0.0;        // 0 for bounded domains
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> dist;       // boundary distance per node
  double transverse = 1.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Function sampled on a grid's nodes.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;
};

/// Builds the graded grid: cell edges are images of a uniform partition under
/// a boundary-clustering map of the given grading exponent, nodes sit at cell
/// parameter midpoints, weights are exact cell measures.  Unbounded domains
/// require `truncation`.  Requires n_nodes >= 16, grading >= 1.
Grid graded_grid(const Domain& d, int n_nodes, double grading,
                 std::optional<double> truncation = std::nullopt);

/// Smallest grading exponent for which the composite rule on n_nodes nodes
/// integrates rho^beta to the given relative tolerance, per the first-cell
/// error model; never below 2.
double recommended_grading(double beta, int n_nodes, double rel_tol = 1e-4);

/// Quadrature of f(node) against the grid weights.
double grid_quadrature(const Grid& g, const std::vector<double>& values);

/// Dyadic-in-distance partition of unity material: shell n is supported in
/// {k1 e^{-n} < rho < k2 e^{-n}} with C^infty smoothstep transitions of width
/// `width` * e^{-n}; consecutive shell plateaus overlap, so the shell sum is
/// >= 1 on the covered distance range.
struct ZetaPartition {
  Domain domain;
  double k1 = 1.0;
  double k2 = 7.38905609893065;  // e^2
  double width = 0.0;            // mollification width scale
  int n_lo = 0;                  // accessible index range, inclusive
  int n_hi = 0;
};

/// Requires k2/k1 > e so that the plateaus can tile.
ZetaPartition build_partition(const Domain& d, double k1, double k2);

/// Shell value as a function of boundary distance.
double zeta(const ZetaPartition& p, int n, double rho);
/// Sum of all accessible shells at this distance.
double zeta_sum(const ZetaPartition& p, double rho);
/// psi(rho) = sum_n e^{-n} zeta_n(rho), the regularized distance profile.
double psi_value(const ZetaPartition& p, double rho);

/// psi sampled on the grid.  Throws if the accessible index range does not
/// cover the grid's distance range.
GridFunction regularized_distance(const Domain& d, const ZetaPartition& p,
                                  const GridPtr& grid);
/// Same on the default grid (4096 nodes, grading 2, truncation 64).
GridFunction regularized_distance(const Domain& d, const ZetaPartition& p);

/// Average of d_x^lambda over the ball B_r(x0) centered at a boundary point,
/// with d_x = 0 outside D.  Requires lambda > -1; the average over the
/// exterior part contributes 0.
double interior_boundary_integral(const Domain& d, double lambda,
                                  const Point& x0, double r);

/// Debug dump, one row per node: node, weight, rho, psi, sum_zeta.
void dump_grid_csv(std::ostream& os, const Grid& g, const ZetaPartition& p);

}  // namespace fl
