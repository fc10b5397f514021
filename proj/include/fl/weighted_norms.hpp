#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fl/domain.hpp"

namespace fl {

/// Parameters of the weighted Lebesgue scale L_{p,theta}: the measure is
/// rho(x)^{theta-d} dx, and the integrand carries a regularized-distance
/// prefactor psi^{psi_power}.  p > 1 is required throughout.
struct WeightSpec {
  double p = 2.0;
  double theta = 1.0;
  double psi_power = 0.0;
};

/// Parameters of the weighted Holder seminorm: sup |psi^a u| plus the
/// delta-Holder quotient weighted by psi_min^{a+delta}, delta in (0,1].
struct HolderSpec {
  double delta = 0.5;
  double weight_power = 0.0;  // the exponent a
};

/// || psi^{psi_power} u ||_{L_{p,theta}} on u's own grid: the quadrature of
/// |psi^{psi_power} u|^p rho^{theta-d} against the grid cell measures, to the
/// 1/p power.  Terms are accumulated in log space, so strongly graded grids
/// (boundary distances near the representable floor) do not overflow.
double weighted_lp_norm(const GridFunction& u, const WeightSpec& spec);

/// Sum_{k <= n} || psi^{psi_power} rho^k D^k u ||_{L_{p,theta}} for
/// n in {0, 1, 2}.  Derivatives use 3-point stencils on the non-uniform grid,
/// one-sided at the two boundary-nearest nodes; D is the derivative along the
/// grid's own coordinate (the radial derivative for balls).
double weighted_sobolev_norm(const GridFunction& u, int n,
                             const WeightSpec& spec);

/// Discrete Besov-type seminorm, gamma in (0, 1):
///   ( sum_{i != j} w_i w_j min(rho_i, rho_j)^{theta-d+gamma p}
///       |u_i - u_j|^p |x_i - x_j|^{-d-gamma p} )^{1/p},
/// the diagonal cells excluded.  Requires theta - d + gamma p > -1 (the
/// weight must stay integrable) and a 1-d grid.
double besov_seminorm(const GridFunction& u, double gamma,
                      const WeightSpec& spec);

/// sup_i |psi_i^a u_i|  +  sup_{i != j} min(psi_i, psi_j)^{a+delta}
///   |u_i - u_j| / |x_i - x_j|^delta,
/// the pair supremum restricted to |x_i - x_j| <= span/2 where span is the
/// extent of the grid (diameter for bounded domains).
double weighted_holder_norm(const GridFunction& u, const HolderSpec& spec);

/// Least-squares slope of log|u| against log rho over the window
/// rho in (rho_min, rho_max), fitted separately per boundary component
/// (an interval has two); returns the smallest slope.  The window must sit
/// inside (0, inradius/2) and hold at least 8 nodes per component.
double fit_boundary_decay(const GridFunction& u, double rho_min,
                          double rho_max);

/// Divergence assessment over a refinement ladder: `values` holds one norm
/// per level, coarse to fine.  A pair of successive levels "disagrees" when
/// it moves by more than `tol` relative to the earlier level; `divergent` is
/// set when any pair does.  Refining the boundary grading is the instrument
/// that separates the two behaviors: a convergent weighted integral settles
/// (ratios -> 1) while a divergent one keeps growing with every extra decade
/// of resolved distance.
struct LadderResult {
  std::vector<double> values;
  std::vector<double> ratios;  // values[k+1] / values[k]
  bool divergent = false;
};
LadderResult assess_ladder(const std::vector<double>& values,
                           double tol = 0.10);

/// One row of the norm report table.
struct NormRow {
  std::string kind;
  double p = 0.0;
  double theta = 0.0;
  double psi_power = 0.0;
  double value = 0.0;
  double refinement_ratio = 1.0;
  bool divergent = false;
};

/// CSV dump: header "norm_kind,p,theta,psi_power,value,refinement_ratio,
/// divergence_flag", one row per entry, %.17g floats.
void dump_norm_table_csv(std::ostream& os, const std::vector<NormRow>& rows);

}  // namespace fl
