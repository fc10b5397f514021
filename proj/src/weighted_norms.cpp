#include "fl/weighted_norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fl/parallel.hpp"

namespace fl {

namespace {

void check_function(const GridFunction& u, const char* who) {
  if (!u.grid || u.grid->nodes.empty())
    throw std::invalid_argument(std::string(who) + ": empty grid");
  if (u.values.size() != u.grid->nodes.size())
    throw std::invalid_argument(std::string(who) +
                                ": values/grid size mismatch");
}

void check_spec(const WeightSpec& spec, const char* who) {
  if (!(spec.p > 1.0) || !std::isfinite(spec.p))
    throw std::invalid_argument(std::string(who) + ": requires p > 1");
  if (!std::isfinite(spec.theta) || !std::isfinite(spec.psi_power))
    throw std::invalid_argument(std::string(who) + ": non-finite weight spec");
}

// psi at the grid nodes through the default shell partition; the coverage
// check inside regularized_distance rejects grids the partition cannot see.
std::vector<double> psi_nodes(const GridFunction& u) {
  const auto part = build_partition(u.grid->domain, 1.0, std::exp(2.0));
  return regularized_distance(u.grid->domain, part, u.grid).values;
}

// log of w * |psi^dpow v|^p * rho^{em}, -inf when v == 0.  Everything runs
// in log space: strongly graded grids put rho near the representable floor,
// where the direct powers would overflow long before the term itself does.
struct LogTerm {
  double p, em, dpow;
  const std::vector<double>* w;
  const std::vector<double>* rho;
  const std::vector<double>* psi;  // null when dpow == 0
  double operator()(std::size_t i, double v) const {
    if (v == 0.0 || (*w)[i] == 0.0)
      return -std::numeric_limits<double>::infinity();
    double lt = std::log((*w)[i]) + p * std::log(std::fabs(v)) +
                em * std::log((*rho)[i]);
    if (psi) lt += p * dpow * std::log((*psi)[i]);
    return lt;
  }
};

// (sum_i exp(lt_i))^{1/p} with max-rescaling, 0 for an empty/all-zero sum.
double lp_from_log_terms(const std::vector<double>& lt, double p) {
  const double m = *std::max_element(lt.begin(), lt.end());
  if (!std::isfinite(m)) return 0.0;
  double s = 0.0;
  for (double v : lt) s += std::exp(v - m);
  return std::exp((m + std::log(s)) / p);
}

double weighted_lp_core(const GridFunction& u,
                        const std::vector<double>& values,
                        const WeightSpec& spec,
                        const std::vector<double>* psi) {
  const Grid& g = *u.grid;
  const double em = spec.theta - g.domain.dimension;
  const LogTerm term{spec.p, em, spec.psi_power, &g.weights, &g.dist, psi};
  std::vector<double> lt(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) lt[i] = term(i, values[i]);
  return lp_from_log_terms(lt, spec.p);
}

// Node gaps x_j - x_i (j > i, nodes ascending) assembled from boundary
// distances: at strong grading the boundary nodes collapse onto the endpoint
// in absolute coordinate while dist keeps full relative accuracy.
struct GapTable {
  const Grid* g;
  double span = 0.0;            // b - a, intervals only
  std::vector<char> left;       // interval: node lies on the left half
  explicit GapTable(const Grid& grid) : g(&grid) {
    if (grid.domain.kind == DomainKind::interval) {
      span = grid.domain.b - grid.domain.a;
      const double mid = 0.5 * (grid.domain.a + grid.domain.b);
      left.resize(grid.nodes.size());
      for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        left[i] = grid.nodes[i] < mid ? 1 : 0;
    }
  }
  double operator()(std::size_t i, std::size_t j) const {
    const auto& rho = g->dist;
    switch (g->domain.kind) {
      case DomainKind::interval:
        if (left[i] && left[j]) return rho[j] - rho[i];
        if (!left[i] && !left[j]) return rho[i] - rho[j];
        return span - rho[i] - rho[j];
      case DomainKind::ball:
        return rho[i] - rho[j];  // nodes ascend in radius
      default:
        return rho[j] - rho[i];
    }
  }
};

// Derivatives of the quadratic through nodes (j-1, j, j+1) evaluated at
// node i; the triple is centered where possible, one-sided at the ends.
void stencil_derivatives(const Grid& g, const std::vector<double>& v,
                         std::vector<double>& d1, std::vector<double>& d2) {
  const std::size_t n = g.nodes.size();
  if (n < 3)
    throw std::invalid_argument("weighted_sobolev_norm: need >= 3 nodes");
  const GapTable gap(g);
  d1.resize(n);
  d2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = std::min(std::max<std::size_t>(i, 1), n - 2);
    const double v0 = v[j - 1], v1 = v[j], v2 = v[j + 1];
    const double h1 = gap(j - 1, j), h2 = gap(j, j + 1);
    const double hs = h1 + h2;
    d2[i] = 2.0 * (v0 / (h1 * hs) - v1 / (h1 * h2) + v2 / (h2 * hs));
    if (i < j) {          // one-sided, evaluated at the left node
      d1[i] = -v0 * (2.0 * h1 + h2) / (h1 * hs) + v1 * hs / (h1 * h2) -
              v2 * h1 / (h2 * hs);
    } else if (i > j) {   // one-sided, evaluated at the right node
      d1[i] = v0 * h2 / (h1 * hs) - v1 * hs / (h1 * h2) +
              v2 * (h1 + 2.0 * h2) / (h2 * hs);
    } else {              // centered
      d1[i] = -v0 * h2 / (h1 * hs) + v1 * (h2 - h1) / (h1 * h2) +
              v2 * h1 / (h2 * hs);
    }
  }
}

}  // namespace

double weighted_lp_norm(const GridFunction& u, const WeightSpec& spec) {
  check_function(u, "weighted_lp_norm");
  check_spec(spec, "weighted_lp_norm");
  std::vector<double> psi;
  if (spec.psi_power != 0.0) psi = psi_nodes(u);
  return weighted_lp_core(u, u.values, spec,
                          spec.psi_power != 0.0 ? &psi : nullptr);
}

double weighted_sobolev_norm(const GridFunction& u, int n,
                             const WeightSpec& spec) {
  check_function(u, "weighted_sobolev_norm");
  check_spec(spec, "weighted_sobolev_norm");
  if (n < 0 || n > 2)
    throw std::invalid_argument("weighted_sobolev_norm: order must be 0..2");
  std::vector<double> psi;
  const std::vector<double>* pp = nullptr;
  if (spec.psi_power != 0.0) {
    psi = psi_nodes(u);
    pp = &psi;
  }
  double total = weighted_lp_core(u, u.values, spec, pp);
  if (n >= 1) {
    const Grid& g = *u.grid;
    std::vector<double> d1, d2;
    stencil_derivatives(g, u.values, d1, d2);
    std::vector<double> scaled(d1.size());
    for (std::size_t i = 0; i < d1.size(); ++i) scaled[i] = g.dist[i] * d1[i];
    total += weighted_lp_core(u, scaled, spec, pp);
    if (n == 2) {
      for (std::size_t i = 0; i < d2.size(); ++i)
        scaled[i] = g.dist[i] * g.dist[i] * d2[i];
      total += weighted_lp_core(u, scaled, spec, pp);
    }
  }
  return total;
}

double besov_seminorm(const GridFunction& u, double gamma,
                      const WeightSpec& spec) {
  check_function(u, "besov_seminorm");
  check_spec(spec, "besov_seminorm");
  if (!(gamma > 0.0) || !(gamma < 1.0))
    throw std::invalid_argument("besov_seminorm: gamma must be in (0,1)");
  const Grid& g = *u.grid;
  const int d = g.domain.dimension;
  if (d != 1)
    throw std::invalid_argument("besov_seminorm: 1-d grids only");
  const double wexp = spec.theta - d + gamma * spec.p;
  if (!(wexp > -1.0))
    throw std::invalid_argument(
        "besov_seminorm: requires theta - d + gamma p > -1");
  const double kexp = d + gamma * spec.p;
  const std::size_t n = g.nodes.size();
  std::vector<double> lw(n), lrho(n);
  for (std::size_t i = 0; i < n; ++i) {
    lw[i] = std::log(g.weights[i]);
    lrho[i] = std::log(g.dist[i]);
  }
  // rows i, inner j > i; each unordered pair counted twice
  const double p = spec.p;
  const GapTable gap(g);
  const auto row = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double du = std::fabs(u.values[i] - u.values[j]);
      if (du == 0.0) continue;
      const double lm = std::min(lrho[i], lrho[j]);
      const double lx = std::log(gap(i, j));
      s += std::exp(lw[i] + lw[j] + wexp * lm + p * std::log(du) - kexp * lx);
    }
    return 2.0 * s;
  };
  const double total = par::reduce_blocks(n, 16, row);
  return std::pow(total, 1.0 / p);
}

double weighted_holder_norm(const GridFunction& u, const HolderSpec& spec) {
  check_function(u, "weighted_holder_norm");
  if (!(spec.delta > 0.0) || !(spec.delta <= 1.0))
    throw std::invalid_argument(
        "weighted_holder_norm: delta must be in (0,1]");
  if (!std::isfinite(spec.weight_power))
    throw std::invalid_argument("weighted_holder_norm: non-finite weight");
  const Grid& g = *u.grid;
  const std::vector<double> psi = psi_nodes(u);
  const std::size_t n = g.nodes.size();
  const double a = spec.weight_power;
  const double del = spec.delta;
  double reach;  // half the domain extent; grid extent when unbounded
  switch (g.domain.kind) {
    case DomainKind::interval: reach = 0.5 * (g.domain.b - g.domain.a); break;
    case DomainKind::ball: reach = g.domain.radius; break;
    default: reach = 0.5 * (g.nodes.back() - g.nodes.front()); break;
  }
  const double sup0 = par::reduce_max(n, [&](std::size_t i) {
    const double v = std::fabs(u.values[i]);
    if (v == 0.0) return 0.0;
    return std::exp(a * std::log(psi[i]) + std::log(v));
  });
  const GapTable gap(g);
  const double sup1 = par::reduce_max(n, [&](std::size_t i) {
    double m = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = gap(i, j);
      if (dx > reach) break;
      const double du = std::fabs(u.values[i] - u.values[j]);
      if (du == 0.0) continue;
      const double lpsi = std::min(std::log(psi[i]), std::log(psi[j]));
      m = std::max(m, std::exp((a + del) * lpsi + std::log(du) -
                               del * std::log(dx)));
    }
    return m;
  });
  return sup0 + sup1;
}

double fit_boundary_decay(const GridFunction& u, double rho_min,
                          double rho_max) {
  check_function(u, "fit_boundary_decay");
  const Grid& g = *u.grid;
  if (!(rho_min > 0.0) || !(rho_max > rho_min))
    throw std::invalid_argument(
        "fit_boundary_decay: requires 0 < rho_min < rho_max");
  if (bounded(g.domain) && !(rho_max <= 0.5 * inradius(g.domain)))
    throw std::invalid_argument(
        "fit_boundary_decay: window must sit inside (0, inradius/2)");
  const bool two_sided = g.domain.kind == DomainKind::interval;
  const double mid = two_sided ? 0.5 * (g.domain.a + g.domain.b) : 0.0;
  double slope_min = std::numeric_limits<double>::infinity();
  const int n_comp = two_sided ? 2 : 1;
  for (int c = 0; c < n_comp; ++c) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (two_sided && ((c == 0) != (g.nodes[i] < mid))) continue;
      const double rho = g.dist[i];
      if (!(rho > rho_min) || !(rho < rho_max)) continue;
      const double v = std::fabs(u.values[i]);
      if (v == 0.0) continue;
      const double lx = std::log(rho), ly = std::log(v);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      ++cnt;
    }
    if (cnt < 8)
      throw std::invalid_argument(
          "fit_boundary_decay: fewer than 8 usable nodes in the window");
    const double den = cnt * sxx - sx * sx;
    slope_min = std::min(slope_min, (cnt * sxy - sx * sy) / den);
  }
  return slope_min;
}

LadderResult assess_ladder(const std::vector<double>& values, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("assess_ladder: tol must be > 0");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("assess_ladder: values must be finite >= 0");
  LadderResult r;
  r.values = values;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double a = values[k], b = values[k + 1];
    const double ratio = a == 0.0 ? (b == 0.0 ? 1.0
                                              : std::numeric_limits<
                                                    double>::infinity())
                                  : b / a;
    r.ratios.push_back(ratio);
    if (a == 0.0 ? b != 0.0 : std::fabs(b - a) > tol * a) r.divergent = true;
  }
  return r;
}

void dump_norm_table_csv(std::ostream& os, const std::vector<NormRow>& rows) {
  os << "norm_kind,p,theta,psi_power,value,refinement_ratio,divergence_flag\n";
  char buf[320];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  r.kind.c_str(), r.p, r.theta, r.psi_power, r.value,
                  r.refinement_ratio, r.divergent ? 1 : 0);
    os << buf;
  }
}

}  // namespace fl
