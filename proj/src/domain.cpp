#include "fl/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "fl/quadrature.hpp"

namespace fl {
namespace {

constexpr double kPi = 3.14159265358979323846;

double surface_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

void check_dimension(int d) {
  if (d < 1 || d > 3)
    throw std::invalid_argument("domain: dimension must be 1, 2 or 3");
}

double norm_d(const Point& x, const Point& c, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return std::sqrt(s);
}

// Symmetric boundary-clustering map [0,1] -> [0,1], w ~ s^g near 0.
// Both w and 1-w are kept to full relative accuracy; at strong grading the
// boundary cells live far below one ulp of the absolute coordinate.
struct MapVal {
  double w;
  double cw;  // 1 - w
};

MapVal wmap(double s, double g) {
  const double p = std::pow(s, g);
  const double q = std::pow(1.0 - s, g);
  return {p / (p + q), q / (p + q)};
}

// hi.w - lo.w without cancellation on either end
double wdiff(const MapVal& lo, const MapVal& hi) {
  return lo.w >= 0.5 ? lo.cw - hi.cw : hi.w - lo.w;
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double f1 = std::exp(-1.0 / t);
  const double f2 = std::exp(-1.0 / (1.0 - t));
  return f1 / (f1 + f2);
}

}  // namespace

Domain Domain::Interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("Interval: requires a < b");
  Domain d;
  d.kind = DomainKind::interval;
  d.dimension = 1;
  d.a = a;
  d.b = b;
  return d;
}

Domain Domain::HalfLine() {
  Domain d;
  d.kind = DomainKind::half_line;
  d.dimension = 1;
  return d;
}

Domain Domain::Ball(const Point& center, double radius, int dimension) {
  check_dimension(dimension);
  if (!(radius > 0.0)) throw std::invalid_argument("Ball: radius must be > 0");
  Domain d;
  d.kind = DomainKind::ball;
  d.dimension = dimension;
  d.center = center;
  d.radius = radius;
  return d;
}

Domain Domain::HalfSpace(int dimension) {
  check_dimension(dimension);
  Domain d;
  d.kind = DomainKind::half_space;
  d.dimension = dimension;
  return d;
}

bool bounded(const Domain& d) {
  return d.kind == DomainKind::interval || d.kind == DomainKind::ball;
}

double inradius(const Domain& d) {
  switch (d.kind) {
    case DomainKind::interval: return 0.5 * (d.b - d.a);
    case DomainKind::ball: return d.radius;
    default:
      throw std::invalid_argument("inradius: domain is unbounded");
  }
}

double volume(const Domain& d) {
  switch (d.kind) {
    case DomainKind::interval: return d.b - d.a;
    case DomainKind::ball:
      return surface_area(d.dimension) *
             std::pow(d.radius, d.dimension) / d.dimension;
    default:
      throw std::invalid_argument("volume: domain is unbounded");
  }
}

double distance(const Domain& d, const Point& x) {
  switch (d.kind) {
    case DomainKind::interval:
      return std::max(0.0, std::min(x[0] - d.a, d.b - x[0]));
    case DomainKind::half_line:
      return std::max(0.0, x[0]);
    case DomainKind::ball:
      return std::max(0.0, d.radius - norm_d(x, d.center, d.dimension));
    default:
      return std::max(0.0, x[d.dimension - 1]);
  }
}

double distance(const Domain& d, double x) { return distance(d, {x, 0.0, 0.0}); }

Grid graded_grid(const Domain& dom, int n_nodes, double grading,
                 std::optional<double> truncation) {
  if (n_nodes < 16)
    throw std::invalid_argument("graded_grid: need at least 16 nodes");
  if (!(grading >= 1.0))
    throw std::invalid_argument("graded_grid: grading must be >= 1");
  if (!bounded(dom) && !truncation)
    throw std::invalid_argument(
        "graded_grid: unbounded domain needs a truncation radius");
  if (truncation && !(*truncation > 0.0))
    throw std::invalid_argument("graded_grid: truncation must be > 0");

  Grid g;
  g.domain = dom;
  g.grading = grading;
  g.truncation = bounded(dom) ? 0.0 : *truncation;
  const int n = n_nodes;
  g.nodes.resize(n);
  g.weights.resize(n);
  g.dist.resize(n);

  switch (dom.kind) {
    case DomainKind::interval: {
      const double L = dom.b - dom.a;
      for (int k = 0; k < n; ++k) {
        const MapVal lo = wmap(static_cast<double>(k) / n, grading);
        const MapVal hi = wmap((k + 1.0) / n, grading);
        const MapVal mid = wmap((k + 0.5) / n, grading);
        g.nodes[k] = mid.w <= 0.5 ? dom.a + L * mid.w : dom.b - L * mid.cw;
        g.weights[k] = L * wdiff(lo, hi);
        g.dist[k] = L * std::min(mid.w, mid.cw);
      }
      break;
    }
    case DomainKind::ball: {
      const double R = dom.radius;
      const int d = dom.dimension;
      // cells indexed from the boundary inward, stored radius-ascending;
      // w is the boundary-distance fraction, cw the radius fraction
      for (int k = 0; k < n; ++k) {
        const MapVal lo = wmap(static_cast<double>(k) / n, grading);
        const MapVal hi = wmap((k + 1.0) / n, grading);
        const MapVal mid = wmap((k + 0.5) / n, grading);
        const double r_hi = R * lo.cw;
        const double r_lo = R * hi.cw;
        const double dr = R * wdiff(lo, hi);
        double shell;
        switch (d) {
          case 1: shell = 2.0 * dr; break;
          case 2: shell = kPi * dr * (r_hi + r_lo); break;
          default:
            shell = (4.0 * kPi / 3.0) * dr *
                    (r_hi * r_hi + r_hi * r_lo + r_lo * r_lo);
        }
        const int i = n - 1 - k;
        g.nodes[i] = R * mid.cw;
        g.weights[i] = shell;
        g.dist[i] = R * mid.w;
      }
      break;
    }
    default: {
      // half-line and half-space: one-sided clustering toward the boundary
      const double T = *truncation;
      const double trans =
          dom.kind == DomainKind::half_space
              ? std::pow(2.0 * T, dom.dimension - 1)
              : 1.0;
      g.transverse = trans;
      double lo = 0.0;
      for (int k = 0; k < n; ++k) {
        const double hi = T * std::pow((k + 1.0) / n, grading);
        g.nodes[k] = T * std::pow((k + 0.5) / n, grading);
        g.weights[k] = (hi - lo) * trans;
        g.dist[k] = g.nodes[k];
        lo = hi;
      }
      break;
    }
  }
  return g;
}

double recommended_grading(double beta, int n_nodes, double rel_tol) {
  if (!(beta > -1.0))
    throw std::invalid_argument("recommended_grading: beta must be > -1");
  if (beta >= -0.5) return 2.0;
  // First-cell error model: err ~ (beta+1) 2^{-g beta} n^{-g(beta+1)}.
  const double denom =
      (beta + 1.0) * std::log(static_cast<double>(n_nodes)) +
      beta * std::log(2.0);
  if (denom <= 0.0)
    throw std::invalid_argument(
        "recommended_grading: node count too small for this beta");
  const double g = std::log((beta + 1.0) / (0.3 * rel_tol)) / denom;
  return std::max(2.0, std::ceil(g));
}

double grid_quadrature(const Grid& g, const std::vector<double>& values) {
  if (values.size() != g.weights.size())
    throw std::invalid_argument("grid_quadrature: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += g.weights[i] * values[i];
  return s;
}

ZetaPartition build_partition(const Domain& d, double k1, double k2) {
  if (!(k1 > 0.0) || !(k2 > 0.0))
    throw std::invalid_argument("build_partition: k1, k2 must be positive");
  const double e = std::exp(1.0);
  if (!(k2 / k1 > e))
    throw std::invalid_argument("build_partition: requires k2/k1 > e");
  ZetaPartition p;
  p.domain = d;
  p.k1 = k1;
  p.k2 = k2;
  p.width = std::min(k1 / 4.0, (k2 / e - k1) / 4.0);
  if (bounded(d)) {
    const double rmax = inradius(d);
    p.n_lo = static_cast<int>(
                 std::floor(std::log((k2 - 2.0 * p.width) / rmax))) - 2;
  } else {
    p.n_lo = -50;
  }
  p.n_hi = p.n_lo + 690;
  return p;
}

double zeta(const ZetaPartition& p, int n, double rho) {
  if (!(rho > 0.0)) return 0.0;
  if (n < p.n_lo || n > p.n_hi) return 0.0;
  // cheap log-space rejection; also keeps exp(-n) in range
  if (n < std::log(p.k1 / rho) || n > std::log(p.k2 / rho)) return 0.0;
  const double en = std::exp(static_cast<double>(-n));
  const double a = p.k1 * en;
  const double b = p.k2 * en;
  const double del = p.width * en;
  const double rise = smoothstep((rho - a - del) / del);
  const double fall = 1.0 - smoothstep((rho - b + 2.0 * del) / del);
  return rise * fall;
}

namespace {

template <typename F>
void for_active_shells(const ZetaPartition& p, double rho, F&& f) {
  if (!(rho > 0.0)) return;
  const int lo = std::max(
      p.n_lo,
      static_cast<int>(std::ceil(std::log(p.k1 / rho))) - 1);
  const int hi = std::min(
      p.n_hi,
      static_cast<int>(std::floor(std::log(p.k2 / rho))) + 1);
  for (int n = lo; n <= hi; ++n) f(n);
}

}  // namespace

double zeta_sum(const ZetaPartition& p, double rho) {
  double s = 0.0;
  for_active_shells(p, rho, [&](int n) { s += zeta(p, n, rho); });
  return s;
}

double psi_value(const ZetaPartition& p, double rho) {
  double s = 0.0;
  for_active_shells(p, rho, [&](int n) {
    const double z = zeta(p, n, rho);
    if (z != 0.0) s += std::exp(static_cast<double>(-n)) * z;
  });
  return s;
}

GridFunction regularized_distance(const Domain&, const ZetaPartition& p,
                                  const GridPtr& grid) {
  if (!grid || grid->dist.empty())
    throw std::invalid_argument("regularized_distance: empty grid");
  const auto [mn, mx] = std::minmax_element(grid->dist.begin(),
                                            grid->dist.end());
  // accessible plateaus cover [ (k1+2w) e^{-n_hi}, (k2-2w) e^{-n_lo} ]
  const double cover_hi =
      (p.k2 - 2.0 * p.width) * std::exp(static_cast<double>(-p.n_lo));
  const double cover_lo =
      (p.k1 + 2.0 * p.width) * std::exp(static_cast<double>(-p.n_hi));
  if (*mx > cover_hi || *mn < cover_lo)
    throw std::invalid_argument(
        "regularized_distance: partition index range does not cover the "
        "grid's distance range");
  GridFunction f;
  f.grid = grid;
  f.values.resize(grid->dist.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = psi_value(p, grid->dist[i]);
  return f;
}

GridFunction regularized_distance(const Domain& d, const ZetaPartition& p) {
  const auto grid = std::make_shared<const Grid>(
      bounded(d) ? graded_grid(d, 4096, 2.0)
                 : graded_grid(d, 4096, 2.0, 64.0));
  return regularized_distance(d, p, grid);
}

double interior_boundary_integral(const Domain& dom, double lambda,
                                  const Point& x0, double r) {
  if (!(lambda > -1.0))
    throw std::invalid_argument(
        "interior_boundary_integral: lambda must be > -1");
  if (!(r > 0.0))
    throw std::invalid_argument("interior_boundary_integral: r must be > 0");
  if (lambda == 0.0) return 1.0;  // d^0 == 1 everywhere

  QuadOptions opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-9;

  auto power = [lambda](double d) {
    return d > 0.0 ? std::pow(d, lambda) : 0.0;
  };

  switch (dom.kind) {
    case DomainKind::interval:
    case DomainKind::half_line: {
      const bool hl = dom.kind == DomainKind::half_line;
      const double scale = hl ? 1.0 : dom.b - dom.a;
      const double bd0 = hl ? 0.0 : dom.a;
      const double bd1 = hl ? 0.0 : dom.b;
      if (std::abs(x0[0] - bd0) > 1e-9 * scale &&
          std::abs(x0[0] - bd1) > 1e-9 * scale)
        throw std::invalid_argument(
            "interior_boundary_integral: x0 is not a boundary point");
      std::vector<double> pts{x0[0] - r};
      for (double brk : {bd0, hl ? x0[0] + r : 0.5 * (dom.a + dom.b), bd1})
        if (brk > pts.front() && brk < x0[0] + r) pts.push_back(brk);
      pts.push_back(x0[0] + r);
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      auto f = [&](double x) { return power(distance(dom, x)); };
      return integrate_panels(f, pts, opt) / (2.0 * r);
    }
    case DomainKind::ball: {
      const double R = dom.radius;
      const int d = dom.dimension;
      if (std::abs(norm_d(x0, dom.center, d) - R) > 1e-9 * R)
        throw std::invalid_argument(
            "interior_boundary_integral: x0 is not a boundary point");
      if (d == 1) {
        // reduce to the interval through the near boundary point
        const Domain iv = Domain::Interval(dom.center[0] - R,
                                           dom.center[0] + R);
        const double xb = x0[0] > dom.center[0] ? iv.b : iv.a;
        return interior_boundary_integral(iv, lambda, {xb, 0.0, 0.0}, r);
      }
      if (r > R)
        throw std::invalid_argument(
            "interior_boundary_integral: ball requires r <= radius");
      if (d == 3)
        // exact: polar angle around x0 with s = boundary distance makes the
        // sphere average of d^lambda elementary
        return 1.5 * std::pow(r, lambda) *
               (1.0 / ((lambda + 1.0) * (lambda + 3.0)) -
                (r / R) / ((lambda + 2.0) * (lambda + 4.0)));
      // d == 2: same substitution; sigma = s / rho puts the singular
      // endpoints at fixed positions, so the cost is uniform in rho.  The
      // upper half runs in tau = sqrt(1 - sigma), which removes the
      // sigma -> 1 inverse-square-root endpoint analytically.
      const std::vector<double> brk = graded_breakpoints(0.0, 0.5, 24);
      const double half_tau = std::sqrt(0.5);
      auto inner = [&](double rho) {
        auto flo = [&](double sig) {
          const double base =
              (R - rho * sig) /
              std::sqrt((2.0 * R + rho * (1.0 - sig)) *
                        (2.0 * R - rho * (1.0 + sig)) *
                        (1.0 - sig * sig));
          return std::pow(sig, lambda) * base;
        };
        auto fhi = [&](double tau) {
          const double t2 = tau * tau;
          const double sig = 1.0 - t2;
          const double base =
              (R - rho * sig) /
              std::sqrt((2.0 * R + rho * t2) *
                        (2.0 * R - rho * (2.0 - t2)) * (2.0 - t2));
          return 2.0 * std::pow(sig, lambda) * base;
        };
        return 4.0 * std::pow(rho, lambda) *
               (integrate_panels(flo, brk, opt) +
                integrate(fhi, 0.0, half_tau, opt));
      };
      auto frho = [&](double rho) { return rho * inner(rho); };
      return integrate(frho, 0.0, r, opt) / (kPi * r * r);
    }
    default: {
      const int d = dom.dimension;
      if (std::abs(x0[d - 1]) > 1e-9)
        throw std::invalid_argument(
            "interior_boundary_integral: x0 is not a boundary point");
      if (d == 1)
        return interior_boundary_integral(Domain::HalfLine(), lambda,
                                          {0.0, 0.0, 0.0}, r);
      auto f = [&](double z) {
        const double cross =
            d == 2 ? 2.0 * std::sqrt(r * r - z * z)
                   : kPi * (r * r - z * z);
        return power(z) * cross;
      };
      const double ball_vol = (d == 3 ? 4.0 / 3.0 : 1.0) * kPi *
                              std::pow(r, d);
      return integrate(f, 0.0, r, opt) / ball_vol;
    }
  }
}

void dump_grid_csv(std::ostream& os, const Grid& g, const ZetaPartition& p) {
  os << "node,weight,rho,psi,sum_zeta\n";
  char buf[200];
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  g.nodes[i], g.weights[i], g.dist[i],
                  psi_value(p, g.dist[i]), zeta_sum(p, g.dist[i]));
    os << buf;
  }
}

}  // namespace fl
