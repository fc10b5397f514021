#include "fl/killed_mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "fl/parallel.hpp"
#include "fl/stable_kernel.hpp"

namespace fl {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2)");
}

// Increment of X_dt with the scale factors dt^{1/alpha} (direct) and
// dt^{2/alpha} (subordinator) precomputed by the caller.
Point increment_scaled(double alpha, double direct_scale, double sub_scale,
                       int dimension, Rng& rng) {
  Point inc{{0.0, 0.0, 0.0}};
  if (dimension == 1) {
    inc[0] = direct_scale * rng.next_symmetric_stable(alpha);
    return inc;
  }
  const double s = sub_scale * rng.next_one_sided_stable(0.5 * alpha);
  const double sig = std::sqrt(2.0 * s);
  for (int k = 0; k < dimension; ++k) inc[k] = sig * rng.next_normal();
  return inc;
}

}  // namespace

Rng Rng::for_path(std::uint64_t seed, std::uint64_t path) {
  // Two scramble rounds decorrelate the (seed, path) lattice; distinct inputs
  // stay distinct because every round is a bijection.
  return Rng(mix64(mix64(seed + kGolden) + path * kGolden));
}

std::uint64_t Rng::next_u64() {
  s_ += kGolden;
  return mix64(s_);
}

double Rng::next_unit() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double r = std::sqrt(-2.0 * std::log(next_unit()));
  const double phi = 2.0 * kPi * next_unit();
  cached_normal_ = r * std::sin(phi);
  has_cached_ = true;
  return r * std::cos(phi);
}

double Rng::next_exp() { return -std::log(next_unit()); }

double Rng::next_symmetric_stable(double alpha) {
  check_alpha(alpha);
  const double u = kPi * (next_unit() - 0.5);
  if (alpha == 1.0) return std::tan(u);  // CMS reduces to this, one draw
  const double w = next_exp();
  return std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
         std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
}

double Rng::next_one_sided_stable(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("one-sided index must lie in (0, 1)");
  const double u = kPi * next_unit();
  const double w = next_exp();
  return std::sin(beta * u) / std::pow(std::sin(u), 1.0 / beta) *
         std::pow(std::sin((1.0 - beta) * u) / w, (1.0 - beta) / beta);
}

double Rng::next_gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be > 0");
  if (shape < 1.0)
    return next_gamma(shape + 1.0) * std::pow(next_unit(), 1.0 / shape);
  // Marsaglia-Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = next_normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = next_unit();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double Rng::next_beta(double a, double b) {
  const double x = next_gamma(a);
  const double y = next_gamma(b);
  return x / (x + y);
}

void validate(const MCConfig& cfg) {
  if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(cfg.dt <= cfg.t_max)) throw std::invalid_argument("dt must be <= t_max");
  check_alpha(cfg.alpha);
  if (cfg.domain.dimension > 2)
    throw std::invalid_argument("d = 3 is excluded from path simulation");
}

Point sample_stable_increment(double alpha, double dt, int dimension,
                              Rng& rng) {
  check_alpha(alpha);
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (dimension < 1 || dimension > 3)
    throw std::invalid_argument("dimension must be 1, 2 or 3");
  return increment_scaled(alpha, std::pow(dt, 1.0 / alpha),
                          std::pow(dt, 2.0 / alpha), dimension, rng);
}

PathEnsemble simulate_killed_paths(const MCConfig& cfg, const Point& x0,
                                   const std::vector<double>& record_times) {
  validate(cfg);
  if (!(distance(cfg.domain, x0) > 0.0))
    throw std::invalid_argument("x0 must lie in the open domain");
  const auto n = static_cast<std::size_t>(cfg.n_paths);
  const auto n_steps =
      static_cast<long>(std::ceil(cfg.t_max / cfg.dt - 1e-12));
  const std::size_t n_rec = record_times.size();
  std::vector<long> rec_step(n_rec);
  for (std::size_t k = 0; k < n_rec; ++k) {
    const double t = record_times[k];
    if (!(t >= 0.0) || !(t <= cfg.t_max))
      throw std::invalid_argument("record times must lie in [0, t_max]");
    if (k > 0 && !(t > record_times[k - 1]))
      throw std::invalid_argument("record times must be strictly increasing");
    // Snap to the nearest skeleton time; the skeleton is only defined there.
    rec_step[k] = std::min<long>(n_steps, std::llround(t / cfg.dt));
  }

  PathEnsemble e;
  e.cfg = cfg;
  e.x0 = x0;
  e.record_times = record_times;
  e.exit_time.resize(n);
  e.exit_position.resize(n);
  e.censored.assign(n, 0);

  std::vector<std::uint8_t> alive(n_rec * n, 0);
  std::vector<Point> rec_pos(n_rec * n);

  const Domain& dom = cfg.domain;
  const double alpha = cfg.alpha;
  const int dim = dom.dimension;
  const double direct_scale = std::pow(cfg.dt, 1.0 / alpha);
  const double sub_scale = std::pow(cfg.dt, 2.0 / alpha);

  par::parallel_for(n, [&](std::size_t i) {
    Rng rng = Rng::for_path(cfg.seed, i);
    Point x = x0;
    std::size_t rec = 0;
    while (rec < n_rec && rec_step[rec] == 0) {
      alive[rec * n + i] = 1;
      rec_pos[rec * n + i] = x;
      ++rec;
    }
    long exit_at = -1;
    for (long s = 1; s <= n_steps; ++s) {
      const Point inc = increment_scaled(alpha, direct_scale, sub_scale, dim, rng);
      for (int k = 0; k < dim; ++k) x[k] += inc[k];
      if (!(distance(dom, x) > 0.0)) {
        exit_at = s;
        break;
      }
      while (rec < n_rec && rec_step[rec] == s) {
        alive[rec * n + i] = 1;
        rec_pos[rec * n + i] = x;
        ++rec;
      }
    }
    if (exit_at >= 0) {
      e.exit_time[i] = static_cast<double>(exit_at) * cfg.dt;
    } else {
      e.exit_time[i] = cfg.t_max;
      e.censored[i] = 1;
    }
    e.exit_position[i] = x;
  });

  e.survivors.resize(n_rec);
  for (std::size_t k = 0; k < n_rec; ++k) {
    auto& out = e.survivors[k];
    for (std::size_t i = 0; i < n; ++i)
      if (alive[k * n + i]) out.push_back(rec_pos[k * n + i]);
  }
  return e;
}

double survival_probability(const PathEnsemble& e, double t) {
  if (!(t >= 0.0) || !(t <= e.cfg.t_max))
    throw std::invalid_argument("survival is only observed on [0, t_max]");
  const std::size_t n = e.exit_time.size();
  std::size_t live = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (e.censored[i] || e.exit_time[i] > t) ++live;
  return static_cast<double>(live) / static_cast<double>(n);
}

double survival_stderr(const PathEnsemble& e, double t) {
  const double p = survival_probability(e, t);
  const auto n = static_cast<double>(e.exit_time.size());
  return std::sqrt(p * (1.0 - p) / n);
}

DensityEstimate estimate_transition_density(const MCConfig& cfg,
                                            const Point& x0, double t,
                                            const std::vector<double>& edges) {
  validate(cfg);
  if (cfg.domain.dimension != 1)
    throw std::invalid_argument("density histograms are 1-d only");
  if (!(t > 0.0) || !(t <= cfg.t_max))
    throw std::invalid_argument("t must lie in (0, t_max]");
  if (edges.size() < 2)
    throw std::invalid_argument("need at least two bin edges");
  for (std::size_t j = 1; j < edges.size(); ++j)
    if (!(edges[j] > edges[j - 1]))
      throw std::invalid_argument("bin edges must be strictly increasing");
  if (bounded(cfg.domain)) {
    const double lo = cfg.domain.kind == DomainKind::ball
                          ? cfg.domain.center[0] - cfg.domain.radius
                          : cfg.domain.a;
    const double hi = cfg.domain.kind == DomainKind::ball
                          ? cfg.domain.center[0] + cfg.domain.radius
                          : cfg.domain.b;
    if (edges.front() > lo + 1e-12 || edges.back() < hi - 1e-12)
      throw std::invalid_argument("bins must cover the domain");
  }

  const PathEnsemble e = simulate_killed_paths(cfg, x0, {t});
  const std::size_t nb = edges.size() - 1;
  DensityEstimate est;
  est.edges = edges;
  est.t = t;
  est.x0 = x0;
  est.counts.assign(nb, 0);
  est.n_paths = cfg.n_paths;
  for (const Point& p : e.survivors[0]) {
    const double v = p[0];
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    if (it == edges.begin() || it == edges.end()) continue;
    ++est.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
  }
  est.estimates.resize(nb);
  est.std_err.resize(nb);
  est.low_hits.resize(nb);
  const auto npaths = static_cast<double>(cfg.n_paths);
  for (std::size_t j = 0; j < nb; ++j) {
    const double width = edges[j + 1] - edges[j];
    const double phat = static_cast<double>(est.counts[j]) / npaths;
    est.estimates[j] = phat / width;
    est.std_err[j] = std::sqrt(phat * (1.0 - phat) / npaths) / width;
    est.low_hits[j] = est.counts[j] < 30 ? 1 : 0;
  }
  return est;
}

Point ball_exit_sample(const Domain& ball, double alpha, const Point& x,
                       Rng& rng) {
  if (ball.kind != DomainKind::ball)
    throw std::invalid_argument("ball_exit_sample needs a ball domain");
  if (ball.dimension > 2)
    throw std::invalid_argument("d = 3 is excluded from path simulation");
  check_alpha(alpha);
  if (!(distance(ball, x) > 0.0))
    throw std::invalid_argument("start must lie in the open ball");

  const int dim = ball.dimension;
  const double r = ball.radius;
  Point rel{{0.0, 0.0, 0.0}};
  double m2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    rel[k] = x[k] - ball.center[k];
    m2 += rel[k] * rel[k];
  }
  const double m = std::sqrt(m2);

  // Proposal: the exit law from a centered start, where (r/|y-c|)^2 is
  // Beta(alpha/2, 1 - alpha/2) and the angle is uniform.  Off-center starts
  // accept with probability (|y-c| (r-m) / (r |y-x|))^d against it; the
  // radial factor of the density ratio cancels, so this is exact.
  for (;;) {
    const double tt = rng.next_beta(0.5 * alpha, 1.0 - 0.5 * alpha);
    const double s = r / std::sqrt(tt);
    Point yc{{0.0, 0.0, 0.0}};
    if (dim == 1) {
      yc[0] = rng.next_u64() & 1u ? s : -s;
    } else {
      const double phi = 2.0 * kPi * rng.next_unit();
      yc[0] = s * std::cos(phi);
      yc[1] = s * std::sin(phi);
    }
    if (m == 0.0) {
      Point y = ball.center;
      for (int k = 0; k < dim; ++k) y[k] += yc[k];
      return y;
    }
    double d2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double diff = yc[k] - rel[k];
      d2 += diff * diff;
    }
    double acc = s * (r - m) / (r * std::sqrt(d2));
    if (dim == 2) acc *= acc;
    if (rng.next_unit() < acc) {
      Point y = ball.center;
      for (int k = 0; k < dim; ++k) y[k] += yc[k];
      return y;
    }
  }
}

double lemma31_envelope(const Domain& dom, double alpha, double t,
                        const Point& x, const Point& y) {
  if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
  check_alpha(alpha);
  const double rho_x = distance(dom, x);
  const double rho_y = distance(dom, y);
  const double rt = std::sqrt(t);
  const double fx = std::min(1.0, std::pow(rho_x, 0.5 * alpha) / rt);
  const double fy = std::min(1.0, std::pow(rho_y, 0.5 * alpha) / rt);
  double r2 = 0.0;
  for (int k = 0; k < dom.dimension; ++k) {
    const double diff = x[k] - y[k];
    r2 += diff * diff;
  }
  KernelQuery q;
  q.alpha = alpha;
  q.dimension = dom.dimension;
  q.t = t;
  q.x = std::sqrt(r2);
  return fx * fy * density(q);
}

void dump_survival_csv(std::ostream& os, const PathEnsemble& e) {
  os << "t,survival,stderr\n";
  char buf[128];
  auto row = [&](double t) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t,
                  survival_probability(e, t), survival_stderr(e, t));
    os << buf;
  };
  if (!e.record_times.empty()) {
    for (double t : e.record_times) row(t);
    return;
  }
  const auto n_steps =
      static_cast<long>(std::ceil(e.cfg.t_max / e.cfg.dt - 1e-12));
  const long stride = std::max<long>(1, n_steps / 128);
  for (long s = 0; s <= n_steps; s += stride) row(s * e.cfg.dt);
}

void dump_density_csv(std::ostream& os, const DensityEstimate& est,
                      const Domain& dom, double alpha) {
  os << "bin_center,estimate,stderr,lemma31_envelope\n";
  char buf[192];
  for (std::size_t j = 0; j + 1 < est.edges.size(); ++j) {
    const double c = 0.5 * (est.edges[j] + est.edges[j + 1]);
    const Point y{{c, 0.0, 0.0}};
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", c,
                  est.estimates[j], est.std_err[j],
                  lemma31_envelope(dom, alpha, est.t, est.x0, y));
    os << buf;
  }
}

}  // namespace fl
