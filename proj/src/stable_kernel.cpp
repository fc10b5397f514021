#include "fl/stable_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fl/chebyshev.hpp"
#include "fl/quadrature.hpp"

namespace fl {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

// Scaled radius beyond which the power series replaces the profile.
constexpr double kProfileEnd = 10.0;
// Truncation of exp(-t r^alpha): exp(-46) ~ 1e-20.
constexpr double kLogCut = 46.0;
// Oscillation count past which panel summation is handed to the rotated
// contour (alpha <= 1 only; for alpha > 1 the count stays moderate).
constexpr double kPanelLimit = 600.0;

double surface_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

// |a_k| without the sin factor, on a log scale:
// a_k = (-1)^{k+1} sin(k pi alpha/2) 2^{k alpha}
//       Gamma((d+k alpha)/2) Gamma(k alpha/2 + 1) / (k! pi^{d/2+1}).
double log_series_mag(double alpha, int d, int k) {
  return k * alpha * kLn2 + std::lgamma(0.5 * (d + k * alpha)) +
         std::lgamma(0.5 * k * alpha + 1.0) - std::lgamma(k + 1.0) -
         (0.5 * d + 1.0) * std::log(kPi);
}

double series_sign(double alpha, int k, double* sin_mag) {
  // sin(k pi alpha / 2) with the argument reduced before multiplying by pi.
  const double m = std::fmod(0.5 * k * alpha, 2.0);
  const double s = std::sin(kPi * m);
  *sin_mag = std::abs(s);
  double sgn = (k % 2 == 1) ? 1.0 : -1.0;
  return (s < 0.0) ? -sgn : sgn;
}

// sum_k a_k t^k x^{-d-k alpha} with an extra per-term factor extra(k): the
// shared core of the density tail, the mass tail and the marginal tail.
double series_sum(double alpha, int d, double t, double x,
                  const std::function<double(int)>& extra) {
  const double lt = std::log(t);
  const double lx = std::log(x);
  double sum = 0.0;
  double prev_env = 1e300;
  int small_run = 0;
  for (int k = 1; k <= 160; ++k) {
    const double lmag =
        log_series_mag(alpha, d, k) + k * lt - (d + k * alpha) * lx;
    const double env = std::exp(lmag);
    // Asymptotic regime for alpha >= 1: truncate at the smallest term.
    if (env > prev_env && k > 4) break;
    prev_env = env;
    double sin_mag = 0.0;
    const double sgn = series_sign(alpha, k, &sin_mag);
    sum += sgn * sin_mag * env * extra(k);
    if (env <= 1e-17 * std::abs(sum)) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
  }
  return sum;
}

// Fourier inversion integrand at radius r in frequency space.
double fourier_integrand(double alpha, int d, double t, double x, double r) {
  const double damp = std::exp(-t * std::pow(r, alpha));
  switch (d) {
    case 1:
      return (x == 0.0 ? 1.0 : std::cos(x * r)) * damp / kPi;
    case 2:
      return (x == 0.0 ? 1.0 : std::cyl_bessel_j(0.0, x * r)) * r * damp /
             (2.0 * kPi);
    default:
      if (x == 0.0) return r * r * damp / (2.0 * kPi * kPi);
      return std::sin(x * r) * r * damp / (2.0 * kPi * kPi * x);
  }
}

double direct_panels(double alpha, int d, double t, double x) {
  const double rcut = std::pow(kLogCut / t, 1.0 / alpha);
  std::vector<double> pts;
  pts.push_back(0.0);
  if (x * rcut > 8.0) {
    // Split at (approximate) zeros of the oscillating factor.
    const double offset = (d == 1) ? 0.5 : (d == 2 ? 0.25 : 0.0);
    const double count = x * rcut / kPi;
    if (count > 4.0e5)
      throw QuadratureError("fourier panel budget exceeded; use the contour");
    for (int j = 1; (j - offset) * kPi / x < rcut; ++j)
      pts.push_back((j - offset) * kPi / x);
  }
  pts.push_back(rcut);
  QuadOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-12;
  auto f = [&](double r) { return fourier_integrand(alpha, d, t, x, r); };
  return integrate_panels(f, pts, opt);
}

// Rotated-contour form, valid for alpha <= 1 and x > 0: substituting
// r -> i u / x in the Fourier integral turns the oscillation into decay and
// leaves a fixed-sign sin factor.  At alpha = 1 it reduces to the exact
// Cauchy transform.
double direct_contour(double alpha, int d, double t, double x) {
  const double ca = std::cos(0.5 * kPi * alpha);
  const double sa = std::sin(0.5 * kPi * alpha);
  auto phase = [&](double u) { return t * std::pow(u / x, alpha); };
  std::function<double(double)> f;
  switch (d) {
    case 1:
      f = [=](double u) {
        const double g = phase(u);
        return std::exp(-u - ca * g) * std::sin(sa * g) / (kPi * x);
      };
      break;
    case 2:
      f = [=](double u) {
        if (u == 0.0) return 0.0;
        const double g = phase(u);
        return u * std::cyl_bessel_k(0.0, u) * std::exp(-ca * g) *
               std::sin(sa * g) / (kPi * kPi * x * x);
      };
      break;
    default:
      f = [=](double u) {
        const double g = phase(u);
        return u * std::exp(-u - ca * g) * std::sin(sa * g) /
               (2.0 * kPi * kPi * x * x * x);
      };
  }
  QuadOptions opt;
  opt.abs_tol = 1e-16;
  opt.rel_tol = 1e-12;
  std::vector<double> pts{0.0};
  if (d == 2) {
    // K_0 is log-singular at 0; grade the panels toward it.
    for (double e = 1e-8; e < 1.0; e *= 10.0) pts.push_back(e);
  }
  pts.push_back(1.0);
  pts.push_back(kLogCut);
  return integrate_panels(f, pts, opt);
}

double direct_dispatch(double alpha, int d, double t, double x,
                       DirectMethod method) {
  if (method == DirectMethod::automatic) {
    const double rcut = std::pow(kLogCut / t, 1.0 / alpha);
    const bool heavy = x * rcut / kPi > kPanelLimit;
    method = (heavy && alpha <= 1.0 && x > 0.0) ? DirectMethod::contour
                                                : DirectMethod::panels;
  }
  if (method == DirectMethod::contour) {
    if (alpha > 1.0)
      throw std::invalid_argument("contour evaluation requires alpha <= 1");
    if (x <= 0.0)
      throw std::invalid_argument("contour evaluation requires x != 0");
    return direct_contour(alpha, d, t, x);
  }
  return direct_panels(alpha, d, t, x);
}

// t = 1 radial profile: piecewise Chebyshev interpolant of p_d(1, .) built
// from direct quadrature, refined until the coefficient tail is negligible.
struct Profile {
  std::vector<ChebInterp> segs;

  double operator()(double r) const {
    for (const auto& s : segs)
      if (r <= s.hi()) return s(r);
    return segs.back()(r);
  }
};

std::shared_ptr<const Profile> build_profile(double alpha, int d) {
  auto prof = std::make_shared<Profile>();
  auto value = [&](double r) {
    return direct_dispatch(alpha, d, 1.0, r, DirectMethod::automatic);
  };
  std::function<void(double, double, int)> add = [&](double a, double b,
                                                     int depth) {
    ChebInterp c(value, a, b, 64);
    const double scale = std::max(
        {std::abs(c(a)), std::abs(c(0.5 * (a + b))), std::abs(c(b)), 1e-300});
    if (depth < 5 && c.tail_estimate() > 1e-12 * scale) {
      add(a, 0.5 * (a + b), depth + 1);
      add(0.5 * (a + b), b, depth + 1);
    } else {
      prof->segs.push_back(std::move(c));
    }
  };
  add(0.0, 2.5, 0);
  add(2.5, 5.0, 0);
  add(5.0, 7.5, 0);
  add(7.5, kProfileEnd, 0);
  return prof;
}

std::map<std::pair<double, int>, std::shared_ptr<const Profile>> g_profiles;
std::shared_mutex g_profiles_mutex;

std::shared_ptr<const Profile> profile_for(double alpha, int d) {
  const std::pair<double, int> key{alpha, d};
  {
    std::shared_lock lock(g_profiles_mutex);
    auto it = g_profiles.find(key);
    if (it != g_profiles.end()) return it->second;
  }
  // Built outside the lock; a racing duplicate build produces bit-identical
  // coefficients and the first insert wins.
  auto prof = build_profile(alpha, d);
  std::unique_lock lock(g_profiles_mutex);
  return g_profiles.try_emplace(key, std::move(prof)).first->second;
}

}  // namespace

void validate(const KernelQuery& q) {
  if (!std::isfinite(q.alpha) || !(q.alpha > 0.0) || !(q.alpha < 2.0))
    throw std::invalid_argument("kernel query: alpha must lie in (0, 2)");
  if (q.dimension < 1 || q.dimension > 3)
    throw std::invalid_argument("kernel query: dimension must be 1, 2 or 3");
  if (!std::isfinite(q.t) || !(q.t > 0.0))
    throw std::invalid_argument("kernel query: t must be positive");
  if (!std::isfinite(q.x))
    throw std::invalid_argument("kernel query: x must be finite");
}

double density(const KernelQuery& q) {
  validate(q);
  const double x = std::abs(q.x);
  const double tinv = std::pow(q.t, -1.0 / q.alpha);
  const double y = x * tinv;
  if (y < kProfileEnd) {
    auto prof = profile_for(q.alpha, q.dimension);
    return (*prof)(y)*std::pow(tinv, q.dimension);
  }
  return series_sum(q.alpha, q.dimension, q.t, x, [](int) { return 1.0; });
}

double density_direct(const KernelQuery& q, DirectMethod method) {
  validate(q);
  return direct_dispatch(q.alpha, q.dimension, q.t, std::abs(q.x), method);
}

double density_origin(double alpha, int dimension, double t) {
  validate({alpha, dimension, t, 0.0});
  const double d = dimension;
  return surface_area(dimension) / std::pow(2.0 * kPi, d) *
         std::tgamma(d / alpha) / (alpha * std::pow(t, d / alpha));
}

double scaling_check(double alpha, int dimension, double t, double x) {
  const KernelQuery q{alpha, dimension, t, x};
  validate(q);
  const double tinv = std::pow(t, -1.0 / alpha);
  const KernelQuery scaled{alpha, dimension, 1.0, std::abs(x) * tinv};
  return density_direct(q) /
         (std::pow(tinv, dimension) * density_direct(scaled));
}

EnvelopeResult comparability_envelope(const KernelQuery& q) {
  validate(q);
  const double e =
      q.t / std::pow(std::pow(q.t, 1.0 / q.alpha) + std::abs(q.x),
                     q.dimension + q.alpha);
  return {e, density(q) / e};
}

double marginalize_check(double alpha, int dimension, double t, double x1) {
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("marginalize_check: dimension must be 2 or 3");
  const KernelQuery base{alpha, 1, t, x1};
  validate(base);
  if (x1 == 0.0)
    throw std::invalid_argument("marginalize_check: x1 must be nonzero");
  const double ax = std::abs(x1);
  const double tscale = std::pow(t, 1.0 / alpha);
  QuadOptions opt;
  opt.abs_tol = 1e-300;
  opt.rel_tol = 1e-11;
  double num = 0.0;
  if (dimension == 2) {
    // int_R p_2(t, sqrt(x1^2+u^2)) du on the substitution w = |x1| cosh v,
    // which removes the endpoint derivative singularity; the integrand then
    // decays like exp(-(1+alpha) v) and plain truncation suffices.
    const double span = std::max({ax, tscale, 1.0});
    const double big = span * std::pow(1e12, 1.0 / (1.0 + alpha));
    const double vmax = std::acosh(std::max(big / ax, 2.0));
    auto f = [&](double v) {
      const double c = std::cosh(v);
      return density({alpha, 2, t, ax * c}) * ax * c;
    };
    num = 2.0 * integrate(f, 0.0, vmax, opt);
  } else {
    // int_{R^2} p_3 = 2 pi int_{|x1|}^inf p_3(t, w) w dw: quadrature out to
    // the series window, then the exact termwise tail.
    const double R = std::max(kProfileEnd * tscale, 2.0 * ax);
    auto f = [&](double w) { return density({alpha, 3, t, w}) * w; };
    const double head = integrate(f, ax, R, opt);
    const double tail = series_sum(
        alpha, 3, t, R, [&](int k) { return R * R / (1.0 + k * alpha); });
    num = 2.0 * kPi * (head + tail);
  }
  return num / density(base);
}

double free_mass(double alpha, int dimension) {
  validate({alpha, dimension, 1.0, 0.0});
  auto prof = profile_for(alpha, dimension);
  auto f = [&](double r) { return (*prof)(r)*std::pow(r, dimension - 1); };
  // The integrand carries the interpolant's ~1e-12 wiggle; asking for much
  // more than that only burns the subdivision budget.
  QuadOptions opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-10;
  const std::vector<double> pts{0.0, 0.5, 1.0, 2.5, 5.0, 7.5, kProfileEnd};
  const double head = integrate_panels(f, pts, opt);
  // surf_d int_R^inf r^{d-1} sum_k a_k r^{-d-k alpha} dr, termwise exact.
  const double tail =
      series_sum(alpha, dimension, 1.0, kProfileEnd, [&](int k) {
        return std::pow(kProfileEnd, dimension) / (k * alpha);
      });
  return surface_area(dimension) * (head + tail);
}

double tail_series(double alpha, int dimension, double r) {
  validate({alpha, dimension, 1.0, r});
  if (!(r > 0.0)) throw std::invalid_argument("tail_series: r must be > 0");
  return series_sum(alpha, dimension, 1.0, r, [](int) { return 1.0; });
}

void clear_profile_cache() {
  std::unique_lock lock(g_profiles_mutex);
  g_profiles.clear();
}

}  // namespace fl
