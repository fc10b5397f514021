#pragma once

namespace fl {

/// Query for the isotropic alpha-stable heat kernel p_d(t, x) with Fourier
/// symbol exp(-t |xi|^alpha).  The kernel is radial; `x` is the radial
/// coordinate and its sign is ignored.
struct KernelQuery {
  double alpha = 1.0;  ///< stability index, in (0, 2) exclusive
  int dimension = 1;   ///< 1, 2 or 3
  double t = 1.0;      ///< time, > 0
  double x = 0.0;      ///< radial coordinate
};

/// Throws std::invalid_argument when the query leaves the supported range.
void validate(const KernelQuery& q);

/// Kernel value through the memoized t=1 radial profile plus exact stable
/// scaling; beyond the profile window the large-|x| power series takes over.
/// This is the fast path used by sweeps.
double density(const KernelQuery& q);

/// Evaluation method for density_direct.  `automatic` picks panel quadrature
/// for mildly oscillatory integrands and the rotated-contour form (alpha <= 1)
/// when the Fourier integrand oscillates too many times to sum stably.
enum class DirectMethod { automatic, panels, contour };

/// Kernel value by direct quadrature of the Fourier inversion integral at the
/// given (t, x).  Independent of the profile cache and of the tail series, so
/// it serves as the cross-check oracle for `density`.  Slow path.
double density_direct(const KernelQuery& q,
                      DirectMethod method = DirectMethod::automatic);

/// p_d(t, 0) in closed form.
double density_origin(double alpha, int dimension, double t);

/// density_direct(t, x) / [t^{-d/alpha} density_direct(1, t^{-1/alpha} x)].
/// Equals 1 in exact arithmetic for every admissible argument; the distance
/// from 1 measures quadrature error only.
double scaling_check(double alpha, int dimension, double t, double x);

struct EnvelopeResult {
  double envelope;  ///< t / (t^{1/alpha} + |x|)^{d+alpha}
  double ratio;     ///< density / envelope
};

/// Two-sided comparability envelope e(t,x) = t (t^{1/alpha} + |x|)^{-d-alpha}
/// and the ratio density/e.  The ratio stays within fixed positive bounds
/// over all (t, x); at x = 0 it equals surf_d Gamma(d/alpha) / ((2 pi)^d alpha).
EnvelopeResult comparability_envelope(const KernelQuery& q);

/// Integrates the trailing coordinates out of p_d(t, .) at first coordinate
/// x1 and divides by p_1(t, x1).  The marginal of a d-dimensional symmetric
/// stable density is the 1-dimensional one, so the exact value is 1 for every
/// alpha.  Requires dimension in {2, 3} and x1 != 0.
double marginalize_check(double alpha, int dimension, double t, double x1);

/// Total mass of p_d(1, .) over R^d: profile quadrature out to the series
/// window plus the exact termwise series tail.  Mass is scale invariant, so
/// t = 1 loses nothing.  Equals 1 up to quadrature error.
double free_mass(double alpha, int dimension);

/// Large-argument power series for p_d(1, r), valid on r >= 10 for the whole
/// alpha range at double precision (convergent for alpha < 1, asymptotic but
/// far below machine epsilon at truncation for alpha >= 1).
double tail_series(double alpha, int dimension, double r);

/// Drops all memoized t=1 profiles (testing hook).
void clear_profile_cache();

}  // namespace fl
