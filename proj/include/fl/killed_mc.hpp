#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fl/domain.hpp"

namespace fl {

/// Simulation parameters for the killed process.  The skeleton checks the
/// domain only at multiples of dt, so skeleton survival overestimates true
/// survival; the bias direction is fixed and shrinks with dt.
struct MCConfig {
  std::uint64_t seed = 1;
  long n_paths = 1000;
  double dt = 1e-3;
  double t_max = 1.0;
  Domain domain;
  double alpha = 1.0;
};

void validate(const MCConfig& cfg);

/// Deterministic counter-based generator (splitmix64 core).  Every path gets
/// its own stream derived from (seed, path index), so results are
/// bit-identical for any thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : s_(state) {}
  static Rng for_path(std::uint64_t seed, std::uint64_t path);

  std::uint64_t next_u64();
  double next_unit();    // open (0, 1)
  double next_normal();  // standard normal, Box-Muller
  double next_exp();     // Exp(1)
  /// Standard symmetric alpha-stable, characteristic function e^{-|xi|^alpha}
  /// (Chambers-Mallows-Stuck).
  double next_symmetric_stable(double alpha);
  /// Positive beta-stable with Laplace transform e^{-lambda^beta}, beta in
  /// (0,1) (Kanter's representation).
  double next_one_sided_stable(double beta);
  double next_gamma(double shape);
  double next_beta(double a, double b);

 private:
  std::uint64_t s_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// One increment of X_dt in the given dimension: d=1 direct, d=2 isotropic by
/// subordinating a Gaussian with a positive (alpha/2)-stable time.  Marginal
/// scale dt^{1/alpha}.
Point sample_stable_increment(double alpha, double dt, int dimension,
                              Rng& rng);

/// Euler-skeleton ensemble.  exit_time is the first skeleton time outside D
/// (t_max for right-censored paths, flagged in `censored`); exit_position is
/// the first outside position (last position when censored).  survivors[k]
/// lists the positions of paths still alive at record_times[k], in path
/// order.
struct PathEnsemble {
  MCConfig cfg;
  Point x0{{0.0, 0.0, 0.0}};
  std::vector<double> exit_time;
  std::vector<Point> exit_position;
  std::vector<std::uint8_t> censored;
  std::vector<double> record_times;
  std::vector<std::vector<Point>> survivors;
};

PathEnsemble simulate_killed_paths(const MCConfig& cfg, const Point& x0,
                                   const std::vector<double>& record_times = {});

/// Fraction of paths alive strictly beyond t, with binomial standard error.
double survival_probability(const PathEnsemble& e, double t);
double survival_stderr(const PathEnsemble& e, double t);

/// Histogram estimate of the killed transition density at one time, 1-d
/// domains.  estimates[i] >= 0 and sum estimates[i]*width[i] <= 1; bins with
/// fewer than 30 hits are flagged in low_hits.
struct DensityEstimate {
  std::vector<double> edges;
  double t = 0.0;
  Point x0{{0.0, 0.0, 0.0}};
  std::vector<long> counts;
  std::vector<double> estimates;
  std::vector<double> std_err;
  std::vector<std::uint8_t> low_hits;
  long n_paths = 0;
};

DensityEstimate estimate_transition_density(const MCConfig& cfg,
                                            const Point& x0, double t,
                                            const std::vector<double>& edges);

/// Exact exit point of the alpha-stable process from a ball, sampled from
/// the exit density
///   ((r^2-|x-c|^2)/(|y-c|^2-r^2))^{alpha/2} |x-y|^{-d}  on |y-c| > r.
/// Centered starts reduce to (r/|y-c|)^2 ~ Beta(alpha/2, 1-alpha/2) in the
/// radial variable with a uniform angle; off-center starts are rejection
/// sampled against the centered law.  d <= 2.
Point ball_exit_sample(const Domain& ball, double alpha, const Point& x,
                       Rng& rng);

/// Killed-kernel comparison envelope at C = 1:
///   (1 ^ rho(x)^{alpha/2}/sqrt(t)) (1 ^ rho(y)^{alpha/2}/sqrt(t)) p(t, x-y)
/// with p the free kernel.  The fitted constant is the max ratio of a
/// density estimate to this.
double lemma31_envelope(const Domain& dom, double alpha, double t,
                        const Point& x, const Point& y);

/// CSV: t, survival, stderr over the recorded times (or a uniform grid of at
/// most 128 skeleton times when none were recorded).
void dump_survival_csv(std::ostream& os, const PathEnsemble& e);
/// CSV: bin_center, estimate, stderr, lemma31_envelope.
void dump_density_csv(std::ostream& os, const DensityEstimate& est,
                      const Domain& dom, double alpha);

}  // namespace fl
