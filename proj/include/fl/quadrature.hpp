#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace fl {

/// Thrown when an adaptive rule cannot reach the requested tolerance
/// within its subdivision budget.
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-11;
  int max_depth = 48;
  // Hard cap on GK15 panel evaluations for one integrate() call.
  long long eval_budget = 50'000'000;
};

/// Adaptive Gauss–Kronrod 15(7) on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

/// Adaptive integration over consecutive panels [pts[0], pts[1], ..].
/// Breakpoints let callers isolate kinks and oscillation half-periods.
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& pts,
                        const QuadOptions& opt = {});

/// One non-adaptive GK15 pass (used by graded composite rules where the
/// panel structure already controls the error).
double gk15(const std::function<double(double)>& f, double a, double b);

/// Geometrically graded breakpoints from a singular endpoint `sing` toward
/// `far`: |pts - sing| = |far - sing| * ratio^k, k = 0..levels.  Endpoint
/// order matches integration direction (pts.front() nearest `sing`).
std::vector<double> graded_breakpoints(double sing, double far, int levels,
                                       double ratio = 0.5);

}  // namespace fl
