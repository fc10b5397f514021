#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fl/config.hpp"

namespace fl {

/// Parameter grids and thresholds for one verification sweep.  Empty grid
/// lists select the built-in defaults of the individual sweep; thresholds
/// are config-overridable and echoed in every report.
struct SweepConfig {
  std::string check_id;
  std::vector<double> alphas, ps, thetas, lambdas, ts, gamma0s, gamma1s;
  std::vector<double> ladder;  // boundary-grading ladder, coarse to fine
  long nodes = 256;
  std::uint64_t seed = 1;
  std::string output_path;

  double kernel_spread_max = 2.0;    // per-t maximum, across the t range
  double operator_spread_max = 0.20; // bank supremum, across lambda or T
  double divergence_flag_tol = 0.05; // ladder disagreement threshold
  double stability_drift_max = 0.02; // refinement drift for stable cases
  double decay_tol = 0.05;           // decay-exponent fit tolerance

  std::uint64_t config_digest = 0;   // hash of the source config
};

/// Grids from [sweep], thresholds from [thresholds], digest recorded.
SweepConfig sweep_from_config(const Config& c, const std::string& check_id);

/// One evaluated case.  `params` keeps insertion order so labels, CSV rows
/// and JSON arrays are deterministic.
struct CaseResult {
  std::vector<std::pair<std::string, double>> params;
  double ratio = 0.0;
  bool flagged = false;
  std::string note;

  std::string label() const;  // "alpha=1 gamma0=1 ..." in params order
};

/// Sweep outcome: every ratio in `cases` is finite or its case is flagged;
/// a failed criterion names what broke in `criteria`.
struct Report {
  std::string check_id;
  std::vector<CaseResult> cases;
  double ratio_max = 0.0;
  double ratio_min = 0.0;
  std::vector<std::pair<std::string, double>> fitted;  // named constants
  std::vector<std::pair<std::string, bool>> criteria;  // name -> pass
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> thresholds;
  std::uint64_t config_digest = 0;
  std::uint64_t seed = 1;

  bool passed() const;  // all criteria pass
};

/// Admissibility of a (gamma0, gamma1) pair: -2/alpha < gamma0 and
/// -2 < gamma1 - gamma0 <= 2 + 2/alpha, boundary exact.
bool gamma_hypothesis_ok(double alpha, double gamma0, double gamma1);

/// Free-kernel integral against boundary-distance weights on the half-line
/// and the interval; the per-t maximum ratio must stay within
/// kernel_spread_max across the t range.  Rejects inadmissible pairs in the
/// grid up front; one built-in probe outside the admissible range is
/// reported informationally.
Report run_kernel_bound_sweep(const SweepConfig& cfg);

/// Elliptic resolvent, parabolic forcing, and initial-data ratios over the
/// pinned function bank; reports per-(p,theta) suprema across lambda and T.
Report run_operator_bound_sweep(const SweepConfig& cfg);

/// Interval resolvent of a fixed positive bump: decay-exponent fits and the
/// weighted-norm table across theta and the grading ladder, with divergence
/// flags from ladder disagreement.
Report run_sharpness_demo(const SweepConfig& cfg);

/// Parabolic run with rough forcing: spatial and temporal weighted Holder
/// norms, and the pointwise-decay envelope fit.
Report run_decay_holder_checks(const SweepConfig& cfg);

/// Elliptic round trip plus the parabolic weak-residual refinement ladder.
Report run_roundtrip_and_residual(const SweepConfig& cfg);

/// CSV: header "check_id,params,ratio,flag", one row per case, %.17g
/// ratios.  JSON: nested by check id with thresholds, criteria, fitted
/// constants, cases, notes, config hash and seed.
void emit_report_csv(const Report& r, std::ostream& os);
void emit_report_json(const Report& r, std::ostream& os);

/// Writes <dir>/<check_id>.csv and/or .json per format ("csv", "json",
/// "both").  Creates the directory; I/O failure raises with the path.
void emit_report(const Report& r, const std::string& dir,
                 const std::string& format);

}  // namespace fl
