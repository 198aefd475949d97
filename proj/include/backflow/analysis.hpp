#pragma once

#include "backflow/manybody.hpp"
#include "backflow/numerics.hpp"
#include "backflow/propagator.hpp"

#include <string>
#include <vector>

namespace backflow {

/// Both locators of the end of the initial backflow window.
struct BackflowWindow {
  /// Zero of J(0, t') found by root bracketing.
  double current_root = 0.0;
  /// Maximiser of P1(t'), the cross-check.
  double prob_argmax = 0.0;
};

/// Tolerance on |current_root - prob_argmax| accepted by find_t1.
inline constexpr double kT1CrossCheckTolerance = 1e-4;

inline constexpr double kEqualHalvesTolerance = 1e-8;

BackflowWindow locate_backflow_window(const WaveEvaluator& w, double t_hi,
                                      const numerics::QuadratureSpec& spec);

/// t1' = first zero of J(0, t') on (0, t_hi), cross-checked against the
/// maximum of P1. Throws NoBracket when J(0, .) keeps one sign, and
/// InvariantViolation when the two locators disagree by more than 1e-4.
double find_t1(const WaveEvaluator& w, double t_hi, const numerics::QuadratureSpec& spec);

/// P_-^(N)(t1) - P_-^(N)(0).
double delta_n_max(const WaveEvaluator& w, int n, double t1, const numerics::QuadratureSpec& spec);

struct ReportMeta {
  std::string evaluator;
  double t_hi = 0.0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  double bracken_melloy = kBrackenMelloyConstant;
  /// Initial half-line probability the bounds are specialised to: exactly 1/2
  /// when p0(0) is within kEqualHalvesTolerance of it, else p0(0) itself.
  double p0_reference = 0.5;
};

struct BackflowReport {
  double t1_prime = 0.0;
  double t1_cross_check = 0.0;
  double p0_initial = 0.0;
  double p0_at_t1 = 0.0;
  double delta1_max = 0.0;
  std::vector<BoundsRow> rows;
  ReportMeta grid_meta;
};

/// Bounds row with a_N, b_N evaluated at p0(0) = p0_reference (1/2 for the
/// reference state) instead of the computed initial probability.
BoundsRow specialized_bounds(double p0_reference, double p0_start, double p0_end, int n,
                             double delta1_max = kBrackenMelloyConstant);

/// Rows N = 1..n_max of the maximal N-boson backflow with its bounds.
/// P0 is computed once at t' = 0 and once at t1'; the N dependence is arithmetic.
BackflowReport build_report(const WaveEvaluator& w, int n_max, const numerics::QuadratureSpec& spec,
                            double t_hi = 0.1);

}  // namespace backflow
