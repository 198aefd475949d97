#include "backflow/analysis.hpp"

#include "backflow/error.hpp"
#include "backflow/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace backflow {

namespace {

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

BackflowWindow locate_backflow_window(const WaveEvaluator& w, double t_hi,
                                      const numerics::QuadratureSpec& spec) {
  if (!(t_hi > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_hi must be positive");
  BackflowWindow out;
  out.current_root = numerics::find_root_bracketed(
      [&](double t) { return current(w, 0.0, t); }, 0.0, t_hi, 1e-12);
  out.prob_argmax =
      numerics::find_max_unimodal([&](double t) { return prob_negative(w, t, spec); }, 0.0, t_hi, 1e-7)
          .argmax;
  return out;
}

double find_t1(const WaveEvaluator& w, double t_hi, const numerics::QuadratureSpec& spec) {
  const BackflowWindow window = locate_backflow_window(w, t_hi, spec);
  if (std::abs(window.current_root - window.prob_argmax) > kT1CrossCheckTolerance) {
    std::ostringstream msg;
    msg << "current root " << window.current_root << " and probability maximum "
        << window.prob_argmax << " disagree";
    throw Error(ErrorCode::InvariantViolation, msg.str());
  }
  return window.current_root;
}

double delta_n_max(const WaveEvaluator& w, int n, double t1, const numerics::QuadratureSpec& spec) {
  const double p0_start = clamp_probability(prob_positive(w, 0.0, spec));
  const double p0_end = clamp_probability(prob_positive(w, t1, spec));
  return prob_at_least_one_negative(p0_end, n) - prob_at_least_one_negative(p0_start, n);
}

BoundsRow specialized_bounds(double p0_reference, double p0_start, double p0_end, int n,
                             double delta1_max) {
  BoundsRow row = check_sandwich(p0_start, p0_end, n, delta1_max);
  const double delta1 = p0_start - p0_end;
  row.a_n = bound_a_n(p0_reference, n);
  row.b_n = bound_b_n(p0_reference, n, delta1_max);
  row.lower = row.b_n * delta1;
  row.upper = row.a_n * delta1;
  if (!row.degenerate) {
    row.inequality_ok = row.lower <= row.delta_n_max && row.delta_n_max < row.upper;
  }
  return row;
}

BackflowReport build_report(const WaveEvaluator& w, int n_max, const numerics::QuadratureSpec& spec,
                            double t_hi) {
  if (n_max < 1) throw Error(ErrorCode::OutOfRange, "n_max must be at least 1");

  BackflowReport report;
  const BackflowWindow window = locate_backflow_window(w, t_hi, spec);
  if (std::abs(window.current_root - window.prob_argmax) > kT1CrossCheckTolerance) {
    std::ostringstream msg;
    msg << "current root " << window.current_root << " and probability maximum "
        << window.prob_argmax << " disagree";
    throw Error(ErrorCode::InvariantViolation, msg.str());
  }
  report.t1_prime = window.current_root;
  report.t1_cross_check = window.prob_argmax;
  report.p0_initial = clamp_probability(prob_positive(w, 0.0, spec));
  report.p0_at_t1 = clamp_probability(prob_positive(w, report.t1_prime, spec));
  report.delta1_max = report.p0_initial - report.p0_at_t1;

  if (std::abs(report.p0_initial - 0.5) > kEqualHalvesTolerance) report.grid_meta.p0_reference = report.p0_initial;
  report.grid_meta.evaluator = w.describe();
  report.grid_meta.t_hi = t_hi;
  report.grid_meta.rel_tol = spec.rel_tol;
  report.grid_meta.abs_tol = spec.abs_tol;

  report.rows.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    report.rows.push_back(specialized_bounds(report.grid_meta.p0_reference, report.p0_initial,
                                             report.p0_at_t1, n, report.grid_meta.bracken_melloy));
  }
  return report;
}

}  // namespace backflow
