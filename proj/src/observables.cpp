#include "backflow/observables.hpp"

#include "backflow/error.hpp"
#include "backflow/parallel.hpp"

#include <cmath>
#include <sstream>

namespace backflow {

double density(const WaveEvaluator& w, double x, double t) { return std::norm(w.evaluate(x, t)); }

double current_at(const WavePoint& point) { return (std::conj(point.value) * point.gradient).imag(); }

double current(const WaveEvaluator& w, double x, double t) { return current_at(w.evaluate_with_gradient(x, t)); }

namespace {

void require_time(double t, const char* name) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << name << " must be finite and non-negative, got " << t;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

HalfLineProbability integrate_density(const WaveEvaluator& w, double t, double lo, double hi,
                                      double tail, const numerics::QuadratureSpec& spec) {
  const numerics::Integral body = numerics::integrate_adaptive(
      [&](double x) { return std::norm(w.evaluate(x, t)); }, lo, hi, spec);
  return {body.value + tail, body.error + tail};
}

}  // namespace

HalfLineProbability prob_negative_detailed(const WaveEvaluator& w, double t,
                                           const numerics::QuadratureSpec& spec) {
  require_time(t, "t'");
  const double tail = w.density_tail().integral_beyond(kSpatialCutoff);
  return integrate_density(w, t, -kSpatialCutoff, 0.0, tail, spec);
}

HalfLineProbability prob_positive_detailed(const WaveEvaluator& w, double t,
                                           const numerics::QuadratureSpec& spec) {
  require_time(t, "t'");
  // The packet drifts right at speed up to momentum_reach().
  const double cut = kSpatialCutoff + t * w.momentum_reach();
  const double tail = w.density_tail().integral_beyond(cut);
  return integrate_density(w, t, 0.0, cut, tail, spec);
}

double prob_negative(const WaveEvaluator& w, double t, const numerics::QuadratureSpec& spec) {
  return prob_negative_detailed(w, t, spec).value;
}

double prob_positive(const WaveEvaluator& w, double t, const numerics::QuadratureSpec& spec) {
  return prob_positive_detailed(w, t, spec).value;
}

double delta1(const WaveEvaluator& w, double T, const numerics::QuadratureSpec& spec) {
  require_time(T, "T'");
  if (T == 0.0) return 0.0;
  return prob_negative(w, T, spec) - prob_negative(w, 0.0, spec);
}

double delta1_via_current(const WaveEvaluator& w, double T, const numerics::QuadratureSpec& spec) {
  require_time(T, "T'");
  if (T == 0.0) return 0.0;
  const numerics::Integral flux =
      numerics::integrate_adaptive([&](double t) { return current(w, 0.0, t); }, 0.0, T, spec);
  return -flux.value;
}

double continuity_residual(const WaveEvaluator& w, double x, double t, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step h must be positive");
  if (!(t >= h)) throw Error(ErrorCode::InvalidArgument, "continuity residual needs t' >= h");
  const double drho_dt = (density(w, x, t + h) - density(w, x, t - h)) / (2.0 * h);
  const double dj_dx = (current(w, x + h, t) - current(w, x - h, t)) / (2.0 * h);
  return std::abs(drho_dt + dj_dx);
}

void ProbabilitySeries::check_invariants() const {
  const std::size_t n = times.size();
  if (p1.size() != n || p0.size() != n || j0.size() != n) {
    throw Error(ErrorCode::InvariantViolation, "probability series columns differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream msg;
    msg.precision(17);
    if (i > 0 && !(times[i] > times[i - 1])) {
      msg << "time grid is not ascending at index " << i;
      throw Error(ErrorCode::InvariantViolation, msg.str());
    }
    if (std::abs(p1[i] + p0[i] - 1.0) > 1e-8) {
      msg << "p1 + p0 = " << p1[i] + p0[i] << " at t' = " << times[i];
      throw Error(ErrorCode::InvariantViolation, msg.str());
    }
    for (double p : {p1[i], p0[i]}) {
      if (p < 0.0 || p > 1.0 + 1e-12) {
        msg << "probability " << p << " out of range at t' = " << times[i];
        throw Error(ErrorCode::InvariantViolation, msg.str());
      }
    }
  }
}

ProbabilitySeries build_series(const WaveEvaluator& w, std::span<const double> grid,
                               const numerics::QuadratureSpec& spec) {
  ProbabilitySeries s;
  s.times.assign(grid.begin(), grid.end());
  for (double t : s.times) require_time(t, "grid time");
  const std::size_t n = s.times.size();
  s.p1.resize(n);
  s.p0.resize(n);
  s.j0.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const double t = s.times[i];
    s.p1[i] = prob_negative(w, t, spec);
    s.p0[i] = prob_positive(w, t, spec);
    s.j0[i] = current(w, 0.0, t);
  });
  s.check_invariants();
  return s;
}

}  // namespace backflow
