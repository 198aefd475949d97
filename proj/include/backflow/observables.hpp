#pragma once

#include "backflow/numerics.hpp"
#include "backflow/propagator.hpp"

#include <span>
#include <vector>

namespace backflow {

/// Half-line integrals run over |x'| <= kSpatialCutoff; the |x'|^-m density
/// tail beyond it is added analytically.
inline constexpr double kSpatialCutoff = 500.0;

struct HalfLineProbability {
  double value = 0.0;
  /// Quadrature error plus the full size of the analytic tail correction.
  double error = 0.0;
};

double density(const WaveEvaluator& w, double x, double t);

/// Probability current Im(psi* d psi/dx') in alpha^2/(m hbar) units.
double current(const WaveEvaluator& w, double x, double t);

/// Current carried by a single evaluated point.
double current_at(const WavePoint& point);

HalfLineProbability prob_negative_detailed(const WaveEvaluator& w, double t,
                                           const numerics::QuadratureSpec& spec);
HalfLineProbability prob_positive_detailed(const WaveEvaluator& w, double t,
                                           const numerics::QuadratureSpec& spec);

/// Probability of finding the particle on x' < 0 at time t'.
double prob_negative(const WaveEvaluator& w, double t, const numerics::QuadratureSpec& spec);

/// Probability of finding the particle on x' > 0 at time t'.
double prob_positive(const WaveEvaluator& w, double t, const numerics::QuadratureSpec& spec);

/// P1(T') - P1(0); positive values certify backflow.
double delta1(const WaveEvaluator& w, double T, const numerics::QuadratureSpec& spec);

/// -int_0^T' J(0, t') dt'.
double delta1_via_current(const WaveEvaluator& w, double T, const numerics::QuadratureSpec& spec);

/// |d rho/dt' + dJ/dx'| by central differences of step h. Requires t' >= h.
double continuity_residual(const WaveEvaluator& w, double x, double t, double h);

/// Single-particle data on a time grid: the substrate of every N-body quantity.
struct ProbabilitySeries {
  std::vector<double> times;
  std::vector<double> p1;
  std::vector<double> p0;
  std::vector<double> j0;

  std::size_t size() const noexcept { return times.size(); }

  /// Throws InvariantViolation when p1 + p0 drifts from 1 by more than 1e-8 or
  /// a probability leaves [0, 1 + 1e-12]. The grid must also be ascending.
  void check_invariants() const;
};

/// Fills a series on an ascending grid in [0, inf); points are computed in parallel.
ProbabilitySeries build_series(const WaveEvaluator& w, std::span<const double> grid,
                               const numerics::QuadratureSpec& spec);

}  // namespace backflow
