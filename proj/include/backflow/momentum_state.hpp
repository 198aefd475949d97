#pragma once

#include <complex>
#include <span>
#include <vector>

namespace backflow {

/// One c * p^n * exp(-b p) contribution to a momentum amplitude.
struct MomentumTerm {
  std::complex<double> coeff;
  int power = 0;
  double decay = 1.0;
};

/// Positive-momentum amplitude phi(p) = sum_k c_k p^{n_k} exp(-b_k p) for p > 0,
/// zero for p < 0. Units are alpha = hbar = m = 1.
///
/// Construction validates that there is at least one term, every decay is
/// positive and finite, and every power is non-negative; otherwise it throws
/// InvariantViolation.
class MomentumAmplitude {
 public:
  explicit MomentumAmplitude(std::vector<MomentumTerm> terms);

  std::span<const MomentumTerm> terms() const noexcept { return terms_; }

  std::complex<double> evaluate(double p) const;

  /// Closed-form integral of |phi|^2 over p > 0.
  double norm_squared() const;

  /// Copy rescaled to unit norm. Throws ZeroState when the norm vanishes.
  MomentumAmplitude normalized() const;

  MomentumAmplitude scaled(std::complex<double> factor) const;

  /// Upper bound on the integral of |phi(p)| over [cutoff, +inf).
  double tail_bound(double cutoff) const;

  /// Smallest power among terms whose coefficients do not cancel, and the
  /// summed coefficient at that power: phi(p) ~ leading_coeff * p^leading_power
  /// as p -> 0+. Governs the |x|^-(2n+2) decay of the position density.
  int leading_power() const;
  std::complex<double> leading_coeff() const;

 private:
  std::vector<MomentumTerm> terms_;
};

/// The two-term reference state
/// (18/sqrt(35)) p (exp(-p) - exp(-p/2)/6), unit norm.
MomentumAmplitude bm94_reference();

}  // namespace backflow
