#pragma once

#include <complex>
#include <cstdint>
#include <functional>

namespace backflow::numerics {

using Complex = std::complex<double>;
using RealFunction = std::function<double(double)>;

/// Upper bound on the integral of |f| over [cutoff, +inf), as a function of cutoff.
using TailBound = std::function<double(double cutoff)>;

/// How a semi-infinite range [a, +inf) is cut down to a finite one.
///
/// With a `tail_bound` the cutoff is doubled from `initial_length` until the
/// bound drops below abs_tol/10, and the bound is folded into the error
/// estimate. Without one, panels of doubling length are appended until two
/// consecutive panels contribute less than abs_tol/10; the last panel's
/// magnitude is then taken as the tail estimate.
struct CutoffPolicy {
  double initial_length = 16.0;
  double max_length = 1.0e7;
  TailBound tail_bound;
};

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;
  CutoffPolicy cutoff;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Adaptive 21-point Gauss-Kronrod quadrature of f over [a, b].
///
/// `b` may be +infinity, in which case the spec's cutoff policy applies.
/// Converges when the summed error estimate is at most
/// max(abs_tol, rel_tol * |value|). Throws SubdivisionLimit when that is not
/// reached within max_subdivisions and NonFiniteEvaluation when f returns
/// NaN or Inf.
Integral integrate_adaptive(const RealFunction& f, double a, double b,
                            const QuadratureSpec& spec);

/// Brent's method on a sign-changing bracket. Throws NoBracket when
/// g(lo) and g(hi) share a sign.
double find_root_bracketed(const RealFunction& g, double lo, double hi, double tol);

struct Extremum {
  double argmax = 0.0;
  double max = 0.0;
};

/// Brent's parabolic/golden-section search for the maximum of g on [lo, hi].
/// Only a local maximum is guaranteed if g is not unimodal.
Extremum find_max_unimodal(const RealFunction& g, double lo, double hi, double tol);

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
Complex faddeeva_w(Complex z);

/// Scaled complementary error function exp(z^2) erfc(z).
Complex erfcx(Complex z);

/// Complementary error function. Throws Overflow when the result exceeds
/// the double range and InvalidArgument for non-finite input.
Complex erfc(Complex z);

struct AsymptoticSum {
  Complex value;
  /// Magnitude of the first omitted term.
  double truncation_bound = 0.0;
  /// Set when k_max lies past the smallest term of the divergent series.
  bool divergent = false;
};

/// Large-|z| expansion erfc(z) ~ exp(-z^2)/(sqrt(pi) z) sum_k (-1)^k (2k-1)!!/(2z^2)^k,
/// summed for k = 0..k_max. Re(z) < 0 goes through erfc(z) = 2 - erfc(-z).
AsymptoticSum erfc_asymptotic(Complex z, int k_max);

/// Index of the smallest term of the erfc asymptotic series at |z|.
int erfc_asymptotic_optimal_order(Complex z);

/// (2k-1)!! with (-1)!! = 1. Throws Overflow past the uint64 range.
std::uint64_t double_factorial(int k);

/// Exact binomial coefficient. Throws OutOfRange unless 0 <= j <= n and
/// Overflow past the uint64 range.
std::uint64_t binomial(int n, int j);

}  // namespace backflow::numerics
