#pragma once

#include "backflow/momentum_state.hpp"
#include "backflow/numerics.hpp"

#include <complex>
#include <string>
#include <variant>

namespace backflow {

using Complex = std::complex<double>;

/// Lower time limit of the closed-form backend; below it the 1/t' terms
/// cancel too badly and the small-time series must be used.
inline constexpr double kClosedFormTimeFloor = 1e-6;

/// First-omitted-term threshold for a certified small-time series value.
inline constexpr double kSeriesCertificationBound = 1e-10;

/// Wavefunction value and its x'-derivative at one point.
struct WavePoint {
  Complex value;
  Complex gradient;
};

/// Free evolution of an arbitrary amplitude by momentum quadrature,
/// psi(x', t') = (2 pi)^(-1/2) int_0^inf exp(-i p^2 t'/2 + i x' p) phi(p) dp.
/// Real and imaginary parts are integrated separately with a certified
/// momentum cutoff. Throws InvalidArgument for t' < 0.
Complex evolve_quadrature(const MomentumAmplitude& phi, double x, double t,
                          const numerics::QuadratureSpec& spec);

/// Same integral weighted by i p, i.e. the x'-derivative.
Complex evolve_quadrature_gradient(const MomentumAmplitude& phi, double x, double t,
                                   const numerics::QuadratureSpec& spec);

/// Closed-form evolved reference state, written with the scaled function
/// erfcx(w) = exp(w^2) erfc(w) so no intermediate overflows. Throws
/// SmallTimeInstability for t' < kClosedFormTimeFloor.
Complex bm94_closed_form(double x, double t);
WavePoint bm94_closed_form_point(double x, double t);

struct SeriesEvaluation {
  Complex value;
  Complex gradient;
  /// Magnitude of the first term left out of the partial sum.
  double first_omitted = 0.0;
  bool certified() const noexcept { return first_omitted < kSeriesCertificationBound; }
};

/// Small-t' expansion of the reference state: the leading k = 1 pair plus
/// `order` further terms. Never throws on divergence; see certified().
SeriesEvaluation bm94_small_time_expansion(double x, double t, int order);

/// Certified value of the expansion. Throws DivergentTruncation otherwise.
Complex bm94_small_time_series(double x, double t, int order);

struct QuadratureBackend {
  MomentumAmplitude phi;
  numerics::QuadratureSpec spec;
};

struct Bm94ClosedForm {};

struct Bm94SmallTime {
  int order = 6;
};

struct Bm94Auto {
  double switch_time = 1e-3;
  int order = 6;
};

/// Leading large-|x'| behaviour of the position density, rho ~ coeff / |x'|^exponent.
struct DensityTail {
  double coeff = 0.0;
  int exponent = 2;

  /// Integral of coeff / |x|^exponent over |x| > cutoff on one side.
  double integral_beyond(double cutoff) const;
};

/// Strategy object mapping (x', t') to psi(x', t').
///
/// A Bm94Auto backend checks at construction that the series and the closed
/// form agree within 1e-8 at the switch time and that the series is
/// certified there; it throws InvalidArgument otherwise.
class WaveEvaluator {
 public:
  using Backend = std::variant<QuadratureBackend, Bm94ClosedForm, Bm94SmallTime, Bm94Auto>;

  explicit WaveEvaluator(Backend backend);

  static WaveEvaluator bm94(double switch_time = 1e-3, int order = 6);
  static WaveEvaluator quadrature(MomentumAmplitude phi, numerics::QuadratureSpec spec = {});

  Complex evaluate(double x, double t) const;
  WavePoint evaluate_with_gradient(double x, double t) const;

  const Backend& backend() const noexcept { return backend_; }
  const MomentumAmplitude& state() const noexcept { return state_; }
  bool is_bm94() const noexcept;

  DensityTail density_tail() const;

  /// Momentum beyond which the amplitude is below double precision; the
  /// moving part of the packet stays within x' < t' * momentum_reach().
  double momentum_reach() const;

  std::string describe() const;

 private:
  Backend backend_;
  MomentumAmplitude state_;
};

}  // namespace backflow
