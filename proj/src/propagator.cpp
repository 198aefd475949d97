#include "backflow/propagator.hpp"

#include "backflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace backflow {

namespace {

using numerics::erfcx;

constexpr Complex kI{0.0, 1.0};

const double kInvSqrtTwoPi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
const double kSqrtPi = std::sqrt(std::numbers::pi);
// 18 sqrt(1/(70 pi)) in alpha = hbar = 1 units.
const double kBm94Prefactor = 18.0 / std::sqrt(70.0 * std::numbers::pi);

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << "time must be finite and non-negative, got " << t;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

// Integrates the real and imaginary parts of weight(p) * exp(i(xp - p^2 t/2)) phi(p).
Complex momentum_integral(const MomentumAmplitude& phi, double x, double t, bool with_momentum,
                          const numerics::QuadratureSpec& spec) {
  numerics::QuadratureSpec local = spec;
  if (with_momentum) {
    std::vector<MomentumTerm> shifted(phi.terms().begin(), phi.terms().end());
    for (MomentumTerm& term : shifted) term.power += 1;
    const MomentumAmplitude envelope(std::move(shifted));
    local.cutoff.tail_bound = [envelope](double cut) { return envelope.tail_bound(cut); };
  } else {
    local.cutoff.tail_bound = [&phi](double cut) { return phi.tail_bound(cut); };
  }

  auto integrand = [&](double p) {
    const Complex phase = std::exp(kI * (x * p - 0.5 * p * p * t));
    Complex v = phase * phi.evaluate(p);
    if (with_momentum) v *= kI * p;
    return v;
  };
  const double re =
      numerics::integrate_adaptive([&](double p) { return integrand(p).real(); }, 0.0,
                                   std::numeric_limits<double>::infinity(), local)
          .value;
  const double im =
      numerics::integrate_adaptive([&](double p) { return integrand(p).imag(); }, 0.0,
                                   std::numeric_limits<double>::infinity(), local)
          .value;
  return kInvSqrtTwoPi * Complex(re, im);
}

}  // namespace

Complex evolve_quadrature(const MomentumAmplitude& phi, double x, double t,
                          const numerics::QuadratureSpec& spec) {
  require_time(t);
  return momentum_integral(phi, x, t, false, spec);
}

Complex evolve_quadrature_gradient(const MomentumAmplitude& phi, double x, double t,
                                   const numerics::QuadratureSpec& spec) {
  require_time(t);
  return momentum_integral(phi, x, t, true, spec);
}

WavePoint bm94_closed_form_point(double x, double t) {
  require_time(t);
  if (t < kClosedFormTimeFloor) {
    std::ostringstream msg;
    msg << "closed form is unstable at t' = " << t << " < " << kClosedFormTimeFloor
        << "; use the small-time series";
    throw Error(ErrorCode::SmallTimeInstability, msg.str());
  }

  // exp(i(x+i)^2/2t) erfc(w1) = erfcx(w1) with w1 = -(1+i)(x+i)/sqrt(4t), and
  // likewise for the (2x+i) term with sqrt(16t).
  const double root_t = std::sqrt(t);
  const Complex one_plus_i{1.0, 1.0};
  const Complex a1 = Complex(x, 1.0);
  const Complex a2 = Complex(2.0 * x, 1.0);
  const Complex w1 = -one_plus_i * a1 / (2.0 * root_t);
  const Complex w2 = -one_plus_i * a2 / (4.0 * root_t);
  const Complex e1 = erfcx(w1);
  const Complex e2 = erfcx(w2);
  const Complex bracket = a1 * e1 - a2 / 12.0 * e2;

  // d/dw erfcx(w) = 2 w erfcx(w) - 2/sqrt(pi); dw1/dx = dw2/dx = -(1+i)/(2 sqrt t).
  const Complex dw = -one_plus_i / (2.0 * root_t);
  const double two_over_sqrt_pi = 2.0 / kSqrtPi;
  const Complex d1 = e1 + a1 * (2.0 * w1 * e1 - two_over_sqrt_pi) * dw;
  const Complex d2 = e2 / 6.0 + a2 / 12.0 * (2.0 * w2 * e2 - two_over_sqrt_pi) * dw;

  const Complex scale = std::sqrt(std::numbers::pi / (4.0 * t * t * t)) * Complex(-1.0, 1.0);
  WavePoint out;
  out.value = -kBm94Prefactor * (kI * (5.0 / (6.0 * t)) + scale * bracket);
  out.gradient = -kBm94Prefactor * scale * (d1 - d2);
  return out;
}

Complex bm94_closed_form(double x, double t) { return bm94_closed_form_point(x, t).value; }

SeriesEvaluation bm94_small_time_expansion(double x, double t, int order) {
  require_time(t);
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "series order must be non-negative");

  // psi ~ P sum_{k>=1} (-i t)^{k-1} (2k-1)!! [v^{2k} - u^{2k}/6],
  // v = 1/(1 - i x), u = 2/(1 - 2 i x); d(v^n)/dx = i n v^{n+1}, same for u.
  const Complex v = 1.0 / Complex(1.0, -x);
  const Complex u = 2.0 / Complex(1.0, -2.0 * x);
  const Complex v2 = v * v;
  const Complex u2 = u * u;
  const Complex step = Complex(0.0, -t);

  Complex vpow = v2;
  Complex upow = u2;
  Complex time_factor{1.0, 0.0};
  double dfact = 1.0;

  SeriesEvaluation out;
  out.value = Complex(0.0, 0.0);
  out.gradient = Complex(0.0, 0.0);
  const int last = order + 1;
  for (int k = 1; k <= last + 1; ++k) {
    if (k > 1) {
      dfact *= 2.0 * k - 1.0;
      time_factor *= step;
      vpow *= v2;
      upow *= u2;
    }
    const Complex coeff = time_factor * dfact;
    const Complex term = coeff * (vpow - upow / 6.0);
    if (k == last + 1) {
      out.first_omitted = kBm94Prefactor * std::abs(term);
      break;
    }
    out.value += term;
    out.gradient += coeff * kI * (2.0 * k) * (vpow * v - upow * u / 6.0);
  }
  out.value *= kBm94Prefactor;
  out.gradient *= kBm94Prefactor;
  return out;
}

Complex bm94_small_time_series(double x, double t, int order) {
  const SeriesEvaluation s = bm94_small_time_expansion(x, t, order);
  if (!s.certified()) {
    std::ostringstream msg;
    msg << "first omitted term " << s.first_omitted << " at x' = " << x << ", t' = " << t
        << ", order " << order << " exceeds " << kSeriesCertificationBound;
    throw Error(ErrorCode::DivergentTruncation, msg.str());
  }
  return s.value;
}

double DensityTail::integral_beyond(double cutoff) const {
  const int m = exponent - 1;
  return coeff / (m * std::pow(cutoff, m));
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

MomentumAmplitude backend_state(const WaveEvaluator::Backend& backend) {
  if (const auto* q = std::get_if<QuadratureBackend>(&backend)) return q->phi;
  return bm94_reference();
}

void check_seam(const Bm94Auto& autob) {
  if (!(autob.switch_time >= kClosedFormTimeFloor)) {
    throw Error(ErrorCode::InvalidArgument, "switch time must be at least the closed-form floor");
  }
  for (double x : {-3.0, -1.0, 0.0, 0.5, 1.0, 3.0}) {
    const SeriesEvaluation s = bm94_small_time_expansion(x, autob.switch_time, autob.order);
    const Complex c = bm94_closed_form(x, autob.switch_time);
    if (!s.certified() || std::abs(s.value - c) > 1e-8) {
      std::ostringstream msg;
      msg << "series (order " << autob.order << ") and closed form disagree at switch time "
          << autob.switch_time << ", x' = " << x << ": |diff| = " << std::abs(s.value - c)
          << ", first omitted term = " << s.first_omitted;
      throw Error(ErrorCode::InvalidArgument, msg.str());
    }
  }
}

WavePoint series_point(double x, double t, int order) {
  const SeriesEvaluation s = bm94_small_time_expansion(x, t, order);
  if (!s.certified()) {
    std::ostringstream msg;
    msg << "first omitted term " << s.first_omitted << " at x' = " << x << ", t' = " << t
        << " exceeds " << kSeriesCertificationBound;
    throw Error(ErrorCode::DivergentTruncation, msg.str());
  }
  return {s.value, s.gradient};
}

}  // namespace

WaveEvaluator::WaveEvaluator(Backend backend)
    : backend_(std::move(backend)), state_(backend_state(backend_)) {
  if (const auto* q = std::get_if<QuadratureBackend>(&backend_)) q->spec.validate();
  if (const auto* s = std::get_if<Bm94SmallTime>(&backend_); s && s->order < 0) {
    throw Error(ErrorCode::InvalidArgument, "series order must be non-negative");
  }
  if (const auto* a = std::get_if<Bm94Auto>(&backend_)) check_seam(*a);
}

WaveEvaluator WaveEvaluator::bm94(double switch_time, int order) {
  return WaveEvaluator(Bm94Auto{switch_time, order});
}

WaveEvaluator WaveEvaluator::quadrature(MomentumAmplitude phi, numerics::QuadratureSpec spec) {
  return WaveEvaluator(QuadratureBackend{std::move(phi), std::move(spec)});
}

bool WaveEvaluator::is_bm94() const noexcept {
  return !std::holds_alternative<QuadratureBackend>(backend_);
}

WavePoint WaveEvaluator::evaluate_with_gradient(double x, double t) const {
  require_time(t);
  return std::visit(
      Overloaded{
          [&](const QuadratureBackend& q) {
            return WavePoint{evolve_quadrature(q.phi, x, t, q.spec),
                             evolve_quadrature_gradient(q.phi, x, t, q.spec)};
          },
          [&](const Bm94ClosedForm&) { return bm94_closed_form_point(x, t); },
          [&](const Bm94SmallTime& s) { return series_point(x, t, s.order); },
          [&](const Bm94Auto& a) {
            return t < a.switch_time ? series_point(x, t, a.order) : bm94_closed_form_point(x, t);
          },
      },
      backend_);
}

Complex WaveEvaluator::evaluate(double x, double t) const {
  require_time(t);
  return std::visit(
      Overloaded{
          [&](const QuadratureBackend& q) { return evolve_quadrature(q.phi, x, t, q.spec); },
          [&](const Bm94ClosedForm&) { return bm94_closed_form(x, t); },
          [&](const Bm94SmallTime& s) { return bm94_small_time_series(x, t, s.order); },
          [&](const Bm94Auto& a) {
            return t < a.switch_time ? bm94_small_time_series(x, t, a.order)
                                     : bm94_closed_form(x, t);
          },
      },
      backend_);
}

DensityTail WaveEvaluator::density_tail() const {
  // Repeated integration by parts: psi ~ -(2 pi)^(-1/2) n! a / (-i x)^(n+1)
  // for phi(p) ~ a p^n near p = 0+, independent of t'.
  const int n = state_.leading_power();
  const double a = std::abs(state_.leading_coeff());
  const double fact = std::tgamma(n + 1.0);
  return {a * a * fact * fact / (2.0 * std::numbers::pi), 2 * n + 2};
}

double WaveEvaluator::momentum_reach() const {
  double min_decay = state_.terms().front().decay;
  for (const MomentumTerm& term : state_.terms()) min_decay = std::min(min_decay, term.decay);
  return 40.0 / min_decay;
}

std::string WaveEvaluator::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const QuadratureBackend& q) {
                   out << "quadrature(" << q.phi.terms().size() << " terms, rel_tol "
                       << q.spec.rel_tol << ", abs_tol " << q.spec.abs_tol << ")";
                 },
                 [&](const Bm94ClosedForm&) { out << "bm94-closed-form"; },
                 [&](const Bm94SmallTime& s) { out << "bm94-series(order " << s.order << ")"; },
                 [&](const Bm94Auto& a) {
                   out << "bm94-auto(switch " << a.switch_time << ", order " << a.order << ")";
                 },
             },
             backend_);
  return out.str();
}

}  // namespace backflow
