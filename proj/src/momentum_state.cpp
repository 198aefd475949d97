#include "backflow/momentum_state.hpp"

#include "backflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace backflow {

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

MomentumAmplitude::MomentumAmplitude(std::vector<MomentumTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(ErrorCode::InvariantViolation, "momentum amplitude needs at least one term");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const MomentumTerm& t = terms_[i];
    std::ostringstream where;
    where << "term " << i << ": ";
    if (!(t.decay > 0.0) || !std::isfinite(t.decay)) {
      where << "decay must be positive and finite, got " << t.decay;
      throw Error(ErrorCode::InvariantViolation, where.str());
    }
    if (t.power < 0 || t.power > 100) {
      where << "power must lie in [0, 100], got " << t.power;
      throw Error(ErrorCode::InvariantViolation, where.str());
    }
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag())) {
      where << "coefficient is not finite";
      throw Error(ErrorCode::InvariantViolation, where.str());
    }
  }
}

std::complex<double> MomentumAmplitude::evaluate(double p) const {
  if (p < 0.0) return {0.0, 0.0};
  std::complex<double> sum{0.0, 0.0};
  for (const MomentumTerm& t : terms_) {
    sum += t.coeff * std::pow(p, t.power) * std::exp(-t.decay * p);
  }
  return sum;
}

double MomentumAmplitude::norm_squared() const {
  double sum = 0.0;
  for (const MomentumTerm& a : terms_) {
    for (const MomentumTerm& b : terms_) {
      const int n = a.power + b.power;
      const double overlap = factorial(n) / std::pow(a.decay + b.decay, n + 1);
      sum += (a.coeff * std::conj(b.coeff)).real() * overlap;
    }
  }
  return sum;
}

MomentumAmplitude MomentumAmplitude::normalized() const {
  const double norm2 = norm_squared();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw Error(ErrorCode::ZeroState, "cannot normalize a state with zero norm");
  }
  return scaled(1.0 / std::sqrt(norm2));
}

MomentumAmplitude MomentumAmplitude::scaled(std::complex<double> factor) const {
  std::vector<MomentumTerm> terms = terms_;
  for (MomentumTerm& t : terms) t.coeff *= factor;
  return MomentumAmplitude(std::move(terms));
}

double MomentumAmplitude::tail_bound(double cutoff) const {
  // int_L^inf p^n e^{-bp} dp = n!/b^{n+1} * e^{-bL} sum_{m<=n} (bL)^m/m!
  const double lo = std::max(cutoff, 0.0);
  double bound = 0.0;
  for (const MomentumTerm& t : terms_) {
    const double bl = t.decay * lo;
    double partial = 0.0;
    double term = 1.0;
    for (int m = 0; m <= t.power; ++m) {
      if (m > 0) term *= bl / m;
      partial += term;
    }
    bound += std::abs(t.coeff) * factorial(t.power) / std::pow(t.decay, t.power + 1) *
             std::exp(-bl) * partial;
  }
  return bound;
}

namespace {

// Taylor coefficient of p^power in phi(p) around p = 0+.
std::complex<double> taylor_coeff(std::span<const MomentumTerm> terms, int power, double& scale) {
  std::complex<double> sum{0.0, 0.0};
  scale = 0.0;
  for (const MomentumTerm& t : terms) {
    if (t.power > power) continue;
    const int m = power - t.power;
    const std::complex<double> c = t.coeff * std::pow(-t.decay, m) / factorial(m);
    sum += c;
    scale += std::abs(c);
  }
  return sum;
}

}  // namespace

int MomentumAmplitude::leading_power() const {
  int lowest = terms_.front().power;
  for (const MomentumTerm& t : terms_) lowest = std::min(lowest, t.power);
  for (int power = lowest; power <= lowest + 32; ++power) {
    double scale = 0.0;
    const std::complex<double> c = taylor_coeff(terms_, power, scale);
    if (std::abs(c) > 1e-12 * scale) return power;
  }
  throw Error(ErrorCode::ZeroState, "amplitude vanishes to high order at p = 0");
}

std::complex<double> MomentumAmplitude::leading_coeff() const {
  double scale = 0.0;
  return taylor_coeff(terms_, leading_power(), scale);
}

MomentumAmplitude bm94_reference() {
  const double c = 18.0 / std::sqrt(35.0);
  return MomentumAmplitude({{{c, 0.0}, 1, 1.0}, {{-c / 6.0, 0.0}, 1, 0.5}});
}

}  // namespace backflow
