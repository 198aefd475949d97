#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "backflow/error.hpp"
#include "backflow/momentum_state.hpp"
#include "backflow/numerics.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace backflow;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double quadrature_norm(const MomentumAmplitude& phi) {
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-14;
  spec.cutoff.tail_bound = [&phi](double cut) {
    // |phi|^2 <= |phi|_max * |phi|, and |phi| is bounded by the sum of |c_k| p^n e^{-bp}.
    double sup = 0.0;
    for (const MomentumTerm& t : phi.terms()) sup += std::abs(t.coeff) * std::pow(t.power / t.decay, t.power) * std::exp(-t.power);
    return sup * phi.tail_bound(cut);
  };
  return numerics::integrate_adaptive([&](double p) { return std::norm(phi.evaluate(p)); }, 0.0, kInf, spec).value;
}

MomentumAmplitude random_state(std::mt19937_64& rng, int n_terms) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> power(0, 4);
  std::uniform_real_distribution<double> decay(0.4, 3.0);
  std::vector<MomentumTerm> terms;
  for (int i = 0; i < n_terms; ++i) terms.push_back({{coeff(rng), coeff(rng)}, power(rng), decay(rng)});
  return MomentumAmplitude(std::move(terms));
}

}  // namespace

TEST_CASE("reference state evaluation") {
  const MomentumAmplitude phi = bm94_reference();
  CHECK(phi.terms().size() == 2);
  CHECK(phi.evaluate(0.0) == std::complex<double>(0.0, 0.0));
  const double expected = 18.0 / std::sqrt(35.0) * (std::exp(-1.0) - std::exp(-0.5) / 6.0);
  CHECK(std::abs(phi.evaluate(1.0) - expected) < 1e-15);
  CHECK(std::abs(phi.evaluate(1.0).real() - 0.811726369) < 1e-9);
  CHECK(phi.evaluate(-3.0) == std::complex<double>(0.0, 0.0));
  CHECK(std::abs(phi.evaluate(200.0)) < 1e-40);
}

TEST_CASE("norm_squared") {
  CHECK(std::abs(bm94_reference().norm_squared() - 1.0) < 1e-12);
  const MomentumAmplitude single({{{1.0, 0.0}, 0, 2.0}});
  CHECK(single.norm_squared() == doctest::Approx(0.25).epsilon(1e-15));
  const MomentumAmplitude doubled = bm94_reference().scaled(2.0);
  CHECK(std::abs(doubled.norm_squared() - 4.0) < 1e-12);
}

TEST_CASE("normalize") {
  const MomentumAmplitude phi = bm94_reference();
  const MomentumAmplitude same = phi.normalized();
  for (std::size_t i = 0; i < phi.terms().size(); ++i) {
    CHECK(std::abs(same.terms()[i].coeff - phi.terms()[i].coeff) < 1e-14);
  }
  const MomentumAmplitude single = MomentumAmplitude({{{2.0, 0.0}, 0, 2.0}}).normalized();
  CHECK(std::abs(single.norm_squared() - 1.0) < 1e-12);
  CHECK(std::abs(single.terms()[0].coeff.real() - std::sqrt(4.0)) < 1e-14);

  std::mt19937_64 rng(31);
  const MomentumAmplitude two = random_state(rng, 2).normalized();
  CHECK(std::abs(two.norm_squared() - 1.0) < 1e-12);
  CHECK(std::abs(quadrature_norm(two) - 1.0) < 1e-10);

  CHECK_THROWS_AS(MomentumAmplitude({{{0.0, 0.0}, 1, 1.0}}).normalized(), Error);
}

TEST_CASE("closed-form norm agrees with quadrature for random 1-4 term states") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 24; ++trial) {
    const MomentumAmplitude phi = random_state(rng, 1 + trial % 4);
    const double closed = phi.norm_squared();
    const double numeric = quadrature_norm(phi);
    INFO("trial " << trial << ": closed " << closed << ", quadrature " << numeric);
    CHECK(std::abs(closed - numeric) <= 1e-10 * std::max(1.0, closed));
    for (double p : {-1e-9, -0.5, -7.0, -1e6}) CHECK(phi.evaluate(p) == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("invariant violations") {
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code([] { MomentumAmplitude({}); }) == ErrorCode::InvariantViolation);
  CHECK(code([] { MomentumAmplitude({{{1.0, 0.0}, 1, 0.0}}); }) == ErrorCode::InvariantViolation);
  CHECK(code([] { MomentumAmplitude({{{1.0, 0.0}, 1, -1.0}}); }) == ErrorCode::InvariantViolation);
  CHECK(code([] { MomentumAmplitude({{{1.0, 0.0}, -1, 1.0}}); }) == ErrorCode::InvariantViolation);
  CHECK(code([] { MomentumAmplitude({{{1.0, 0.0}, 1, 1.0}}).scaled(0.0).normalized(); }) ==
        ErrorCode::ZeroState);
}

TEST_CASE("tail_bound dominates the true tail mass") {
  const MomentumAmplitude phi = bm94_reference();
  numerics::QuadratureSpec spec;
  spec.cutoff.tail_bound = [&phi](double cut) { return phi.tail_bound(cut); };
  for (double cut : {0.0, 1.0, 5.0, 20.0, 60.0}) {
    const double mass =
        numerics::integrate_adaptive([&](double p) { return std::abs(phi.evaluate(p)); }, cut, kInf, spec).value;
    CHECK(phi.tail_bound(cut) >= mass * (1.0 - 1e-9));
  }
  CHECK(phi.tail_bound(80.0) < 1e-14);
}

TEST_CASE("leading small-momentum behaviour") {
  const MomentumAmplitude phi = bm94_reference();
  CHECK(phi.leading_power() == 1);
  CHECK(std::abs(phi.leading_coeff() - 15.0 / std::sqrt(35.0)) < 1e-14);

  // p e^-p - p e^-2p ~ p^2 near 0.
  const MomentumAmplitude cancelling({{{1.0, 0.0}, 1, 1.0}, {{-1.0, 0.0}, 1, 2.0}});
  CHECK(cancelling.leading_power() == 2);
  CHECK(std::abs(cancelling.leading_coeff() - 1.0) < 1e-14);

  const MomentumAmplitude constant({{{0.5, 0.5}, 0, 1.0}});
  CHECK(constant.leading_power() == 0);
}
