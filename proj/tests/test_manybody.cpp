#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "backflow/error.hpp"
#include "backflow/manybody.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace backflow;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected backflow::Error");
  return ErrorCode::InvalidArgument;
}

const WaveEvaluator& reference() {
  static const WaveEvaluator w = WaveEvaluator::bm94();
  return w;
}

}  // namespace

TEST_CASE("prob_j_of_n examples") {
  CHECK(prob_j_of_n(0.5, 0.5, 2, 1) == doctest::Approx(0.5).epsilon(1e-15));
  for (int n : {1, 4, 9}) CHECK(prob_j_of_n(0.0, 1.0, n, 0) == 1.0);
  CHECK(prob_j_of_n(0.3, 0.7, 5, 2) == doctest::Approx(10 * 0.09 * 0.343).epsilon(1e-14));
  CHECK(code_of([] { prob_j_of_n(0.3, 0.6, 5, 2); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { prob_j_of_n(0.3, 0.7, 5, 6); }) == ErrorCode::OutOfRange);
  CHECK(code_of([] { prob_j_of_n(1.3, -0.3, 5, 1); }) == ErrorCode::OutOfRange);
}

TEST_CASE("binomial completeness for random p and N <= 30") {
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> ps(0.0, 1.0);
  for (int n = 1; n <= 30; ++n) {
    const double p1 = ps(rng);
    const std::vector<std::uint64_t> row = oracle::pascal_row(n);
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double v = prob_j_of_n(p1, 1.0 - p1, n, j);
      const double expected = static_cast<double>(row[j]) * std::pow(p1, j) * std::pow(1.0 - p1, n - j);
      CHECK(std::abs(v - expected) <= 1e-14 * std::max(expected, 1e-300) + 1e-300);
      sum += v;
    }
    INFO("N = " << n << ", p1 = " << p1);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  // Beyond 64-bit binomials the log-gamma path takes over.
  CHECK(std::isfinite(prob_j_of_n(0.5, 0.5, 200, 100)));
  CHECK(prob_j_of_n(0.5, 0.5, 200, 100) == doctest::Approx(0.05634847900925642).epsilon(1e-10));
}

TEST_CASE("all-positive and at-least-one-negative") {
  CHECK(prob_all_positive(0.5, 20) == std::ldexp(1.0, -20));
  CHECK(prob_all_positive(1.0, 1000) == 1.0);
  CHECK(prob_all_positive(0.3, 4) == doctest::Approx(prob_j_of_n(0.7, 0.3, 4, 0)).epsilon(1e-15));
  CHECK(prob_all_positive(0.5, 2000) == 0.0);
  CHECK(prob_at_least_one_negative(0.5, 1) == 0.5);
  CHECK(prob_at_least_one_negative(0.5, 6) == 0.984375);

  double tail = 0.0;
  for (int j = 1; j <= 4; ++j) tail += prob_j_of_n(0.3, 0.7, 4, j);
  CHECK(std::abs(prob_at_least_one_negative(0.7, 4) - tail) < 1e-15);
}

TEST_CASE("delta_n and its cofactor") {
  CHECK(delta_n(0.5, 0.5, 7) == 0.0);
  CHECK(delta_n(0.9, 0.8, 2) == doctest::Approx(0.17).epsilon(1e-14));
  CHECK(std::abs(delta_n(0.5, 0.4957, 1) - 0.0043) < 1e-12);
  CHECK(delta_n_cofactor(0.9, 0.8, 2) == doctest::Approx(1.7).epsilon(1e-15));
  CHECK(delta_n_cofactor(0.6, 0.6, 5) == doctest::Approx(5 * std::pow(0.6, 4)).epsilon(1e-14));

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ps(0.0, 1.0);
  std::uniform_int_distribution<int> ns(1, 40);
  for (int i = 0; i < 200; ++i) {
    const double a = ps(rng);
    const double b = ps(rng);
    const int n = ns(rng);
    CHECK(std::abs(delta_n(a, b, n) - delta_n_cofactor(a, b, n) * (a - b)) < 1e-12);
    // Backflow in the N-particle system iff backflow in the one-particle system.
    CHECK((delta_n(a, b, n) > 0.0) == (a - b > 0.0));
  }
}

TEST_CASE("bound a_N") {
  CHECK(bound_a_n(0.5, 20) == doctest::Approx(20 * std::ldexp(1.0, -19)).epsilon(1e-13));
  CHECK(bound_a_n(0.5, 1) == 1.0);
  // 1000 * 0.99^999 is about 0.0436; the decay is slow this close to 1.
  CHECK(bound_a_n(0.99, 1000) == doctest::Approx(1000.0 * std::pow(0.99, 999)).epsilon(1e-12));
  CHECK(bound_a_n(0.99, 1000) < 0.05);
  CHECK(code_of([] { bound_a_n(0.0, 3); }) == ErrorCode::ZeroProbability);

  for (double p : {0.5, 0.9, 0.99}) {
    INFO("p0 = " << p);
    // n p^(n-1) decreases once n > 1 / (-ln p).
    const int turn = static_cast<int>(std::ceil(1.0 / -std::log(p))) + 1;
    for (int n = turn; n < turn + 200; ++n) CHECK(bound_a_n(p, n + 1) < bound_a_n(p, n));
    int n0 = 1;
    while (bound_a_n(p, n0) >= 1e-12) ++n0;
    for (int n = n0; n < n0 + 100; ++n) CHECK(bound_a_n(p, n) < 1e-12);
  }
  CHECK(bound_a_n(0.5, 60) < 1e-12);
  CHECK(bound_a_n(0.9, 400) < 1e-12);
  CHECK(bound_a_n(0.99, 4000) < 1e-12);
  CHECK(bound_a_n(0.5, 5000) == 0.0);
}

TEST_CASE("bound b_N") {
  CHECK(bound_b_n(0.5, 1) == 1.0);
  CHECK(bound_b_n(0.5, 2, 0.0384517) == doctest::Approx(0.9615483).epsilon(1e-15));
  CHECK(bound_b_n(0.02, 2, 0.0384517) < 0.02);
  CHECK(bound_b_n(0.02, 2, 0.0384517) == doctest::Approx(0.02 - 0.0184517).epsilon(1e-12));

  // First order in delta1_max: b_N = a_N - N(N-1)/2 p^(N-2) d + O(d^2).
  const double d = 1e-6;
  for (double p : {0.3, 0.5, 0.8}) {
    for (int n : {2, 3, 7, 15}) {
      const double first_order = bound_a_n(p, n) - 0.5 * n * (n - 1) * std::pow(p, n - 2) * d;
      INFO("p0 = " << p << ", N = " << n);
      CHECK(std::abs(bound_b_n(p, n, d) - first_order) < 1e-9);
    }
  }
}

TEST_CASE("sandwich inequality") {
  for (int n = 1; n <= 20; ++n) {
    const BoundsRow row = check_sandwich(0.5, 0.4957, n);
    INFO("N = " << n);
    CHECK(row.inequality_ok);
    CHECK(row.degenerate == (n == 1));
    CHECK(row.n == n);
  }
  const BoundsRow one = check_sandwich(0.5, 0.4957, 1);
  CHECK(one.a_n == 1.0);
  CHECK(one.b_n == 1.0);
  CHECK(one.lower == one.upper);
  // Here delta1 = 0.2 exceeds the default delta1_max, so only the upper bound
  // is guaranteed; raising delta1_max above delta1 restores the lower one.
  const BoundsRow wide = check_sandwich(0.9, 0.7, 3);
  CHECK_FALSE(wide.inequality_ok);
  CHECK(wide.delta_n_max < wide.upper);
  CHECK(wide.lower > wide.delta_n_max);
  CHECK(check_sandwich(0.9, 0.7, 3, 0.25).inequality_ok);
  CHECK(code_of([] { check_sandwich(0.5, 0.5, 3); }) == ErrorCode::NotBackflow);
  CHECK(code_of([] { check_sandwich(0.4, 0.6, 3); }) == ErrorCode::NotBackflow);
  CHECK(code_of([] { check_sandwich(1.0, 0.6, 3); }) == ErrorCode::OutOfRange);
}

TEST_CASE("dp_minus_dt") {
  for (int n = 1; n < 8; ++n) CHECK(dp_minus_dt(0.4, 0.0, n) == 0.0);
  CHECK(dp_minus_dt(0.4, 0.123, 1) == 0.123);
  CHECK(dp_minus_dt(0.5, 0.327364, 4) == doctest::Approx(0.163682).epsilon(1e-12));
}

TEST_CASE("direct partition oracle matches the factorized form") {
  const numerics::QuadratureSpec spec;
  CHECK(std::abs(prob_partition_direct(reference(), 2, 0, 0.0, spec) - 0.25) < 1e-9);
  CHECK(std::abs(prob_partition_direct(reference(), 3, 1, 0.0, spec) - 0.375) < 1e-9);

  for (double t : {0.0, 0.021}) {
    const double p1 = prob_negative(reference(), t, spec);
    const double p0 = prob_positive(reference(), t, spec);
    for (int n : {2, 3}) {
      double sum = 0.0;
      for (int j = 0; j <= n; ++j) {
        const double direct = prob_partition_direct(reference(), n, j, t, spec);
        INFO("t' = " << t << ", N = " << n << ", j = " << j);
        CHECK(std::abs(direct - prob_j_of_n(p1, p0, n, j)) < 1e-6);
        sum += direct;
      }
      CHECK(std::abs(sum - 1.0) < 1e-8);
    }
  }
  CHECK(code_of([] { prob_partition_direct(reference(), 7, 1, 0.0, {}); }) == ErrorCode::TooLarge);
}

TEST_CASE("boson ensemble: maxima of P_minus^(N) sit where P1 peaks") {
  const numerics::QuadratureSpec spec;
  std::vector<double> grid(200);
  for (int i = 0; i < 200; ++i) grid[i] = 0.1 * i / 199.0;
  const ProbabilitySeries base = build_series(reference(), grid, spec);
  const auto argmax = [](const std::vector<double>& v) { return std::max_element(v.begin(), v.end()) - v.begin(); };
  const auto single = argmax(base.p1);
  std::vector<double> previous = base.p1;
  for (int n = 1; n <= 6; ++n) {
    const BosonEnsemble ensemble(n, base);
    const std::vector<double> minus = ensemble.prob_at_least_one_negative();
    const std::vector<double> plus = ensemble.prob_all_positive();
    INFO("N = " << n);
    CHECK(argmax(minus) == single);
    for (std::size_t i = 0; i < minus.size(); ++i) {
      CHECK(std::abs(minus[i] + plus[i] - 1.0) < 1e-15);
      if (n > 1) CHECK(minus[i] > previous[i]);
    }
    previous = minus;
  }
  CHECK(code_of([&] { BosonEnsemble(0, base); }) == ErrorCode::OutOfRange);
}
