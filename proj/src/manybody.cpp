#include "backflow/manybody.hpp"

#include "backflow/error.hpp"
#include "backflow/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <limits>
#include <sstream>
#include <utility>

namespace backflow {

namespace {

void require_count(int n) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "particle number must be at least 1");
}

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << name << " = " << p << " is not a probability";
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
}

double binomial_real(int n, int j) {
  try {
    return static_cast<double>(numerics::binomial(n, j));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Overflow) throw;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0));
  }
}

}  // namespace

double prob_j_of_n(double p1, double p0, int n, int j) {
  require_probability(p1, "p1");
  require_probability(p0, "p0");
  require_count(n);
  if (std::abs(p1 + p0 - 1.0) > 1e-8) throw Error(ErrorCode::OutOfRange, "p1 + p0 must equal 1");
  if (j < 0 || j > n) throw Error(ErrorCode::OutOfRange, "need 0 <= j <= N");
  return binomial_real(n, j) * std::pow(p1, j) * std::pow(p0, n - j);
}

double prob_all_positive(double p0, int n) {
  require_probability(p0, "p0");
  require_count(n);
  const double out = std::pow(p0, n);
  return out < std::numeric_limits<double>::min() ? 0.0 : out;
}

double prob_at_least_one_negative(double p0, int n) { return 1.0 - prob_all_positive(p0, n); }

double delta_n(double p0_start, double p0_end, int n) {
  return prob_all_positive(p0_start, n) - prob_all_positive(p0_end, n);
}

double delta_n_cofactor(double p0_start, double p0_end, int n) {
  require_probability(p0_start, "p0_start");
  require_probability(p0_end, "p0_end");
  require_count(n);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += std::pow(p0_start, k) * std::pow(p0_end, n - 1 - k);
  return sum;
}

double bound_a_n(double p0_start, int n) {
  require_probability(p0_start, "p0_start");
  require_count(n);
  if (p0_start == 0.0) {
    throw Error(ErrorCode::ZeroProbability, "a_N needs a non-zero initial probability p0(0)");
  }
  return std::exp(std::log(static_cast<double>(n)) + (n - 1) * std::log(p0_start));
}

double bound_b_n(double p0_start, int n, double delta1_max) {
  require_probability(p0_start, "p0_start");
  require_count(n);
  const double shifted = p0_start - delta1_max;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += std::pow(p0_start, k) * std::pow(shifted, n - 1 - k);
  return sum;
}

BoundsRow check_sandwich(double p0_start, double p0_end, int n, double delta1_max) {
  require_probability(p0_end, "p0_end");
  require_count(n);
  if (!(p0_start > 0.0 && p0_start < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "sandwich bounds need 0 < p0(0) < 1");
  }
  if (!(p0_end < p0_start)) {
    std::ostringstream msg;
    msg << "p0(T) = " << p0_end << " >= p0(0) = " << p0_start << ": no backflow";
    throw Error(ErrorCode::NotBackflow, msg.str());
  }

  BoundsRow row;
  row.n = n;
  const double delta1 = p0_start - p0_end;
  row.delta_n_max = delta_n(p0_start, p0_end, n);
  row.a_n = bound_a_n(p0_start, n);
  row.b_n = bound_b_n(p0_start, n, delta1_max);
  row.lower = row.b_n * delta1;
  row.upper = row.a_n * delta1;
  row.degenerate = n == 1;
  if (row.degenerate) {
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * p0_start;
    row.inequality_ok = std::abs(row.delta_n_max - delta1) <= slack;
  } else {
    row.inequality_ok = row.lower <= row.delta_n_max && row.delta_n_max < row.upper;
  }
  return row;
}

double dp_minus_dt(double p0, double dp1_dt, int n) {
  require_probability(p0, "p0");
  require_count(n);
  return n * std::pow(p0, n - 1) * dp1_dt;
}

double prob_partition_direct(const WaveEvaluator& w, int n, int j, double t,
                             const numerics::QuadratureSpec& spec) {
  require_count(n);
  if (n > kDirectOracleMaxParticles) {
    throw Error(ErrorCode::TooLarge, "direct oracle is limited to N <= " +
                                         std::to_string(kDirectOracleMaxParticles));
  }
  if (j < 0 || j > n) throw Error(ErrorCode::OutOfRange, "need 0 <= j <= N");

  // One pair of half-line integrals per axis, each computed on its own.
  std::vector<double> negative(n), positive(n);
  parallel_for(2 * static_cast<std::size_t>(n), [&](std::size_t k) {
    const std::size_t axis = k / 2;
    if (k % 2) {
      positive[axis] = prob_positive(w, t, spec);
    } else {
      negative[axis] = prob_negative(w, t, spec);
    }
  });

  std::vector<double> terms;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != j) continue;
    double product = 1.0;
    for (int axis = 0; axis < n; ++axis) product *= (mask >> axis) & 1u ? negative[axis] : positive[axis];
    terms.push_back(product);
  }
  double sum = 0.0;
  for (double term : terms) sum += term;
  return sum;
}

BosonEnsemble::BosonEnsemble(int n_particles, ProbabilitySeries base)
    : n_(n_particles), base_(std::move(base)) {
  require_count(n_);
  base_.check_invariants();
}

std::vector<double> BosonEnsemble::prob_at_least_one_negative() const {
  std::vector<double> out;
  out.reserve(base_.size());
  for (double p0 : base_.p0) out.push_back(backflow::prob_at_least_one_negative(std::min(p0, 1.0), n_));
  return out;
}

std::vector<double> BosonEnsemble::prob_all_positive() const {
  std::vector<double> out;
  out.reserve(base_.size());
  for (double p0 : base_.p0) out.push_back(backflow::prob_all_positive(std::min(p0, 1.0), n_));
  return out;
}

}  // namespace backflow
