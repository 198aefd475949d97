#pragma once

#include "backflow/numerics.hpp"
#include "backflow/observables.hpp"
#include "backflow/propagator.hpp"

#include <vector>

namespace backflow {

/// Supremum of single-particle backflow over positive-momentum states
/// (Bracken-Melloy constant), to seven digits.
inline constexpr double kBrackenMelloyConstant = 0.0384517;

/// Largest particle number accepted by prob_partition_direct.
inline constexpr int kDirectOracleMaxParticles = 6;

/// Probability that exactly j of N product-state bosons are on x' < 0:
/// C(N, j) p1^j p0^(N-j). Throws OutOfRange unless p1, p0 are probabilities
/// summing to 1 within 1e-8 and 0 <= j <= N.
double prob_j_of_n(double p1, double p0, int n, int j);

/// p0^N, flushed to exactly zero below the smallest normal double.
double prob_all_positive(double p0, int n);

/// 1 - p0^N.
double prob_at_least_one_negative(double p0, int n);

/// p0(0)^N - p0(T)^N, the N-particle backflow.
double delta_n(double p0_start, double p0_end, int n);

/// sum_{k<N} p0(0)^k p0(T)^(N-1-k); delta_n = cofactor * (p0_start - p0_end).
double delta_n_cofactor(double p0_start, double p0_end, int n);

/// a_N = N p0(0)^(N-1), evaluated as exp(log N + (N-1) log p0).
/// Throws ZeroProbability for p0_start = 0.
double bound_a_n(double p0_start, int n);

/// b_N = sum_{k<N} p0(0)^k (p0(0) - delta1_max)^(N-1-k). May be negative
/// when p0_start < delta1_max.
double bound_b_n(double p0_start, int n, double delta1_max = kBrackenMelloyConstant);

struct BoundsRow {
  int n = 1;
  double delta_n_max = 0.0;
  double a_n = 0.0;
  double b_n = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool inequality_ok = false;
  /// N = 1: both bounds equal delta1 and the upper one cannot be strict.
  bool degenerate = false;
};

/// Evaluates b_N delta1 <= delta_N < a_N delta1 with delta1 = p0_start - p0_end.
/// Throws NotBackflow when p0_end >= p0_start and OutOfRange unless
/// 0 < p0_start < 1.
BoundsRow check_sandwich(double p0_start, double p0_end, int n,
                         double delta1_max = kBrackenMelloyConstant);

/// dP_-^(N)/dt' = N p0^(N-1) dP_1/dt'.
double dp_minus_dt(double p0, double dp1_dt, int n);

/// Brute-force P_j^(N): sums, over every subset of j axes, the product of the
/// one-dimensional half-line integrals (negative side on the subset, positive
/// side elsewhere). Throws TooLarge for N > kDirectOracleMaxParticles.
double prob_partition_direct(const WaveEvaluator& w, int n, int j, double t,
                             const numerics::QuadratureSpec& spec);

/// N identical bosons in a product state built from one single-particle series.
class BosonEnsemble {
 public:
  BosonEnsemble(int n_particles, ProbabilitySeries base);

  int n_particles() const noexcept { return n_; }
  const ProbabilitySeries& base() const noexcept { return base_; }

  std::vector<double> prob_at_least_one_negative() const;
  std::vector<double> prob_all_positive() const;

 private:
  int n_;
  ProbabilitySeries base_;
};

}  // namespace backflow
