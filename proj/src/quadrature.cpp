#include "backflow/error.hpp"
#include "backflow/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace backflow::numerics {

namespace {

// Kronrod abscissae (descending, last one is the centre) and weights for the
// 21-point rule; the odd-indexed abscissae are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208936861125, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Segment& other) const { return error < other.error; }
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg << "integrand returned " << y << " at x = " << x;
    throw Error(ErrorCode::NonFiniteEvaluation, msg.str());
  }
  return y;
}

// One application of the 21-point rule, with the QUADPACK error heuristic.
Segment gauss_kronrod(const RealFunction& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  const double f_centre = checked(f, centre);
  double kronrod = kWgk[10] * f_centre;
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> f_lo{};
  std::array<double, 10> f_hi{};

  for (int i = 0; i < 10; ++i) {
    const double dx = half * kXgk[i];
    f_lo[i] = checked(f, centre - dx);
    f_hi[i] = checked(f, centre + dx);
    const double pair = f_lo[i] + f_hi[i];
    kronrod += kWgk[i] * pair;
    abs_sum += kWgk[i] * (std::abs(f_lo[i]) + std::abs(f_hi[i]));
    if (i % 2 == 1) gauss += kWg[i / 2] * pair;
  }

  const double mean = 0.5 * kronrod;
  double asc = kWgk[10] * std::abs(f_centre - mean);
  for (int i = 0; i < 10; ++i) {
    asc += kWgk[i] * (std::abs(f_lo[i] - mean) + std::abs(f_hi[i] - mean));
  }

  const double value = kronrod * half;
  const double res_abs = abs_sum * abs_half;
  const double res_asc = asc * abs_half;
  double error = std::abs((kronrod - gauss) * half);
  if (res_asc != 0.0 && error != 0.0) {
    error = res_asc * std::min(1.0, std::pow(200.0 * error / res_asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    error = std::max(50.0 * eps * res_abs, error);
  }
  return {a, b, value, error};
}

double target(const QuadratureSpec& spec, double value) {
  return std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
}

Integral integrate_finite(const RealFunction& f, double a, double b,
                          const QuadratureSpec& spec) {
  Integral out;
  if (a == b) return out;

  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, a, b);
  out.evaluations = 21;
  double value = first.value;
  double error = first.error;
  heap.push(first);

  int subdivisions = 1;
  while (error > target(spec, value)) {
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "tolerance not reached on [" << a << ", " << b << "] after "
          << subdivisions << " subdivisions (error " << error << ", value " << value << ")";
      throw Error(ErrorCode::SubdivisionLimit, msg.str());
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      throw Error(ErrorCode::SubdivisionLimit, "interval collapsed below floating-point resolution");
    }
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    out.evaluations += 42;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Resum from the leaves to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  return out;
}

Integral integrate_semi_infinite(const RealFunction& f, double a, const QuadratureSpec& spec) {
  const CutoffPolicy& policy = spec.cutoff;
  const double tail_target = spec.abs_tol / 10.0;

  if (policy.tail_bound) {
    double length = policy.initial_length;
    double tail = policy.tail_bound(a + length);
    while (tail > tail_target) {
      length *= 2.0;
      if (length > policy.max_length) {
        throw Error(ErrorCode::SubdivisionLimit, "tail bound does not fall below abs_tol/10 within max_length");
      }
      tail = policy.tail_bound(a + length);
    }
    Integral out = integrate_finite(f, a, a + length, spec);
    out.error += tail;
    return out;
  }

  Integral out;
  double lo = a;
  double length = policy.initial_length;
  int quiet_panels = 0;
  double last = 0.0;
  while (quiet_panels < 2) {
    if (lo - a > policy.max_length) {
      throw Error(ErrorCode::SubdivisionLimit, "integrand tail does not decay within max_length");
    }
    const Integral panel = integrate_finite(f, lo, lo + length, spec);
    out.value += panel.value;
    out.error += panel.error;
    out.evaluations += panel.evaluations;
    last = std::abs(panel.value) + panel.error;
    quiet_panels = last < tail_target ? quiet_panels + 1 : 0;
    lo += length;
    length *= 2.0;
  }
  out.error += last;
  return out;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "quadrature spec needs rel_tol > 0, abs_tol > 0 and max_subdivisions >= 1");
  }
  if (!(cutoff.initial_length > 0.0) || !(cutoff.max_length >= cutoff.initial_length)) {
    throw Error(ErrorCode::InvalidArgument, "cutoff policy needs 0 < initial_length <= max_length");
  }
}

Integral integrate_adaptive(const RealFunction& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(a) || std::isnan(b) || std::isinf(a)) {
    throw Error(ErrorCode::InvalidArgument, "integration limits must be finite except for b = +inf");
  }
  if (std::isinf(b)) {
    if (b < 0.0) throw Error(ErrorCode::InvalidArgument, "upper limit -inf is not supported");
    return integrate_semi_infinite(f, a, spec);
  }
  return integrate_finite(f, a, b, spec);
}

}  // namespace backflow::numerics
