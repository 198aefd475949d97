#include "backflow/error.hpp"
#include "backflow/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace backflow::numerics {

namespace {

constexpr double kTwoOverSqrtPi = 1.12837916709551257388;

std::string describe(Complex z) {
  std::ostringstream out;
  out.precision(17);
  out << "(" << z.real() << ", " << z.imag() << ")";
  return out.str();
}

}  // namespace

// Poppe & Wijers, "More efficient computation of the complex error function"
// (ACM TOMS 16, 1990): Maclaurin series near the origin, Gautschi's truncated
// Taylor / Laplace continued fraction combination in the middle ring, and the
// plain Laplace continued fraction far out. Evaluated on the first quadrant
// and mapped to the others by symmetry.
Complex faddeeva_w(Complex z) {
  const double xi = z.real();
  const double yi = z.imag();
  if (!std::isfinite(xi) || !std::isfinite(yi)) {
    throw Error(ErrorCode::InvalidArgument, "faddeeva_w of non-finite argument " + describe(z));
  }
  const double xabs = std::abs(xi);
  const double yabs = std::abs(yi);

  if (xabs > 1e150 || yabs > 1e150) {
    if (yi >= 0.0) return Complex(0.0, 1.0) / (std::sqrt(std::numbers::pi) * z);
    throw Error(ErrorCode::Overflow, "faddeeva_w overflows at " + describe(z));
  }

  const double xs = xabs / 6.3;
  const double ys = yabs / 4.4;
  double qrho = xs * xs + ys * ys;
  double xquad = xabs * xabs - yabs * yabs;
  const double yquad = 2.0 * xabs * yabs;

  const bool near_origin = qrho < 0.085264;
  double u = 0.0;
  double v = 0.0;
  double u2 = 0.0;
  double v2 = 0.0;

  if (near_origin) {
    qrho = (1.0 - 0.85 * ys) * std::sqrt(qrho);
    const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
    int j = 2 * n + 1;
    double xsum = 1.0 / j;
    double ysum = 0.0;
    for (int i = n; i >= 1; --i) {
      j -= 2;
      const double xaux = (xsum * xquad - ysum * yquad) / i;
      ysum = (xsum * yquad + ysum * xquad) / i;
      xsum = xaux + 1.0 / j;
    }
    const double u1 = -kTwoOverSqrtPi * (xsum * yabs + ysum * xabs) + 1.0;
    const double v1 = kTwoOverSqrtPi * (xsum * xabs - ysum * yabs);
    const double daux = std::exp(-xquad);
    u2 = daux * std::cos(yquad);
    v2 = -daux * std::sin(yquad);
    u = u1 * u2 - v1 * v2;
    v = u1 * v2 + v1 * u2;
  } else {
    double h = 0.0;
    double h2 = 0.0;
    double qlambda = 0.0;
    int kapn = 0;
    int nu = 0;
    if (qrho > 1.0) {
      qrho = std::sqrt(qrho);
      nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
    } else {
      qrho = (1.0 - ys) * std::sqrt(1.0 - qrho);
      h = 1.88 * qrho;
      h2 = 2.0 * h;
      kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
      nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
    }
    const bool truncated_taylor = h > 0.0;
    if (truncated_taylor) qlambda = std::pow(h2, kapn);

    double rx = 0.0;
    double ry = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (int n = nu; n >= 0; --n) {
      const double np1 = n + 1;
      double tx = yabs + h + np1 * rx;
      double ty = xabs - np1 * ry;
      const double c = 0.5 / (tx * tx + ty * ty);
      rx = c * tx;
      ry = c * ty;
      if (truncated_taylor && n <= kapn) {
        tx = qlambda + sx;
        sx = rx * tx - ry * sy;
        sy = ry * tx + rx * sy;
        qlambda /= h2;
      }
    }
    if (truncated_taylor) {
      u = kTwoOverSqrtPi * sx;
      v = kTwoOverSqrtPi * sy;
    } else {
      u = kTwoOverSqrtPi * rx;
      v = kTwoOverSqrtPi * ry;
    }
    if (yabs == 0.0) u = std::exp(-xabs * xabs);
  }

  if (yi < 0.0) {
    if (near_origin) {
      u2 *= 2.0;
      v2 *= 2.0;
    } else {
      xquad = -xquad;
      if (xquad > 708.0) {
        throw Error(ErrorCode::Overflow, "faddeeva_w overflows at " + describe(z));
      }
      const double w1 = 2.0 * std::exp(xquad);
      u2 = w1 * std::cos(yquad);
      v2 = -w1 * std::sin(yquad);
    }
    u = u2 - u;
    v = v2 - v;
    if (xi > 0.0) v = -v;
  } else if (xi < 0.0) {
    v = -v;
  }
  return {u, v};
}

Complex erfcx(Complex z) { return faddeeva_w(Complex(-z.imag(), z.real())); }

Complex erfc(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw Error(ErrorCode::InvalidArgument, "erfc of non-finite argument " + describe(z));
  }
  if (z.real() < 0.0) return 2.0 - erfc(-z);

  const Complex scaled = erfcx(z);
  const Complex exponent = -z * z;
  Complex out;
  if (exponent.real() < 700.0) {
    out = std::exp(exponent) * scaled;
  } else {
    out = std::exp(exponent + std::log(scaled));
  }
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) {
    throw Error(ErrorCode::Overflow, "erfc overflows at " + describe(z));
  }
  return out;
}

int erfc_asymptotic_optimal_order(Complex z) {
  // Term ratio is (2k+1)/(2|z|^2); the smallest term is the first one after
  // which the ratio reaches 1.
  const double r2 = std::norm(z);
  int k = 0;
  while ((2.0 * k + 1.0) < 2.0 * r2 && k < std::numeric_limits<int>::max() / 4) ++k;
  return k;
}

AsymptoticSum erfc_asymptotic(Complex z, int k_max) {
  if (k_max < 0) throw Error(ErrorCode::InvalidArgument, "k_max must be non-negative");
  if (z == Complex(0.0, 0.0)) throw Error(ErrorCode::InvalidArgument, "erfc_asymptotic needs z != 0");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw Error(ErrorCode::InvalidArgument, "erfc_asymptotic of non-finite argument " + describe(z));
  }

  const bool reflected = z.real() < 0.0;
  const Complex s = reflected ? -z : z;
  const Complex inv_two_s2 = 1.0 / (2.0 * s * s);

  Complex term(1.0, 0.0);
  Complex sum = term;
  for (int k = 1; k <= k_max; ++k) {
    term *= -static_cast<double>(2 * k - 1) * inv_two_s2;
    sum += term;
  }
  const Complex next = term * (-static_cast<double>(2 * k_max + 1) * inv_two_s2);
  const Complex prefactor = std::exp(-s * s) / (std::sqrt(std::numbers::pi) * s);

  AsymptoticSum out;
  out.value = prefactor * sum;
  out.truncation_bound = std::abs(prefactor * next);
  out.divergent = k_max > erfc_asymptotic_optimal_order(z);
  if (reflected) out.value = 2.0 - out.value;
  return out;
}

}  // namespace backflow::numerics
