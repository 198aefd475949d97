#pragma once

// Test-only reference computations. Nothing here calls into the library, so
// each oracle stays independent of the code path it checks.

#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

__extension__ typedef __float128 Quad;

struct QuadComplex {
  Quad re = 0;
  Quad im = 0;
};

inline QuadComplex mul(QuadComplex a, QuadComplex b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

/// erfc(z) = 1 - (2/sqrt(pi)) sum_n (-1)^n z^(2n+1) / (n! (2n+1)), summed in
/// 113-bit precision so the cancellation for |z| <= 5 stays below 1e-20.
inline std::complex<double> erfc_maclaurin(std::complex<double> z, int terms = 400) {
  // pi as a double-double, then 1/sqrt(pi) by Newton steps in quad precision.
  const Quad pi = Quad(3.141592653589793116) + Quad(1.2246467991473532e-16);
  Quad inv_sqrt_pi = Quad(0.5641895835477563);
  for (int i = 0; i < 4; ++i) inv_sqrt_pi = inv_sqrt_pi * (Quad(3) - pi * inv_sqrt_pi * inv_sqrt_pi) / 2;

  const QuadComplex zq{z.real(), z.imag()};
  const QuadComplex z2 = mul(zq, zq);
  QuadComplex power = zq;  // (-1)^n z^(2n+1) / n!
  QuadComplex sum{0, 0};
  for (int n = 0; n < terms; ++n) {
    sum.re += power.re / (2 * n + 1);
    sum.im += power.im / (2 * n + 1);
    power = mul(power, z2);
    power.re = -power.re / (n + 1);
    power.im = -power.im / (n + 1);
  }
  const Quad scale = 2 * inv_sqrt_pi;
  return {static_cast<double>(Quad(1) - scale * sum.re), static_cast<double>(-scale * sum.im)};
}

/// (2k-1)!! by the plain descending product.
inline std::uint64_t double_factorial_product(int k) {
  std::uint64_t out = 1;
  for (int f = 2 * k - 1; f > 1; f -= 2) out *= static_cast<std::uint64_t>(f);
  return out;
}

/// Row n of Pascal's triangle.
inline std::vector<std::uint64_t> pascal_row(int n) {
  std::vector<std::uint64_t> row{1};
  for (int r = 1; r <= n; ++r) {
    std::vector<std::uint64_t> next(r + 1, 1);
    for (int k = 1; k < r; ++k) next[k] = row[k - 1] + row[k];
    row = std::move(next);
  }
  return row;
}

/// Composite Simpson rule on a uniform grid; crude but independent of the
/// adaptive Gauss-Kronrod code.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

}  // namespace oracle
