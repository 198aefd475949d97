#include "backflow/error.hpp"
#include "backflow/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace backflow::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIterations = 200;

double finite_eval(const RealFunction& g, double x) {
  const double y = g(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg << "function returned " << y << " at " << x;
    throw Error(ErrorCode::NonFiniteEvaluation, msg.str());
  }
  return y;
}

}  // namespace

double find_root_bracketed(const RealFunction& g, double lo, double hi, double tol) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "root bracket needs lo < hi");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "root tolerance must be positive");

  double a = lo;
  double b = hi;
  double fa = finite_eval(g, a);
  double fb = finite_eval(g, b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg << "g(" << lo << ") = " << fa << " and g(" << hi << ") = " << fb << " have the same sign";
    throw Error(ErrorCode::NoBracket, msg.str());
  }

  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points differ.
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double bound1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double bound2 = std::abs(e * q);
      if (2.0 * p < std::min(bound1, bound2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = finite_eval(g, b);
  }
  return b;
}

Extremum find_max_unimodal(const RealFunction& g, double lo, double hi, double tol) {
  if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "search interval needs lo < hi");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "search tolerance must be positive");

  // Brent's minimiser applied to -g.
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  double a = lo;
  double b = hi;
  double x = a + golden * (b - a);
  double w = x;
  double v = x;
  double fx = -finite_eval(g, x);
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = std::sqrt(kEps) * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;

    bool golden_step = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }

    const double u = std::abs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
    const double fu = -finite_eval(g, u);
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, -fx};
}

}  // namespace backflow::numerics
