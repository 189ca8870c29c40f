#include "deltarec/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "deltarec/errors.hpp"

namespace deltarec::quad {
namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double simpson(std::span<const double> y, double h) {
  const std::size_t n = y.empty() ? 0 : y.size() - 1;
  if (n == 0) return 0.0;
  if (n == 1) return 0.5 * h * (y[0] + y[1]);
  const std::size_t even = n & ~std::size_t{1};
  double odd_sum = 0.0;
  double even_sum = 0.0;
  for (std::size_t i = 1; i < even; i += 2) odd_sum += y[i];
  for (std::size_t i = 2; i < even; i += 2) even_sum += y[i];
  double s = h / 3.0 * (y[0] + 4.0 * odd_sum + 2.0 * even_sum + y[even]);
  if (even != n) s += 0.5 * h * (y[n - 1] + y[n]);
  return s;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
              int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw ValidationError("bisection bracket has no sign change");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol * std::max(1.0, std::fabs(mid)) || mid == lo || mid == hi) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace deltarec::quad
