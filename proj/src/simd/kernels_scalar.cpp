#include <cmath>
#include <limits>

#include "deltarec/simd/kernels.hpp"

namespace deltarec::simd {
namespace {

// Pairwise summation keeps the error O(log n · eps) and fixes the order.
double sum_scalar(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return sum_scalar(x, half) + sum_scalar(x + half, n - half);
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
  return m;
}

void step_extend_scalar(const double* prefix, std::size_t n, double base, double c, double* out) {
  if (n == 0) return;
  const double p0 = prefix[0];
  for (std::size_t j = 0; j < n; ++j) out[j] = base - c * (prefix[j] - p0);
}

void trapezoid_prefix_scalar(const double* y, std::size_t n, double h, double start,
                             double* prefix) {
  if (n == 0) return;
  const double hh = 0.5 * h;
  double acc = start;
  prefix[0] = acc;
  for (std::size_t j = 1; j < n; ++j) {
    acc += hh * (y[j - 1] + y[j]);
    prefix[j] = acc;
  }
}

double residual_sweep_scalar(const double* lead, const double* prefix, std::size_t n,
                             double total, double c, double* out) {
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = lead[j] - c * (total - prefix[j]);
    m = std::fmax(m, std::fabs(out[j]));
  }
  return m;
}

double envelope_violation_scalar(const double* y, std::size_t n, double y0, double ratio) {
  double m = -std::numeric_limits<double>::infinity();
  double env = y0;
  for (std::size_t j = 0; j < n; ++j) {
    m = std::fmax(m, y[j] - env);
    env *= ratio;
  }
  return m;
}

}  // namespace

const KernelSet& scalar_kernels() noexcept {
  static const KernelSet set{Isa::scalar,
                             "scalar",
                             &sum_scalar,
                             &max_abs_scalar,
                             &max_abs_diff_scalar,
                             &step_extend_scalar,
                             &trapezoid_prefix_scalar,
                             &residual_sweep_scalar,
                             &envelope_violation_scalar};
  return set;
}

}  // namespace deltarec::simd
