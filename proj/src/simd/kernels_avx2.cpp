// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "kernels_impl.hpp"

namespace deltarec::simd::detail {
namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

// In-register inclusive scan of four lanes.
inline __m256d scan4(__m256d v) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d s1 = _mm256_permute4x64_pd(v, _MM_SHUFFLE(2, 1, 0, 0));
  s1 = _mm256_blend_pd(s1, zero, 0b0001);
  v = _mm256_add_pd(v, s1);
  __m256d s2 = _mm256_permute4x64_pd(v, _MM_SHUFFLE(1, 0, 0, 0));
  s2 = _mm256_blend_pd(s2, zero, 0b0011);
  return _mm256_add_pd(v, s2);
}

double sum_avx2(const double* x, std::size_t n) {
  if (n > 256) {
    const std::size_t half = (n / 2) & ~std::size_t{3};
    return sum_avx2(x, half) + sum_avx2(x + half, n - half);
  }
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double max_abs_avx2(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(x + i)));
  double r = hmax(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, abs_pd(d));
  }
  double r = hmax(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i] - b[i]));
  return r;
}

void step_extend_avx2(const double* prefix, std::size_t n, double base, double c, double* out) {
  if (n == 0) return;
  const double p0 = prefix[0];
  const __m256d vbase = _mm256_set1_pd(base);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vp0 = _mm256_set1_pd(p0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(prefix + j), vp0);
    _mm256_storeu_pd(out + j, _mm256_fnmadd_pd(vc, d, vbase));
  }
  for (; j < n; ++j) out[j] = base - c * (prefix[j] - p0);
}

void trapezoid_prefix_avx2(const double* y, std::size_t n, double h, double start,
                           double* prefix) {
  if (n == 0) return;
  prefix[0] = start;
  const __m256d hh = _mm256_set1_pd(0.5 * h);
  __m256d carry = _mm256_set1_pd(start);
  std::size_t j = 1;
  for (; j + 4 <= n; j += 4) {
    const __m256d left = _mm256_loadu_pd(y + j - 1);
    const __m256d right = _mm256_loadu_pd(y + j);
    const __m256d cells = _mm256_mul_pd(hh, _mm256_add_pd(left, right));
    const __m256d run = _mm256_add_pd(scan4(cells), carry);
    _mm256_storeu_pd(prefix + j, run);
    carry = _mm256_permute4x64_pd(run, _MM_SHUFFLE(3, 3, 3, 3));
  }
  double acc = prefix[j - 1];
  for (; j < n; ++j) {
    acc += 0.5 * h * (y[j - 1] + y[j]);
    prefix[j] = acc;
  }
}

double residual_sweep_avx2(const double* lead, const double* prefix, std::size_t n, double total,
                           double c, double* out) {
  const __m256d vt = _mm256_set1_pd(total);
  const __m256d vc = _mm256_set1_pd(c);
  __m256d m = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d tail = _mm256_sub_pd(vt, _mm256_loadu_pd(prefix + j));
    const __m256d r = _mm256_fnmadd_pd(vc, tail, _mm256_loadu_pd(lead + j));
    _mm256_storeu_pd(out + j, r);
    m = _mm256_max_pd(m, abs_pd(r));
  }
  double mx = hmax(m);
  for (; j < n; ++j) {
    out[j] = lead[j] - c * (total - prefix[j]);
    mx = std::fmax(mx, std::fabs(out[j]));
  }
  return mx;
}

double envelope_violation_avx2(const double* y, std::size_t n, double y0, double ratio) {
  double mx = -std::numeric_limits<double>::infinity();
  if (n == 0) return mx;
  const double r2 = ratio * ratio;
  __m256d env = _mm256_setr_pd(y0, y0 * ratio, y0 * r2, y0 * r2 * ratio);
  const __m256d step = _mm256_set1_pd(r2 * r2);
  __m256d m = _mm256_set1_pd(mx);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    m = _mm256_max_pd(m, _mm256_sub_pd(_mm256_loadu_pd(y + j), env));
    env = _mm256_mul_pd(env, step);
  }
  mx = hmax(m);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, env);
  double e = lanes[0];
  for (; j < n; ++j) {
    mx = std::fmax(mx, y[j] - e);
    e *= ratio;
  }
  return mx;
}

}  // namespace

const KernelSet& avx2_set() noexcept {
  static const KernelSet set{Isa::avx2,
                             "avx2",
                             &sum_avx2,
                             &max_abs_avx2,
                             &max_abs_diff_avx2,
                             &step_extend_avx2,
                             &trapezoid_prefix_avx2,
                             &residual_sweep_avx2,
                             &envelope_violation_avx2};
  return set;
}

}  // namespace deltarec::simd::detail
