#pragma once

// Data-parallel inner loops used by the grid solver, the residual sweeps and
// the Monte Carlo reductions. Every kernel has a scalar reference version; the
// AVX2 variants are compiled separately and picked at runtime when the CPU
// supports them. Set DELTAREC_SIMD=scalar (or avx2) to force a variant.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace deltarec::simd {

enum class Isa { scalar, avx2 };

struct KernelSet {
  Isa isa;
  std::string_view name;

  /// Σ x, accumulated in a fixed order for a given ISA.
  double (*sum)(const double* x, std::size_t n);

  /// max |x_i|; 0 for n == 0.
  double (*max_abs)(const double* x, std::size_t n);

  /// max |a_i − b_i|.
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);

  /// out_j = base − c·(prefix_j − prefix_0), j < n. One method-of-steps interval.
  void (*step_extend)(const double* prefix, std::size_t n, double base, double c, double* out);

  /// prefix_0 = start; prefix_j = prefix_{j−1} + h/2·(y_{j−1} + y_j). Composite trapezoid.
  void (*trapezoid_prefix)(const double* y, std::size_t n, double h, double start, double* prefix);

  /// out_j = lead_j − c·(total − prefix_j); returns max |out_j|. Residual H on a grid.
  double (*residual_sweep)(const double* lead, const double* prefix, std::size_t n, double total,
                           double c, double* out);

  /// max_j (y_j − y0·ratio^j); −inf for n == 0. Exponential-envelope check.
  double (*envelope_violation)(const double* y, std::size_t n, double y0, double ratio);
};

const KernelSet& scalar_kernels() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelSet* avx2_kernels() noexcept;

/// Best available set, honouring the DELTAREC_SIMD override. Resolved once.
const KernelSet& kernels() noexcept;

/// All sets usable on this machine (scalar first).
std::vector<const KernelSet*> available_kernels();

// Span conveniences over the active set.
inline double sum(std::span<const double> x) { return kernels().sum(x.data(), x.size()); }
inline double max_abs(std::span<const double> x) { return kernels().max_abs(x.data(), x.size()); }

}  // namespace deltarec::simd
