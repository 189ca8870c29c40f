#pragma once

#include <cmath>
#include <numbers>

namespace deltarec {

/// The pair (c, δ) defining the problem P_{c,δ}: find F such that N_n − c·M_n
/// is a martingale, N_n counting δ-records and M_n the running maximum.
struct ProblemParams {
  double c = 1.0;
  double delta = 1.0;

  /// Throws ValidationError unless c > 0, δ ≠ 0 and both are finite.
  void validate() const;

  double c_delta() const noexcept { return c * delta; }
  bool delta_is_integer() const noexcept;
};

/// Relative slack used for threshold comparisons (cδ against 1/e etc.).
inline constexpr double kThresholdSlack = 1e-14;

/// 1/e: P_{c,δ} has continuous members with support ℝ₊ iff cδ ≤ 1/e.
inline constexpr double continuous_threshold() noexcept { return 1.0 / std::numbers::e; }

/// (δ/(δ+1))^{δ+1}: P_{c,δ} has lattice members on ℤ₊ iff cδ ≤ this value.
double threshold_lattice(int delta);

/// 3 − 2√2, the upper limit on a for the sufficient positivity criteria.
inline constexpr double sufficient_a_limit() noexcept { return 3.0 - 2.0 * std::numbers::sqrt2; }

/// cδ ≤ 1/e within kThresholdSlack (relative).
bool continuous_members_possible(const ProblemParams& p) noexcept;
/// cδ ≤ (δ/(δ+1))^{δ+1} within kThresholdSlack (relative); δ must be integral.
bool lattice_members_possible(const ProblemParams& p);

/// Integer value of δ for the lattice case; rejects non-integral or non-positive δ.
int lattice_delta(const ProblemParams& p);

}  // namespace deltarec
