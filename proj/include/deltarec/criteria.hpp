#pragma once

// Positivity criteria for initial functions, the second-order recurrence
// a_n = (1 − a)·a_{n−1} − a·a_{n−2} behind them, and the sandwich bounds.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "deltarec/params.hpp"
#include "deltarec/survival.hpp"

namespace deltarec {

struct RecurrenceParams {
  double a = 0.0;
  double D = 0.0;  ///< (1 − a)² − 4a
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Characteristic roots for a ∈ (0, 3 − 2√2); rejects a outside that range.
RecurrenceParams recurrence_params(double a);

/// a_n = A·λ₁ⁿ + B·λ₂ⁿ, n = 0..n_max, with A = (a₁ − a₀λ₂)/√D, B = (a₀λ₁ − a₁)/√D.
std::vector<double> recurrence_solution(const RecurrenceParams& rp, double a0, double a1,
                                        std::size_t n_max);

/// The same sequence by direct iteration.
std::vector<double> recurrence_iterate(const RecurrenceParams& rp, double a0, double a1,
                                       std::size_t n_max);

struct DominationReport {
  double min_margin = 0.0;  ///< min_k (x_k − a_k)
  std::size_t worst_index = 0;
  bool dominated = false;   ///< min_margin ≥ −1e−12
};

/// For x with x_k ≥ (1 − a)x_{k−1} − a·x_{k−2} (k ≥ 2), confirm x_k ≥ a_k where a
/// solves the recurrence from (x_0, x_1). Throws ValidationError with the index
/// as witness when the premise fails.
DominationReport dominated_sequence_bound(const RecurrenceParams& rp, std::span<const double> x);

struct ConvexSumBound {
  double lhs = 0.0;  ///< Σ g(i)
  double rhs = 0.0;  ///< (n + 1)/2·(g(m) + g(m + n))
  bool holds() const noexcept { return lhs <= rhs * (1.0 + 1e-14) + 1e-300; }
};

/// Sum bound for a decreasing, discrete-convex g; throws when g is not.
ConvexSumBound discrete_convex_sum_bound(std::span<const double> g);

struct InitialFunctionals {
  double first = 0.0;   ///< I₁ (continuous) or S₁ (lattice)
  double second = 0.0;  ///< I₂ or S₂
};

/// I₁ = (1/δ)∫₀^δ φ and I₂ = (1/δ²)∫₀^δ∫₀^t φ, exact for polynomial and tabulated φ.
InitialFunctionals continuous_functionals(const InitialFunction& phi);
/// S₁ = (1/δ)Σ_{j<δ} φ(j) and S₂ = (1/δ²)Σ_{j=δ}^{2δ−1}Σ_{i=0}^{j−δ−1} φ(i).
InitialFunctionals lattice_functionals(const InitialFunction& phi);

enum class Verdict { violates_necessary, sufficient, sufficient_uniform, inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct CriterionReport {
  bool lattice = false;
  double a = 0.0;
  InitialFunctionals functionals;
  double phi_delta = 0.0;
  double necessary_bound = 0.0;
  std::optional<double> sufficient_bound;  ///< unset when a ≥ 3 − 2√2
  std::optional<double> uniform_bound;     ///< continuous only
  std::optional<RecurrenceParams> recurrence;
  Verdict verdict = Verdict::inconclusive;
};

/// Continuous criteria with a = cδ/2. Throws EmptyProblemError when cδ > 1/e.
CriterionReport check_continuous(const InitialFunction& phi, const ProblemParams& params);
/// Lattice criteria with a = c(δ + 1)/2. Throws EmptyProblemError above the lattice threshold.
CriterionReport check_lattice(const InitialFunction& phi, const ProblemParams& params);

struct SandwichRow {
  std::size_t k = 0;  ///< t = kδ
  double t = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Rows k = 0..n_max + 2: φ(0), φ(δ), then a_n ≤ y((n + 2)δ) ≤ a₁(1 − 2a)^{n−1}
/// with a₀ = y(2δ), a₁ = y(3δ) (the upper bound is a₀ at n = 0). Requires the
/// sufficient condition to hold.
std::vector<SandwichRow> sandwich_bounds(const InitialFunction& phi, const ProblemParams& params,
                                         std::size_t n_max);

struct GapRow {
  double a = 0.0;
  double r = 0.0;  ///< I₂/I₁
  double necessary = 0.0;
  double sufficient = 0.0;
};

/// N = 2a(1 − 2ar)/(1 − 2a) and S = 2a((1 − λ₂) − 2ar)/(1 − 2a − λ₂) on the
/// product of ratios and a-grid; grid points outside [0, 3 − 2√2) are skipped.
std::vector<GapRow> gap_region_table(std::span<const double> ratios, std::span<const double> a_grid);

}  // namespace deltarec
