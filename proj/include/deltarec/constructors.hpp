#pragma once

// Explicit members of P_{c,δ}: discrete solutions for δ < 0, bounded-support
// solutions for δ > 0, and the exponential / gamma-mixture and geometric /
// negative-binomial families with their parameter equations.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "deltarec/params.hpp"
#include "deltarec/survival.hpp"

namespace deltarec {

struct RateRoots {
  enum class Regime { none, tangent, two };
  Regime regime = Regime::none;
  std::vector<double> roots;  ///< ascending
};

std::string_view to_string(RateRoots::Regime r) noexcept;

/// δ < 0: G(a_n) = G(a_{n−1}) / (1 + c·(a_{n+1} − a_n)) with G(a_0) = g0.
/// Needs n_max + 1 points (each value consumes its forward gap) and returns the
/// n_max atoms a_0..a_{n_max−1}, flagged truncated; the tail integral after the
/// last atom is closed by the identity c·∫_{a_N}^∞ G = G(a_{N−1}).
DiscreteSurvival construct_neg_delta(const ProblemParams& params, std::span<const double> points,
                                     double g0, std::size_t n_max);

/// The one value of G(a_0) for which H also vanishes at a_0 itself:
/// 1 / (1 + c·(a_1 − a_0)). H(a_n) = 0 for n ≥ 1 holds for any G(a_0).
double consistent_g0(const ProblemParams& params, std::span<const double> points);

/// δ > 0, cδ < 1: G(a_n) = G(a_0)·Π_{i<n} (1 − c·(a_{i+1} − a_i)), requiring
/// δ < a_{n+1} − a_n < 1/c and a final gap of exactly 1/c (so G(a_m) = 0).
DiscreteSurvival construct_bounded(const ProblemParams& params, std::span<const double> points,
                                   double g0);

/// Roots of θ·e^{−θδ} = c (Exp(θ) ∈ P_{c,δ}).
RateRoots solve_exponential_rates(const ProblemParams& params);

/// Roots of p·(1 − p)^δ = c for integer δ ≥ 1 (Geom(p) ∈ P_{c,δ}).
RateRoots solve_geometric_params(const ProblemParams& params);

/// Exp(θ): G(t) = e^{−θt}, t ≥ origin.
ClosedFormSurvival exponential_law(double theta, double origin = 0.0);

/// Geom(p) on ℤ₊: G(t) = (1 − p)^{⌊t⌋+1}.
ClosedFormSurvival geometric_law(double p);

struct GammaMixture {
  ProblemParams params;    ///< c = 1/(eδ)
  ClosedFormSurvival law;  ///< (αt + 1)·e^{−t/δ}
  ContinuousSolution grid;
};

/// Gamma(2, 1/δ)–Exp(1/δ) mixtures at the tangent point cδ = 1/e; α ∈ [0, 1/δ].
GammaMixture gamma_exp_mixture(double delta, double alpha, std::size_t points_per_delay = 1024,
                               double horizon_delays = 30.0);

struct NegBinMixture {
  ProblemParams params;    ///< c = (δ/(δ+1))^{δ+1}/δ
  ClosedFormSurvival law;  ///< (α⌊t⌋ + 1)·(δ/(δ+1))^{⌊t⌋+1}
  DiscreteSurvival table;  ///< values on {0..n_max}, truncated, exact tail
};

/// Geometric / negative-binomial mixtures at the lattice tangent point; α ∈ [0, 1/δ).
NegBinMixture geom_negbin_mixture(int delta, double alpha, std::size_t n_max = 200);

}  // namespace deltarec
