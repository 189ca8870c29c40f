#pragma once

// Method-of-steps solver for y'(t) + c·y(t − δ) = 0 on [δ, ∞) with y = φ on
// [0, δ], and the tools built around it: the fundamental function, the
// comparison principle, initial functions generated from densities, and
// positivity / decay diagnostics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "deltarec/params.hpp"
#include "deltarec/survival.hpp"

namespace deltarec {

struct StepSolverConfig {
  std::size_t points_per_delay = 1024;
  std::size_t horizon_delays = 30;  ///< solve on [0, horizon_delays·δ]
  double positivity_tolerance = 1e-9;

  void validate() const;
};

struct PositivityVerdict {
  bool positive_on_horizon = false;
  std::optional<double> first_nonpositive_t;  ///< knot (or index) of the first sign change
  bool machine_zero_reached = false;          ///< solution decayed into rounding noise
  double scanned_to = 0.0;
};

/// Solve on [0, horizon] from φ ∈ Φ. Steps one and two are computed from the
/// exact integrals of φ; later steps integrate by the composite trapezoid rule.
ContinuousSolution solve_steps(const ProblemParams& params, const InitialFunction& phi,
                               const StepSolverConfig& config = {});

/// Solution from φ₀ = 0 on [0, δ), φ₀(δ) = 1.
ContinuousSolution fundamental_function(const ProblemParams& params,
                                        const StepSolverConfig& config = {});

struct StepIdentityReport {
  double max_abs = 0.0;   ///< max |y(t) − y(kδ) + c∫_{(k−1)δ}^{t−δ} y| (Simpson integrals)
  double estimate = 0.0;  ///< c·δ·h²/12·max|y''| + rounding
  double worst_t = 0.0;
  bool within() const noexcept { return max_abs <= estimate; }
};

/// Re-check the step identity on every knot with an independent quadrature.
StepIdentityReport step_identity_residual(const ContinuousSolution& sol);

struct DensityInitial {
  InitialFunction phi;
  bool certified = false;  ///< cδ ≤ 1/e, so the solution from φ is positive
  double mass = 0.0;       ///< ∫ψ by the trapezoid rule
};

/// φ(t) = 1 − c·∫₀^t∫₀^s ψ for ψ sampled uniformly on [0, δ] (endpoints
/// included). ψ is taken piecewise linear; φ is exact at the sample knots.
DensityInitial initial_from_density(std::span<const double> psi, const ProblemParams& params);

struct ComparisonCertificate {
  bool certified = false;
  double max_excess = 0.0;  ///< max (φ − G) over the check grid (≤ 0 when certified)
  double worst_t = 0.0;
  double endpoint_gap = 0.0;  ///< |φ(δ) − G(δ)|
  std::string anchor = "cor:3.2";
};

/// Premise of the comparison principle: φ ≤ G on [0, δ] and φ(δ) = G(δ). When
/// it holds the solution from φ dominates G and is therefore positive. Throws
/// ValidationError carrying the witness t otherwise.
ComparisonCertificate compare_with_member(const InitialFunction& phi, const Survival& member,
                                          const ProblemParams& params,
                                          std::size_t samples = 4097);

/// Scan the knots for the first sign change. A knot is nonpositive when
/// y ≤ −tol·(max |y| over the preceding delay window) minus a rounding floor.
/// Once the whole window has decayed below tol·y(δ) the scan stops with
/// machine_zero_reached.
PositivityVerdict positivity_scan(const ContinuousSolution& sol, double tolerance = 1e-9);

/// max over knots t ≥ from of y(t) − y(from)·e^{−c(t − from)} (from defaults to δ).
double decay_envelope_check(const ContinuousSolution& sol, std::optional<double> from = {});

}  // namespace deltarec
