#pragma once

// Evaluation of survival representations and of the residual
//   H(x) = G(x + δ) − c·∫_x^∞ G(t) dt,
// whose vanishing on the support characterises membership in P_{c,δ};
// plus the two solution-preserving transforms (mixtures and tail conditioning).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "deltarec/params.hpp"
#include "deltarec/survival.hpp"

namespace deltarec {

double eval_survival(const DiscreteSurvival& d, double x);
double eval_survival(const ContinuousSolution& s, double x);
double eval_survival(const ClosedFormSurvival& f, double x);
double eval_survival(const Survival& dist, double x);

/// ∫_x^∞ G(t) dt. Throws OutOfRangeError when x lies past a truncated range.
double tail_integral(const DiscreteSurvival& d, double x);
double tail_integral(const ContinuousSolution& s, double x);
double tail_integral(const ClosedFormSurvival& f, double x);
double tail_integral(const Survival& dist, double x);

double residual_H(const Survival& dist, const ProblemParams& params, double x);

/// Left endpoint α_F of the support.
double support_start(const Survival& dist);
/// E[X] = α_F + ∫_{α_F}^∞ G.
double mean_of(const Survival& dist);
bool is_lattice(const Survival& dist);

struct ResidualReport {
  double sup = 0.0;      ///< max |H| over the probes
  double worst_x = 0.0;  ///< probe attaining the max
  double tolerance = 0.0;
  std::size_t probes = 0;
  bool member = false;  ///< sup ≤ tolerance
};

/// Residual tolerance used when the caller does not supply one: 1e−10 for
/// exact families, 10× the quadrature error estimate for grid solutions.
/// DELTAREC_RESIDUAL_TOL overrides the exact-family value.
double default_residual_tolerance(const Survival& dist);

/// Probe set standing in for T: atoms for discrete data, knots for grids and
/// a dense sample of [α, α + 20|δ|] (or integers up to α + 200) for closed forms.
/// Probes whose evaluation would leave a truncated range are dropped.
std::vector<double> default_probes(const Survival& dist, const ProblemParams& params);

ResidualReport residual_sup(const Survival& dist, const ProblemParams& params,
                            std::span<const double> probes,
                            std::optional<double> tolerance = std::nullopt);
ResidualReport residual_sup(const Survival& dist, const ProblemParams& params);

/// H at every knot t_i with t_i + δ inside the grid (δ must be a whole number
/// of grid steps). Vectorised; the ordering matches the knots.
std::vector<double> residual_on_grid(const ContinuousSolution& sol, const ProblemParams& params);

/// λ·d1 + (1 − λ)·d2 (pointwise on survival functions). Supports must agree.
Survival mix(const Survival& d1, const Survival& d2, double lambda);

/// The conditioned law G(x)/G(x0) on [x0, ∞) (and 1 below x0).
Survival tail_condition(const Survival& dist, double x0);

/// Grid representation of sampled survival values: trapezoid prefix
/// integrals, tail beyond the horizon from the step identity
/// c·∫_T^∞ y = y(T + δ) (bounded above by y(T)/c), and a Richardson estimate
/// of the quadrature error.
ContinuousSolution grid_from_values(const ProblemParams& params, double origin, double grid_step,
                                    std::vector<double> values);

/// Tabulate a continuous closed form on a grid with exact prefix integrals.
ContinuousSolution tabulate(const ClosedFormSurvival& f, const ProblemParams& params,
                            std::size_t points_per_delay, double horizon);

}  // namespace deltarec
