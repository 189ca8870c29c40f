#pragma once

// Laplace transform and moment recurrence for continuous members of P_{c,δ}.

#include <cstddef>
#include <vector>

#include "deltarec/params.hpp"
#include "deltarec/survival.hpp"

namespace deltarec {

/// E e^{−uX} = (∫₀^δ e^{−ut}F(dt) + c·e^{−uδ}/u) / (1 + c·e^{−uδ}/u), measured
/// from the support start. The initial integral is taken by parts against G.
/// Requires a certified continuous member (grid or closed form) and u > 0.
double laplace(const Survival& member, const ProblemParams& params, double u);

/// ∫₀^δ e^{−ut} F(dt) alone (the initial-segment integral of the transform).
double laplace_initial_integral(const Survival& member, const ProblemParams& params, double u);

struct MomentTable {
  std::vector<double> mu;                 ///< μ₁, …, μ_{n_max} (raw moments of X)
  std::vector<double> initial_integrals;  ///< L_n = ∫₀^δ tⁿ F(dt), n = 0..n_max−1
  std::vector<double> condition;          ///< per-order cancellation estimate (1 for μ₁)
  double mu1_identity = 0.0;              ///< G(α + δ)/c, an independent value of μ₁ − α
  double l0_consistency = 0.0;            ///< |∫₀^δ F(dt) − F(δ)| from a Stieltjes sum
  double origin = 0.0;
};

/// Raw moments via μ_{n+1} = ((n+1)/c)((1 − cδ)μ_n − L_n) − Σ_{k=1}^{n−1} C(n+1,k) μ_k δ^{n+1−k},
/// seeded with μ₁ = ∫ G. Orders beyond max_order are rejected.
MomentTable moments(const Survival& member, const ProblemParams& params, std::size_t n_max,
                    std::size_t max_order = 12);

}  // namespace deltarec
