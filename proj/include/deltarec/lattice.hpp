#pragma once

// Discrete method of steps for ΔG(i) + c·G(i − δ) = 0 on ℤ₊ with integer δ ≥ 1.

#include <cstddef>
#include <vector>

#include "deltarec/dde.hpp"
#include "deltarec/params.hpp"
#include "deltarec/survival.hpp"

namespace deltarec {

struct LatticeSolution {
  ProblemParams params;
  int delta = 1;
  std::vector<double> values;  ///< y(0), …, y(n_horizon)

  std::size_t size() const noexcept { return values.size(); }
  /// The solution as a (truncated) survival table on {0, …, n_horizon}.
  DiscreteSurvival to_survival() const;
};

/// y(i) = y(kδ) − c·Σ_{j=(k−1)δ}^{i−δ−1} y(j) for kδ ≤ i ≤ (k+1)δ, with
/// y = φ on {0, …, δ}. Equivalent to y(i + 1) = y(i) − c·y(i − δ).
LatticeSolution solve_steps_lattice(const ProblemParams& params, const InitialFunction& phi,
                                    std::size_t n_horizon);

/// max over k ≥ δ of y(k) − y(δ)·(1 − c)^{k−δ}.
double decay_bound_check(const LatticeSolution& sol);

PositivityVerdict positivity_scan_lattice(const LatticeSolution& sol, double tolerance = 1e-12);

}  // namespace deltarec
