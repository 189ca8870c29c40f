#include "deltarec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "deltarec/errors.hpp"
#include "deltarec/simd/kernels.hpp"

namespace deltarec {

DiscreteSurvival LatticeSolution::to_survival() const {
  DiscreteSurvival d;
  d.truncated = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    d.points.push_back(static_cast<double>(i));
    d.survival.push_back(values[i]);
  }
  // Σ_{j≥N} y(j) = y(N + δ)/c; run the recurrence δ more steps to get y(N + δ).
  std::vector<double> ext = values;
  const auto dd = static_cast<std::size_t>(delta);
  for (std::size_t i = values.size(); i < values.size() + dd; ++i) {
    ext.push_back(ext[i - 1] - params.c * ext[i - 1 - dd]);
  }
  d.tail_beyond = std::max(0.0, ext.back() / params.c);
  return d;
}

LatticeSolution solve_steps_lattice(const ProblemParams& params, const InitialFunction& phi,
                                    std::size_t n_horizon) {
  params.validate();
  const int d = lattice_delta(params);
  phi.validate_lattice();
  if (static_cast<int>(phi.values().size()) != d + 1) {
    throw ValidationError("lattice phi must have delta + 1 = " + std::to_string(d + 1) +
                          " values, got " + std::to_string(phi.values().size()));
  }
  const auto dd = static_cast<std::size_t>(d);
  if (n_horizon < dd) throw ValidationError("n_horizon must be at least delta");
  LatticeSolution sol;
  sol.params = params;
  sol.delta = d;
  sol.values.assign(phi.values().begin(), phi.values().end());
  sol.values.resize(n_horizon + 1);
  // The step formula y(i) = y(kδ) − c·Σ_{j=(k−1)δ}^{i−δ−1} y(j) telescopes to
  // y(i) = y(i − 1) − c·y(i − 1 − δ); the local form avoids differencing large
  // running sums, so rounding stays relative to the current magnitude.
  const double c = params.c;
  for (std::size_t i = dd + 1; i <= n_horizon; ++i) {
    sol.values[i] = sol.values[i - 1] - c * sol.values[i - 1 - dd];
    if (!std::isfinite(sol.values[i])) {
      throw ValidationError("lattice solver produced non-finite values", static_cast<double>(i));
    }
  }
  return sol;
}

double decay_bound_check(const LatticeSolution& sol) {
  const auto d = static_cast<std::size_t>(sol.delta);
  if (sol.size() <= d) return -std::numeric_limits<double>::infinity();
  return simd::kernels().envelope_violation(sol.values.data() + d, sol.size() - d, sol.values[d],
                                            1.0 - sol.params.c);
}

PositivityVerdict positivity_scan_lattice(const LatticeSolution& sol, double tolerance) {
  PositivityVerdict v;
  const auto d = static_cast<std::size_t>(sol.delta);
  for (std::size_t i = 0; i < sol.size(); ++i) {
    v.scanned_to = static_cast<double>(i);
    // Tolerance is relative to the largest |y| in the preceding delay window.
    double scale = 0.0;
    for (std::size_t j = i > d ? i - d - 1 : 0; j < i; ++j) {
      scale = std::max(scale, std::fabs(sol.values[j]));
    }
    if (sol.values[i] <= -tolerance * scale || (tolerance == 0.0 && sol.values[i] <= 0.0)) {
      v.first_nonpositive_t = static_cast<double>(i);
      return v;
    }
  }
  v.positive_on_horizon = true;
  return v;
}

}  // namespace deltarec
