#include "deltarec/dde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "deltarec/core.hpp"
#include "deltarec/errors.hpp"
#include "deltarec/quadrature.hpp"
#include "deltarec/simd/kernels.hpp"

namespace deltarec {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

ContinuousSolution make_grid(const ProblemParams& params, const StepSolverConfig& config) {
  ContinuousSolution s;
  s.params = params;
  s.origin = 0.0;
  s.points_per_delay = config.points_per_delay;
  s.grid_step = params.delta / static_cast<double>(config.points_per_delay);
  const std::size_t n = config.points_per_delay * config.horizon_delays + 1;
  s.values.assign(n, 0.0);
  s.prefix.assign(n, 0.0);
  return s;
}

// Extend steps first_step.. from the data already stored on [0, first_step·δ].
void march(ContinuousSolution& s, std::size_t first_step) {
  const auto& k = simd::kernels();
  const std::size_t P = s.points_per_delay;
  const std::size_t steps = (s.size() - 1) / P;
  const double c = s.params.c;
  double error = 0.0;
  for (std::size_t step = first_step; step < steps; ++step) {
    const std::size_t lo = step * P;
    k.step_extend(s.prefix.data() + lo - P, P + 1, s.values[lo], c, s.values.data() + lo);
    k.trapezoid_prefix(s.values.data() + lo, P + 1, s.grid_step, s.prefix[lo],
                       s.prefix.data() + lo);
    const double simpson = quad::simpson(std::span(s.values).subspan(lo, P + 1), s.grid_step);
    error += std::fabs(s.prefix[lo + P] - s.prefix[lo] - simpson);
    for (std::size_t i = lo; i <= lo + P; ++i) {
      if (!std::isfinite(s.values[i])) {
        throw ValidationError("solver produced non-finite values", s.knot(i));
      }
    }
  }
  s.quadrature_error = c * error;

  // ∫_T^∞ y = y(T)/c − ∫_{T−δ}^T y, from c·∫_T^∞ y = y(T + δ) and the step identity.
  const std::size_t last = s.size() - 1;
  const double yT = s.values[last];
  s.tail_bound = std::max(0.0, yT) / c;
  s.tail_beyond = std::clamp(yT / c - (s.prefix[last] - s.prefix[last - P]), 0.0,
                             std::max(0.0, s.tail_bound));
}

// Values and exact prefix on [δ, 2δ] from an initial segment with known integrals.
void exact_first_step(ContinuousSolution& s, const InitialFunction& phi) {
  const std::size_t P = s.points_per_delay;
  const double c = s.params.c;
  const double base = s.values[P];
  const double p_delta = s.prefix[P];
  for (std::size_t j = 0; j <= P; ++j) {
    const double u = s.grid_step * static_cast<double>(j);
    s.values[P + j] = base - c * phi.integral(u);
    s.prefix[P + j] = p_delta + base * u - c * phi.double_integral(u);
  }
  s.values[P] = base;
}

}  // namespace

void StepSolverConfig::validate() const {
  if (points_per_delay < 8) throw ValidationError("points_per_delay must be at least 8");
  if (horizon_delays < 3) throw ValidationError("horizon_delays must be at least 3");
  if (!(positivity_tolerance >= 0.0)) {
    throw ValidationError("positivity_tolerance must be nonnegative");
  }
}

ContinuousSolution solve_steps(const ProblemParams& params, const InitialFunction& phi,
                               const StepSolverConfig& config) {
  params.validate();
  config.validate();
  if (!(params.delta > 0.0)) throw ValidationError("the delay equation needs delta > 0");
  phi.validate_continuous();
  if (std::fabs(phi.delta() - params.delta) > 1e-12 * params.delta) {
    throw ValidationError("initial function is defined on [0," + std::to_string(phi.delta()) +
                          "], expected [0,delta]");
  }
  ContinuousSolution s = make_grid(params, config);
  const std::size_t P = config.points_per_delay;
  for (std::size_t i = 0; i <= P; ++i) {
    const double t = s.grid_step * static_cast<double>(i);
    s.values[i] = phi(t);
    s.prefix[i] = phi.integral(t);
  }
  exact_first_step(s, phi);
  march(s, 2);
  return s;
}

ContinuousSolution fundamental_function(const ProblemParams& params,
                                        const StepSolverConfig& config) {
  params.validate();
  config.validate();
  if (!(params.delta > 0.0)) throw ValidationError("the delay equation needs delta > 0");
  ContinuousSolution s = make_grid(params, config);
  const std::size_t P = config.points_per_delay;
  // y = 1 on [δ, 2δ] since ∫ φ₀ = 0; the prefix there is t − δ.
  for (std::size_t j = 0; j <= P; ++j) {
    s.values[P + j] = 1.0;
    s.prefix[P + j] = s.grid_step * static_cast<double>(j);
  }
  march(s, 2);
  return s;
}

StepIdentityReport step_identity_residual(const ContinuousSolution& sol) {
  StepIdentityReport rep;
  const std::size_t P = sol.points_per_delay;
  const double h = sol.grid_step;
  const double c = sol.params.c;
  const std::size_t steps = (sol.size() - 1) / P;
  double max_y2 = 0.0;
  double max_y = 0.0;
  for (std::size_t i = 1; i + 1 < sol.size(); ++i) {
    max_y = std::max(max_y, std::fabs(sol.values[i]));
    if (i % P == 0) continue;  // y' may jump at multiples of δ
    const double d2 = (sol.values[i + 1] - 2.0 * sol.values[i] + sol.values[i - 1]) / (h * h);
    max_y2 = std::max(max_y2, std::fabs(d2));
  }
  for (std::size_t step = 1; step < steps; ++step) {
    const std::size_t lo = step * P;
    for (std::size_t j = 0; j <= P; ++j) {
      const double integral =
          quad::simpson(std::span(sol.values).subspan(lo - P, j + 1), h);
      const double r = sol.values[lo + j] - (sol.values[lo] - c * integral);
      if (std::fabs(r) > rep.max_abs) {
        rep.max_abs = std::fabs(r);
        rep.worst_t = sol.knot(lo + j);
      }
    }
  }
  const double delta = h * static_cast<double>(P);
  rep.estimate = c * delta * h * h / 12.0 * max_y2 +
                 64.0 * kEps * (max_y + c * delta * max_y) * static_cast<double>(P);
  return rep;
}

DensityInitial initial_from_density(std::span<const double> psi, const ProblemParams& params) {
  params.validate();
  if (!(params.delta > 0.0)) throw ValidationError("density initial functions need delta > 0");
  if (psi.size() < 2) throw ValidationError("density needs at least two samples");
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!(psi[i] >= 0.0) || !std::isfinite(psi[i])) {
      throw ValidationError("density must be finite and nonnegative", static_cast<double>(i));
    }
  }
  const std::size_t n = psi.size() - 1;
  const double h = params.delta / static_cast<double>(n);
  std::vector<double> xs(n + 1);
  std::vector<double> vals(n + 1);
  double first = 0.0;   // ∫_0^t ψ
  double second = 0.0;  // ∫_0^t ∫_0^s ψ
  xs[0] = 0.0;
  vals[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    second += first * h + h * h * (2.0 * psi[i] + psi[i + 1]) / 6.0;
    first += 0.5 * h * (psi[i] + psi[i + 1]);
    xs[i + 1] = h * static_cast<double>(i + 1);
    vals[i + 1] = 1.0 - params.c * second;
  }
  xs[n] = params.delta;
  if (std::fabs(first - 1.0) > 1e-10) {
    throw ValidationError("density must integrate to 1 over [0,delta]; got " +
                          std::to_string(first));
  }
  DensityInitial out{InitialFunction::table(std::move(xs), std::move(vals)),
                     continuous_members_possible(params), first};
  out.phi.validate_continuous();
  return out;
}

ComparisonCertificate compare_with_member(const InitialFunction& phi, const Survival& member,
                                          const ProblemParams& params, std::size_t samples) {
  params.validate();
  phi.validate_continuous();
  if (samples < 2) throw ValidationError("comparison grid needs at least two samples");
  constexpr double kTol = 1e-12;
  const double delta = params.delta;
  ComparisonCertificate cert;
  cert.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = delta * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double excess = phi(t) - eval_survival(member, t);
    if (excess > cert.max_excess) {
      cert.max_excess = excess;
      cert.worst_t = t;
    }
  }
  cert.endpoint_gap = std::fabs(phi(delta) - eval_survival(member, delta));
  if (cert.max_excess > kTol) {
    throw ValidationError("comparison premise phi <= G fails at t = " +
                              std::to_string(cert.worst_t),
                          cert.worst_t);
  }
  if (cert.endpoint_gap > kTol) {
    throw ValidationError("comparison premise phi(delta) = G(delta) fails", delta);
  }
  cert.certified = true;
  return cert;
}

PositivityVerdict positivity_scan(const ContinuousSolution& sol, double tolerance) {
  PositivityVerdict v;
  const std::size_t P = sol.points_per_delay;
  const std::size_t start = std::min(P, sol.size() - 1);
  const double y_delta = std::fabs(sol.values[start]);
  const double floor_zero = tolerance * y_delta;
  const double total = sol.prefix.back() + sol.tail_beyond;
  const double rounding =
      1e3 * kEps * (y_delta + sol.params.c * std::fabs(total));
  // Sliding max of |y| over the preceding window of P knots.
  std::vector<std::size_t> window;
  std::size_t head = 0;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const double a = std::fabs(sol.values[i]);
    while (window.size() > head && std::fabs(sol.values[window.back()]) <= a) window.pop_back();
    if (head > window.size()) head = window.size();
    window.push_back(i);
    while (window[head] + P < i) ++head;
    const double scale = std::fabs(sol.values[window[head]]);
    v.scanned_to = sol.knot(i);
    if (i < start) continue;
    if (i >= start + P && scale <= floor_zero) {
      v.machine_zero_reached = true;
      break;
    }
    if (sol.values[i] <= -(tolerance * scale + rounding) ||
        (tolerance == 0.0 && sol.values[i] <= 0.0)) {
      v.first_nonpositive_t = sol.knot(i);
      return v;
    }
  }
  v.positive_on_horizon = true;
  return v;
}

double decay_envelope_check(const ContinuousSolution& sol, std::optional<double> from) {
  const double t0 = from.value_or(sol.params.delta);
  const double pos = (t0 - sol.origin) / sol.grid_step;
  const auto i0 = static_cast<std::size_t>(std::max(0.0, std::nearbyint(pos)));
  if (i0 >= sol.size()) throw OutOfRangeError("envelope start beyond the grid horizon");
  const double ratio = std::exp(-sol.params.c * sol.grid_step);
  return simd::kernels().envelope_violation(sol.values.data() + i0, sol.size() - i0,
                                            sol.values[i0], ratio);
}

}  // namespace deltarec
