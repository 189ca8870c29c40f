#include "deltarec/transforms.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "deltarec/core.hpp"
#include "deltarec/errors.hpp"
#include "deltarec/quadrature.hpp"

namespace deltarec {
namespace {

// 8-point Gauss–Legendre on [−1, 1]; exact through degree 15.
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290,
                                            0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
constexpr std::size_t kClosedFormPanels = 256;

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    acc += kGlWeights[i] * (f(mid - half * kGlNodes[i]) + f(mid + half * kGlNodes[i]));
  }
  return acc * half;
}

// ∫_0^δ w(t)·G(α + t) dt. Grid members are integrated by composite Simpson
// on the knot samples (the knots sample a smooth solution, so this beats
// integrating the piecewise-linear interpolant); closed forms use panel-wise
// Gauss–Legendre.
double weighted_initial(const Survival& member, double delta, const std::function<double(double)>& w) {
  if (const auto* s = std::get_if<ContinuousSolution>(&member)) {
    const auto panels = static_cast<std::size_t>(std::nearbyint(delta / s->grid_step));
    if (std::fabs(static_cast<double>(panels) * s->grid_step - delta) > 1e-9 * delta ||
        panels >= s->size()) {
      throw ValidationError("delta must be a whole number of grid steps inside the grid");
    }
    std::vector<double> f(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) {
      f[i] = w(s->grid_step * static_cast<double>(i)) * s->values[i];
    }
    return quad::simpson(f, s->grid_step);
  }
  const double alpha = support_start(member);
  auto integrand = [&](double t) { return w(t) * eval_survival(member, alpha + t); };
  const double h = delta / static_cast<double>(kClosedFormPanels);
  double acc = 0.0;
  for (std::size_t i = 0; i < kClosedFormPanels; ++i) {
    acc += gauss_legendre(integrand, h * static_cast<double>(i), h * static_cast<double>(i + 1));
  }
  return acc;
}

void require_member(const Survival& member, const ProblemParams& params) {
  params.validate();
  if (!(params.delta > 0.0)) throw ValidationError("transforms need delta > 0");
  if (std::holds_alternative<DiscreteSurvival>(member) || is_lattice(member)) {
    throw ValidationError("transforms are defined for continuous members only");
  }
  const ResidualReport rep = residual_sup(member, params);
  if (!rep.member) {
    throw ValidationError("member is not certified in P_{c,delta}: residual " +
                              std::to_string(rep.sup) + " exceeds " + std::to_string(rep.tolerance),
                          rep.worst_x);
  }
}

}  // namespace

double laplace_initial_integral(const Survival& member, const ProblemParams& params, double u) {
  const double delta = params.delta;
  const double alpha = support_start(member);
  const double g_delta = eval_survival(member, alpha + delta);
  // ∫_{[0,δ]} e^{−ut} dF = 1 − e^{−uδ}G(δ) − u∫_0^δ e^{−ut}G(t) dt.
  const double weighted = weighted_initial(member, delta, [u](double t) { return std::exp(-u * t); });
  return 1.0 - std::exp(-u * delta) * g_delta - u * weighted;
}

double laplace(const Survival& member, const ProblemParams& params, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) throw ValidationError("Laplace argument u must be > 0", u);
  require_member(member, params);
  const double k = params.c * std::exp(-u * params.delta) / u;
  const double denom = 1.0 + k;
  if (!(denom > 1.0)) throw ValidationError("transform denominator must exceed 1");
  const double value = (laplace_initial_integral(member, params, u) + k) / denom;
  return std::exp(-u * support_start(member)) * value;
}

MomentTable moments(const Survival& member, const ProblemParams& params, std::size_t n_max,
                    std::size_t max_order) {
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  if (n_max > max_order) {
    throw ValidationError("moment order " + std::to_string(n_max) + " exceeds the cap " +
                          std::to_string(max_order) + " (the recurrence loses precision)");
  }
  require_member(member, params);
  const double c = params.c;
  const double delta = params.delta;
  const double alpha = support_start(member);

  MomentTable out;
  out.origin = alpha;
  const double g_delta = eval_survival(member, alpha + delta);
  out.mu1_identity = g_delta / c;

  // L_n = −δⁿG(δ) + n∫_0^δ t^{n−1}G(t) dt for n ≥ 1; L_0 = F(δ).
  out.initial_integrals.resize(n_max);
  out.initial_integrals[0] = 1.0 - g_delta;
  for (std::size_t n = 1; n < n_max; ++n) {
    const double nn = static_cast<double>(n);
    const double w = weighted_initial(member, delta,
                                      [nn](double t) { return std::pow(t, nn - 1.0); });
    out.initial_integrals[n] = -std::pow(delta, nn) * g_delta + nn * w;
  }
  {
    // Stieltjes sum of F over [0, δ] (knots for grids), telescoping to F(δ).
    double acc = 1.0 - eval_survival(member, alpha);
    const std::size_t steps = 1024;
    for (std::size_t i = 0; i < steps; ++i) {
      acc += eval_survival(member, alpha + delta * static_cast<double>(i) / steps) -
             eval_survival(member, alpha + delta * static_cast<double>(i + 1) / steps);
    }
    out.l0_consistency = std::fabs(acc - out.initial_integrals[0]);
  }

  // Moments of Y = X − α, then shifted back.
  std::vector<double> m(n_max + 1, 0.0);
  m[0] = 1.0;
  m[1] = tail_integral(member, alpha);
  std::vector<double> cond(n_max + 1, 1.0);
  for (std::size_t n = 1; n < n_max; ++n) {
    const double np1 = static_cast<double>(n + 1);
    const double lead_a = np1 / c * (1.0 - c * delta) * m[n];
    const double lead_b = np1 / c * out.initial_integrals[n];
    double sum = 0.0;
    double abs_sum = 0.0;
    double binom = 1.0;  // C(n+1, k)
    for (std::size_t k = 1; k + 1 <= n; ++k) {
      binom = binom * static_cast<double>(n + 2 - k) / static_cast<double>(k);
      const double term = binom * m[k] * std::pow(delta, static_cast<double>(n + 1 - k));
      sum += term;
      abs_sum += std::fabs(term);
    }
    m[n + 1] = lead_a - lead_b - sum;
    cond[n + 1] = (std::fabs(lead_a) + std::fabs(lead_b) + abs_sum) / std::fabs(m[n + 1]);
  }
  out.mu.resize(n_max);
  out.condition.assign(cond.begin() + 1, cond.end());
  for (std::size_t n = 1; n <= n_max; ++n) {
    double raw = 0.0;
    double binom = 1.0;  // C(n, k)
    for (std::size_t k = 0; k <= n; ++k) {
      if (k > 0) binom = binom * static_cast<double>(n + 1 - k) / static_cast<double>(k);
      raw += binom * std::pow(alpha, static_cast<double>(n - k)) * m[k];
    }
    out.mu[n - 1] = raw;
  }
  return out;
}

}  // namespace deltarec
