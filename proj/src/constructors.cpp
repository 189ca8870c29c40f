#include "deltarec/constructors.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "deltarec/core.hpp"
#include "deltarec/errors.hpp"
#include "deltarec/quadrature.hpp"

namespace deltarec {
namespace {

constexpr double kTangentRelTol = 1e-12;
constexpr double kRootTol = 1e-16;

void require_increasing(std::span<const double> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw ValidationError("non-finite support point", points[i]);
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw ValidationError("support points must be strictly increasing", points[i]);
    }
  }
}

void require_g0(double g0) {
  if (!(g0 > 0.0 && g0 < 1.0)) throw ValidationError("G0 must lie in (0,1)", g0);
}

// Upper root of a unimodal map, bracketed by growing hi geometrically.
double upper_root(const std::function<double(double)>& f, double peak, double cap) {
  double lo = peak;
  double hi = std::min(2.0 * peak, cap);
  while (f(hi) > 0.0 && hi < cap) {
    lo = hi;
    hi = std::min(2.0 * hi, cap);
  }
  return quad::bisect(f, lo, hi, kRootTol);
}

}  // namespace

std::string_view to_string(RateRoots::Regime r) noexcept {
  switch (r) {
    case RateRoots::Regime::none: return "none";
    case RateRoots::Regime::tangent: return "tangent";
    case RateRoots::Regime::two: return "two";
  }
  return "none";
}

double consistent_g0(const ProblemParams& params, std::span<const double> points) {
  params.validate();
  if (points.size() < 2) throw ValidationError("need at least two support points");
  return 1.0 / (1.0 + params.c * (points[1] - points[0]));
}

DiscreteSurvival construct_neg_delta(const ProblemParams& params, std::span<const double> points,
                                     double g0, std::size_t n_max) {
  params.validate();
  if (!(params.delta < 0.0)) throw ValidationError("construct_neg_delta requires delta < 0");
  require_g0(g0);
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  if (points.size() < n_max + 1) {
    throw ValidationError("need n_max + 1 support points: G(a_n) uses the gap a_{n+1} - a_n");
  }
  require_increasing(points);
  const double margin = std::fabs(params.delta);
  for (std::size_t i = 0; i + 1 <= n_max; ++i) {
    const double gap = points[i + 1] - points[i];
    if (gap < margin * (1.0 - 1e-12)) {
      throw ValidationError("gap a_{n+1} - a_n = " + std::to_string(gap) + " is below |delta|",
                            points[i]);
    }
  }

  DiscreteSurvival out;
  out.truncated = true;
  out.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(n_max));
  out.survival.resize(n_max);
  out.survival[0] = g0;
  for (std::size_t n = 1; n < n_max; ++n) {
    out.survival[n] = out.survival[n - 1] / (1.0 + params.c * (points[n + 1] - points[n]));
  }
  const double last = out.survival.back();
  const double last_gap = points[n_max] - points[n_max - 1];
  out.tail_beyond = last_gap * last + last / params.c;
  out.validate();
  return out;
}

DiscreteSurvival construct_bounded(const ProblemParams& params, std::span<const double> points,
                                   double g0) {
  params.validate();
  const double c = params.c;
  const double delta = params.delta;
  if (!(delta > 0.0)) throw ValidationError("construct_bounded requires delta > 0");
  if (!(c * delta < 1.0)) throw ValidationError("bounded-support solutions need c*delta < 1");
  require_g0(g0);
  if (points.size() < 2) throw ValidationError("need at least two support points (m >= 1)");
  require_increasing(points);
  const std::size_t m = points.size() - 1;
  const double last_gap = points[m] - points[m - 1];
  if (std::fabs(last_gap - 1.0 / c) > 1e-12 * std::max(1.0, 1.0 / c)) {
    throw ValidationError("final gap must equal 1/c = " + std::to_string(1.0 / c),
                          points[m - 1]);
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double gap = points[i + 1] - points[i];
    if (!(gap > delta)) {
      throw ValidationError("gap " + std::to_string(gap) + " must exceed delta", points[i]);
    }
    if (!(gap < 1.0 / c)) {
      throw ValidationError("gap " + std::to_string(gap) + " must stay below 1/c", points[i]);
    }
  }
  DiscreteSurvival out;
  out.points.assign(points.begin(), points.end());
  out.survival.resize(m + 1);
  out.survival[0] = g0;
  for (std::size_t n = 1; n < m; ++n) {
    out.survival[n] = out.survival[n - 1] * (1.0 - c * (points[n] - points[n - 1]));
  }
  out.survival[m] = 0.0;
  out.truncated = false;
  out.tail_beyond = 0.0;
  out.validate();
  return out;
}

RateRoots solve_exponential_rates(const ProblemParams& params) {
  params.validate();
  if (!(params.delta > 0.0)) throw ValidationError("exponential members need delta > 0");
  const double c = params.c;
  const double delta = params.delta;
  const double peak = 1.0 / delta;
  const double scaled = params.c_delta() * std::numbers::e;  // 1 at the tangent point
  RateRoots out;
  if (std::fabs(scaled - 1.0) <= kTangentRelTol) {
    out.regime = RateRoots::Regime::tangent;
    out.roots = {peak};
    return out;
  }
  if (!continuous_members_possible(params)) return out;
  auto f = [c, delta](double t) { return t * std::exp(-t * delta) - c; };
  out.regime = RateRoots::Regime::two;
  out.roots = {quad::bisect(f, 0.0, peak, kRootTol), upper_root(f, peak, 1e300)};
  return out;
}

RateRoots solve_geometric_params(const ProblemParams& params) {
  params.validate();
  const int d = lattice_delta(params);
  const double c = params.c;
  const double peak = 1.0 / (d + 1.0);
  const double thr = threshold_lattice(d);
  RateRoots out;
  if (std::fabs(params.c_delta() / thr - 1.0) <= kTangentRelTol) {
    out.regime = RateRoots::Regime::tangent;
    out.roots = {peak};
    return out;
  }
  if (!lattice_members_possible(params)) return out;
  auto f = [c, d](double p) { return p * std::pow(1.0 - p, d) - c; };
  out.regime = RateRoots::Regime::two;
  out.roots = {quad::bisect(f, 0.0, peak, kRootTol), quad::bisect(f, peak, 1.0, kRootTol)};
  return out;
}

ClosedFormSurvival exponential_law(double theta, double origin) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ValidationError("Exp rate must be positive");
  ClosedFormSurvival f;
  f.origin = origin;
  f.components = {Component{ComponentKind::exponential, 1.0, theta, 0.5, 0.0}};
  f.label = "Exp(" + std::to_string(theta) + ")";
  return f;
}

ClosedFormSurvival geometric_law(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("Geom parameter must lie in (0,1)", p);
  ClosedFormSurvival f;
  f.components = {Component{ComponentKind::geometric, 1.0, 1.0, 1.0 - p, 0.0}};
  f.label = "Geom(" + std::to_string(p) + ")";
  return f;
}

GammaMixture gamma_exp_mixture(double delta, double alpha, std::size_t points_per_delay,
                               double horizon_delays) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be positive");
  if (!(alpha >= 0.0 && alpha <= (1.0 / delta) * (1.0 + 1e-12))) {
    throw ValidationError("alpha must lie in [0, 1/delta]: G not decreasing otherwise", alpha);
  }
  GammaMixture out;
  out.params = ProblemParams{1.0 / (std::numbers::e * delta), delta};
  out.law.components = {Component{ComponentKind::exp_linear, 1.0, 1.0 / delta, 0.5, alpha}};
  out.law.label = "GammaExpMixture(alpha=" + std::to_string(alpha) + ")";
  out.law.validate();
  out.grid = tabulate(out.law, out.params, points_per_delay, horizon_delays * delta);
  return out;
}

NegBinMixture geom_negbin_mixture(int delta, double alpha, std::size_t n_max) {
  if (delta < 1) throw ValidationError("lattice delta must be a positive integer");
  if (!(alpha >= 0.0 && alpha < 1.0 / delta)) {
    throw ValidationError("alpha must lie in [0, 1/delta)", alpha);
  }
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  const double q = static_cast<double>(delta) / (delta + 1.0);
  NegBinMixture out;
  out.params = ProblemParams{threshold_lattice(delta) / delta, static_cast<double>(delta)};
  out.law.components = {Component{ComponentKind::geom_linear, 1.0, 1.0, q, alpha}};
  out.law.label = "NegBinMixture(alpha=" + std::to_string(alpha) + ")";
  out.law.validate();
  out.table.truncated = true;
  for (std::size_t i = 0; i <= n_max; ++i) {
    const double x = static_cast<double>(i);
    out.table.points.push_back(x);
    out.table.survival.push_back(eval_survival(out.law, x));
  }
  out.table.tail_beyond = tail_integral(out.law, static_cast<double>(n_max));
  out.table.validate();
  return out;
}

}  // namespace deltarec
