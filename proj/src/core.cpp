#include "deltarec/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <type_traits>

#include "deltarec/errors.hpp"
#include "deltarec/simd/kernels.hpp"

namespace deltarec {
namespace {

constexpr double kExactTolerance = 1e-10;

double exact_tolerance() {
  if (const char* env = std::getenv("DELTAREC_RESIDUAL_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0 && std::isfinite(v)) return v;
  }
  return kExactTolerance;
}

// Index of the last atom ≤ x, or −1.
std::ptrdiff_t atom_index(const DiscreteSurvival& d, double x) {
  const auto it = std::upper_bound(d.points.begin(), d.points.end(), x);
  return static_cast<std::ptrdiff_t>(it - d.points.begin()) - 1;
}

// ∫_origin^x y for x inside the grid, integrating the linear interpolant of the last cell.
double prefix_at(const ContinuousSolution& s, double x) {
  const double pos = (x - s.origin) / s.grid_step;
  const std::size_t last = s.size() - 1;
  std::size_t i = pos <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(pos));
  if (i >= last) return s.prefix[last];
  const double d = x - s.knot(i);
  if (d <= 0.0) return s.prefix[i];
  const double slope = (s.values[i + 1] - s.values[i]) / s.grid_step;
  return s.prefix[i] + s.values[i] * d + 0.5 * slope * d * d;
}

void require_same_params(const ProblemParams& a, const ProblemParams& b) {
  if (a.c != b.c || a.delta != b.delta) {
    throw ValidationError("grid solutions were built for different (c, delta)");
  }
}

bool same_component_shape(const Component& a, const Component& b) {
  return a.kind == b.kind && a.rate == b.rate && a.ratio == b.ratio && a.slope == b.slope;
}

ClosedFormSurvival combine(const ClosedFormSurvival& f1, double w1, const ClosedFormSurvival& f2,
                           double w2) {
  ClosedFormSurvival out;
  out.origin = f1.origin;
  auto push = [&](const Component& c, double w) {
    if (w * c.weight == 0.0) return;
    for (Component& existing : out.components) {
      if (same_component_shape(existing, c)) {
        existing.weight += w * c.weight;
        return;
      }
    }
    Component scaled = c;
    scaled.weight *= w;
    out.components.push_back(scaled);
  };
  for (const Component& c : f1.components) push(c, w1);
  for (const Component& c : f2.components) push(c, w2);
  if (out.components.empty()) out.components = f1.components;
  if (w2 == 0.0) out.label = f1.label;
  else if (w1 == 0.0) out.label = f2.label;
  else out.label = "mixture";
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Evaluation

double eval_survival(const DiscreteSurvival& d, double x) {
  const std::ptrdiff_t i = atom_index(d, x);
  if (i < 0) return 1.0;
  const auto idx = static_cast<std::size_t>(i);
  if (idx + 1 == d.points.size() && x > d.points.back() && d.truncated) {
    throw OutOfRangeError("survival query at x = " + std::to_string(x) +
                          " lies beyond the truncated table");
  }
  return d.survival[idx];
}

double eval_survival(const ContinuousSolution& s, double x) {
  if (x < s.origin) return 1.0;
  const double pos = (x - s.origin) / s.grid_step;
  const std::size_t last = s.size() - 1;
  if (pos > static_cast<double>(last) * (1.0 + 1e-12)) {
    throw OutOfRangeError("survival query at x = " + std::to_string(x) +
                          " lies beyond the grid horizon " + std::to_string(s.horizon()));
  }
  const std::size_t i = std::min(static_cast<std::size_t>(std::floor(pos)), last);
  if (i == last) return s.values[last];
  const double w = pos - static_cast<double>(i);
  return s.values[i] + w * (s.values[i + 1] - s.values[i]);
}

double eval_survival(const ClosedFormSurvival& f, double x) {
  if (x < f.origin) return 1.0;
  const double s = x - f.origin;
  double g = 0.0;
  for (const Component& c : f.components) g += c.weight * c.value(s);
  return g;
}

double eval_survival(const Survival& dist, double x) {
  return std::visit([x](const auto& d) { return eval_survival(d, x); }, dist);
}

double tail_integral(const DiscreteSurvival& d, double x) {
  // Suffix integrals from the last atom backwards.
  const std::ptrdiff_t i = atom_index(d, x);
  const std::size_t n = d.points.size();
  if (i >= 0 && static_cast<std::size_t>(i) + 1 == n && x > d.points.back()) {
    if (d.truncated) {
      throw OutOfRangeError("tail integral from x = " + std::to_string(x) +
                            " starts beyond the truncated table");
    }
    return 0.0;
  }
  double acc = d.tail_beyond;
  const std::size_t first = i < 0 ? 0 : static_cast<std::size_t>(i) + 1;
  for (std::size_t k = n - 1; k-- > first;) {
    acc += (d.points[k + 1] - d.points[k]) * d.survival[k];
  }
  if (i < 0) return acc + (d.points.front() - x);
  const auto idx = static_cast<std::size_t>(i);
  if (idx + 1 == n) return acc - (x - d.points[idx]) * d.survival[idx];
  return acc + (d.points[idx + 1] - x) * d.survival[idx];
}

double tail_integral(const ContinuousSolution& s, double x) {
  const double total = s.prefix.back() + s.tail_beyond;
  if (x < s.origin) return (s.origin - x) + total;
  if (x > s.horizon() * (1.0 + 1e-12) + 1e-300) {
    throw OutOfRangeError("tail integral from x = " + std::to_string(x) +
                          " starts beyond the grid horizon");
  }
  return total - prefix_at(s, x);
}

double tail_integral(const ClosedFormSurvival& f, double x) {
  double from0 = 0.0;
  const double s = std::max(0.0, x - f.origin);
  for (const Component& c : f.components) from0 += c.weight * c.tail(s);
  return x < f.origin ? from0 + (f.origin - x) : from0;
}

double tail_integral(const Survival& dist, double x) {
  return std::visit([x](const auto& d) { return tail_integral(d, x); }, dist);
}

double residual_H(const Survival& dist, const ProblemParams& params, double x) {
  return eval_survival(dist, x + params.delta) - params.c * tail_integral(dist, x);
}

double support_start(const Survival& dist) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DiscreteSurvival>) {
          return d.points.front();
        } else {
          return d.origin;
        }
      },
      dist);
}

double mean_of(const Survival& dist) {
  const double a = support_start(dist);
  return a + tail_integral(dist, a);
}

bool is_lattice(const Survival& dist) {
  if (const auto* f = std::get_if<ClosedFormSurvival>(&dist)) return f->lattice();
  if (const auto* d = std::get_if<DiscreteSurvival>(&dist)) {
    for (std::size_t i = 0; i < d->points.size(); ++i) {
      if (d->points[i] != std::nearbyint(d->points[i])) return false;
      if (i > 0 && d->points[i] - d->points[i - 1] != 1.0) return false;
    }
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Residual certificates

double default_residual_tolerance(const Survival& dist) {
  const double exact = exact_tolerance();
  if (const auto* s = std::get_if<ContinuousSolution>(&dist)) {
    return std::max(10.0 * s->quadrature_error, exact);
  }
  return exact;
}

std::vector<double> default_probes(const Survival& dist, const ProblemParams& params) {
  std::vector<double> probes;
  const double delta = params.delta;
  if (const auto* d = std::get_if<DiscreteSurvival>(&dist)) {
    for (double x : d->points) {
      if (d->truncated && x + delta > d->points.back()) continue;
      probes.push_back(x);
    }
  } else if (const auto* s = std::get_if<ContinuousSolution>(&dist)) {
    const double limit = s->horizon() - std::max(0.0, delta);
    for (std::size_t i = 0; i < s->size() && s->knot(i) <= limit * (1.0 + 1e-12); ++i) {
      probes.push_back(s->knot(i));
    }
  } else {
    const auto& f = std::get<ClosedFormSurvival>(dist);
    if (f.lattice()) {
      for (int i = 0; i <= 200; ++i) probes.push_back(f.origin + i);
    } else {
      constexpr int kCount = 320;
      const double span = 20.0 * std::fabs(delta);
      for (int i = 0; i <= kCount; ++i) probes.push_back(f.origin + span * i / kCount);
    }
  }
  return probes;
}

ResidualReport residual_sup(const Survival& dist, const ProblemParams& params,
                            std::span<const double> probes, std::optional<double> tolerance) {
  ResidualReport rep;
  rep.tolerance = tolerance.value_or(default_residual_tolerance(dist));
  rep.probes = probes.size();
  for (double x : probes) {
    const double h = std::fabs(residual_H(dist, params, x));
    if (!(h <= rep.sup)) {
      rep.sup = h;
      rep.worst_x = x;
    }
  }
  rep.member = rep.probes > 0 && rep.sup <= rep.tolerance;
  return rep;
}

ResidualReport residual_sup(const Survival& dist, const ProblemParams& params) {
  const std::vector<double> probes = default_probes(dist, params);
  return residual_sup(dist, params, probes);
}

std::vector<double> residual_on_grid(const ContinuousSolution& sol, const ProblemParams& params) {
  const double shift = params.delta / sol.grid_step;
  const double rounded = std::nearbyint(shift);
  if (!(params.delta > 0.0) || std::fabs(shift - rounded) > 1e-9 * std::max(1.0, shift)) {
    throw ValidationError("grid residual needs delta to be a positive whole number of grid steps");
  }
  const auto lag = static_cast<std::size_t>(rounded);
  if (lag >= sol.size()) throw OutOfRangeError("horizon too short to probe the residual");
  const std::size_t n = sol.size() - lag;
  std::vector<double> out(n);
  const double total = sol.prefix.back() + sol.tail_beyond;
  simd::kernels().residual_sweep(sol.values.data() + lag, sol.prefix.data(), n, total, params.c,
                                 out.data());
  return out;
}

// ---------------------------------------------------------------------------
// Transforms

Survival mix(const Survival& d1, const Survival& d2, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("mixing weight must lie in [0,1]");
  if (d1.index() != d2.index()) {
    throw ValidationError("support mismatch: cannot mix different representations");
  }
  const double mu = 1.0 - lambda;
  if (const auto* a = std::get_if<DiscreteSurvival>(&d1)) {
    const auto& b = std::get<DiscreteSurvival>(d2);
    if (a->points.size() != b.points.size()) throw ValidationError("support mismatch in mix");
    for (std::size_t i = 0; i < a->points.size(); ++i) {
      if (std::fabs(a->points[i] - b.points[i]) > 1e-12 * std::max(1.0, std::fabs(a->points[i]))) {
        throw ValidationError("support mismatch in mix", a->points[i]);
      }
    }
    DiscreteSurvival out = *a;
    out.truncated = a->truncated || b.truncated;
    for (std::size_t i = 0; i < out.survival.size(); ++i) {
      out.survival[i] = lambda * a->survival[i] + mu * b.survival[i];
    }
    out.tail_beyond = lambda * a->tail_beyond + mu * b.tail_beyond;
    return out;
  }
  if (const auto* a = std::get_if<ContinuousSolution>(&d1)) {
    const auto& b = std::get<ContinuousSolution>(d2);
    require_same_params(a->params, b.params);
    if (a->size() != b.size() || a->grid_step != b.grid_step || a->origin != b.origin) {
      throw ValidationError("support mismatch: grids differ");
    }
    ContinuousSolution out = *a;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.values[i] = lambda * a->values[i] + mu * b.values[i];
      out.prefix[i] = lambda * a->prefix[i] + mu * b.prefix[i];
    }
    out.tail_beyond = lambda * a->tail_beyond + mu * b.tail_beyond;
    out.tail_bound = lambda * a->tail_bound + mu * b.tail_bound;
    out.quadrature_error = std::max(a->quadrature_error, b.quadrature_error);
    return out;
  }
  const auto& a = std::get<ClosedFormSurvival>(d1);
  const auto& b = std::get<ClosedFormSurvival>(d2);
  if (a.lattice() != b.lattice() || a.origin != b.origin) {
    throw ValidationError("support mismatch: lattice/continuous or origin differ");
  }
  return combine(a, lambda, b, mu);
}

Survival tail_condition(const Survival& dist, double x0) {
  const double alpha = support_start(dist);
  if (std::fabs(x0 - alpha) <= 1e-12 * std::max(1.0, std::fabs(alpha))) return dist;
  if (!(x0 > alpha)) throw ValidationError("x0 must lie inside (alpha_F, omega_F)", x0);
  const double g0 = eval_survival(dist, x0);
  if (!(g0 > 0.0)) throw ValidationError("x0 must lie inside (alpha_F, omega_F): G(x0) = 0", x0);

  if (const auto* d = std::get_if<DiscreteSurvival>(&dist)) {
    DiscreteSurvival out;
    out.truncated = d->truncated;
    for (std::size_t i = 0; i < d->points.size(); ++i) {
      if (d->points[i] > x0) {
        out.points.push_back(d->points[i]);
        out.survival.push_back(d->survival[i] / g0);
      }
    }
    if (out.points.empty()) throw ValidationError("no support beyond x0", x0);
    out.tail_beyond = d->tail_beyond / g0;
    return out;
  }
  if (const auto* s = std::get_if<ContinuousSolution>(&dist)) {
    const double pos = (x0 - s->origin) / s->grid_step;
    const double idx = std::nearbyint(pos);
    if (std::fabs(pos - idx) > 1e-9) {
      throw ValidationError("x0 must lie on a grid knot for grid solutions", x0);
    }
    const auto i0 = static_cast<std::size_t>(idx);
    if (i0 + 1 >= s->size()) throw ValidationError("x0 too close to the grid horizon", x0);
    ContinuousSolution out = *s;
    out.origin = s->knot(i0);
    out.values.assign(s->values.begin() + static_cast<std::ptrdiff_t>(i0), s->values.end());
    out.prefix.resize(out.values.size());
    const double p0 = s->prefix[i0];
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] /= g0;
      out.prefix[i] = (s->prefix[i0 + i] - p0) / g0;
    }
    out.values.front() = 1.0;
    out.tail_beyond = s->tail_beyond / g0;
    out.tail_bound = s->tail_bound / g0;
    out.quadrature_error = s->quadrature_error / g0;
    return out;
  }
  const auto& f = std::get<ClosedFormSurvival>(dist);
  ClosedFormSurvival out;
  out.label = f.label.empty() ? "tail" : f.label + " | X > x0";
  if (f.lattice()) {
    // G is flat on [k, k+1): conditioning at x0 equals conditioning at ⌊x0⌋.
    const double k = std::floor(x0 - f.origin);
    out.origin = f.origin + k;
    for (const Component& c : f.components) {
      Component n = c;
      const double scale = std::pow(c.ratio, k);
      if (c.kind == ComponentKind::geom_linear) {
        const double lead = c.slope * k + 1.0;
        n.slope = c.slope / lead;
        n.weight = c.weight * lead * scale / g0;
      } else {
        n.weight = c.weight * scale / g0;
      }
      out.components.push_back(n);
    }
  } else {
    const double s0 = x0 - f.origin;
    out.origin = x0;
    for (const Component& c : f.components) {
      Component n = c;
      const double decay = std::exp(-c.rate * s0);
      if (c.kind == ComponentKind::exp_linear) {
        const double lead = c.slope * s0 + 1.0;
        n.slope = c.slope / lead;
        n.weight = c.weight * lead * decay / g0;
      } else {
        n.weight = c.weight * decay / g0;
      }
      out.components.push_back(n);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid construction

ContinuousSolution grid_from_values(const ProblemParams& params, double origin, double grid_step,
                                    std::vector<double> values) {
  params.validate();
  if (values.size() < 2 || !(grid_step > 0.0)) {
    throw ValidationError("grid needs at least two knots and a positive step");
  }
  ContinuousSolution s;
  s.params = params;
  s.origin = origin;
  s.grid_step = grid_step;
  const double per = std::fabs(params.delta) / grid_step;
  s.points_per_delay = static_cast<std::size_t>(std::max(1.0, std::nearbyint(per)));
  s.values = std::move(values);
  s.prefix.resize(s.values.size());
  simd::kernels().trapezoid_prefix(s.values.data(), s.values.size(), grid_step, 0.0,
                                   s.prefix.data());
  s.validate();

  const double yT = s.values.back();
  s.tail_bound = std::max(0.0, yT) / params.c;
  const std::size_t lag = s.points_per_delay;
  if (params.delta > 0.0 && std::fabs(per - static_cast<double>(lag)) < 1e-9 * per &&
      lag < s.size()) {
    const std::size_t last = s.size() - 1;
    const double last_window = s.prefix[last] - s.prefix[last - lag];
    s.tail_beyond = std::clamp(yT / params.c - last_window, 0.0, s.tail_bound);
  } else {
    s.tail_beyond = s.tail_bound;
  }

  // Richardson: trapezoid at h versus 2h over an even number of cells.
  const std::size_t cells = (s.size() - 1) & ~std::size_t{1};
  if (cells >= 2) {
    double coarse = 0.0;
    for (std::size_t i = 0; i + 2 <= cells; i += 2) {
      coarse += grid_step * (s.values[i] + s.values[i + 2]);
    }
    s.quadrature_error = std::fabs(s.prefix[cells] - coarse) / 3.0;
  }
  return s;
}

ContinuousSolution tabulate(const ClosedFormSurvival& f, const ProblemParams& params,
                            std::size_t points_per_delay, double horizon) {
  params.validate();
  if (f.lattice()) throw ValidationError("cannot tabulate a lattice law on a continuous grid");
  if (points_per_delay < 1 || !(horizon > f.origin)) {
    throw ValidationError("tabulation needs points_per_delay >= 1 and horizon > origin");
  }
  ContinuousSolution s;
  s.params = params;
  s.origin = f.origin;
  s.points_per_delay = points_per_delay;
  s.grid_step = std::fabs(params.delta) / static_cast<double>(points_per_delay);
  const auto cells = static_cast<std::size_t>(std::ceil((horizon - f.origin) / s.grid_step - 1e-9));
  s.values.resize(cells + 1);
  s.prefix.resize(cells + 1);
  const double total = tail_integral(f, f.origin);
  for (std::size_t i = 0; i <= cells; ++i) {
    const double t = s.knot(i);
    s.values[i] = eval_survival(f, t);
    s.prefix[i] = total - tail_integral(f, t);
  }
  s.tail_beyond = tail_integral(f, s.horizon());
  s.tail_bound = s.tail_beyond;
  s.quadrature_error = 0.0;
  return s;
}

}  // namespace deltarec
