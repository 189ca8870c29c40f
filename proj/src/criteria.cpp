#include "deltarec/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltarec/errors.hpp"

namespace deltarec {
namespace {

constexpr double kDominationTol = 1e-12;

// Smaller root via λ₁λ₂ = a to avoid cancellation for small a.
double lambda2_of(double a) {
  const double D = (1.0 - a) * (1.0 - a) - 4.0 * a;
  const double l1 = 0.5 * (1.0 - a + std::sqrt(D));
  return a / l1;
}

struct Bounds {
  double necessary;
  std::optional<double> sufficient;
  std::optional<RecurrenceParams> rp;
};

Bounds compute_bounds(double a, double nec_scale, double nec_inner, double first, double second) {
  Bounds b{nec_scale * nec_inner, std::nullopt, std::nullopt};
  if (a > 0.0 && a < sufficient_a_limit()) {
    const RecurrenceParams rp = recurrence_params(a);
    const double denom = 1.0 - rp.lambda2 - 2.0 * a;
    if (denom > 0.0) {
      b.sufficient = 2.0 * a * ((1.0 - rp.lambda2) * first - 2.0 * a * second) / denom;
      b.rp = rp;
    }
  }
  return b;
}

Verdict decide(double phi_delta, const CriterionReport& r) {
  if (r.uniform_bound && phi_delta > *r.uniform_bound) return Verdict::sufficient_uniform;
  if (r.sufficient_bound && phi_delta > *r.sufficient_bound) return Verdict::sufficient;
  if (phi_delta <= r.necessary_bound) return Verdict::violates_necessary;
  return Verdict::inconclusive;
}

}  // namespace

RecurrenceParams recurrence_params(double a) {
  if (!(a > 0.0 && a < sufficient_a_limit())) {
    throw ValidationError("recurrence needs a in (0, 3 - 2*sqrt(2)); got " + std::to_string(a), a);
  }
  RecurrenceParams rp;
  rp.a = a;
  rp.D = (1.0 - a) * (1.0 - a) - 4.0 * a;
  if (!(rp.D > 0.0)) throw ValidationError("recurrence discriminant is not positive", a);
  rp.lambda1 = 0.5 * (1.0 - a + std::sqrt(rp.D));
  rp.lambda2 = a / rp.lambda1;
  return rp;
}

std::vector<double> recurrence_solution(const RecurrenceParams& rp, double a0, double a1,
                                        std::size_t n_max) {
  const double sd = std::sqrt(rp.D);
  const double A = (a1 - a0 * rp.lambda2) / sd;
  const double B = (a0 * rp.lambda1 - a1) / sd;
  std::vector<double> out(n_max + 1);
  double p1 = 1.0;
  double p2 = 1.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    out[n] = A * p1 + B * p2;
    p1 *= rp.lambda1;
    p2 *= rp.lambda2;
  }
  return out;
}

std::vector<double> recurrence_iterate(const RecurrenceParams& rp, double a0, double a1,
                                       std::size_t n_max) {
  std::vector<double> out(n_max + 1);
  out[0] = a0;
  if (n_max >= 1) out[1] = a1;
  for (std::size_t n = 2; n <= n_max; ++n) {
    out[n] = (1.0 - rp.a) * out[n - 1] - rp.a * out[n - 2];
  }
  return out;
}

DominationReport dominated_sequence_bound(const RecurrenceParams& rp, std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("domination check needs x_0 and x_1");
  const double scale = std::max({1.0, std::fabs(x[0]), std::fabs(x[1])});
  for (std::size_t k = 2; k < x.size(); ++k) {
    const double rhs = (1.0 - rp.a) * x[k - 1] - rp.a * x[k - 2];
    if (x[k] < rhs - kDominationTol * scale) {
      throw ValidationError("recurrence inequality fails at k = " + std::to_string(k),
                            static_cast<double>(k));
    }
  }
  const std::vector<double> a = recurrence_iterate(rp, x[0], x[1], x.size() - 1);
  DominationReport rep;
  rep.min_margin = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double m = x[k] - a[k];
    if (k == 0 || m < rep.min_margin) {
      rep.min_margin = m;
      rep.worst_index = k;
    }
  }
  rep.dominated = rep.min_margin >= -kDominationTol * scale;
  return rep;
}

ConvexSumBound discrete_convex_sum_bound(std::span<const double> g) {
  if (g.empty()) throw ValidationError("empty sequence");
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::fabs(v));
  const double tol = 1e-14 * gmax;
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i] < g[i - 1])) {
      throw ValidationError("sequence must be strictly decreasing", static_cast<double>(i));
    }
    if (i >= 2 && g[i] - g[i - 1] < g[i - 1] - g[i - 2] - tol) {
      throw ValidationError("forward differences must be nondecreasing (discrete convexity)",
                            static_cast<double>(i));
    }
  }
  ConvexSumBound b;
  for (double v : g) b.lhs += v;
  b.rhs = 0.5 * static_cast<double>(g.size()) * (g.front() + g.back());
  return b;
}

InitialFunctionals continuous_functionals(const InitialFunction& phi) {
  const double d = phi.delta();
  return {phi.integral(d) / d, phi.double_integral(d) / (d * d)};
}

InitialFunctionals lattice_functionals(const InitialFunction& phi) {
  phi.validate_lattice();
  const auto& v = phi.values();
  const std::size_t d = v.size() - 1;
  const double dd = static_cast<double>(d);
  double s1 = 0.0;
  for (std::size_t j = 0; j < d; ++j) s1 += v[j];
  // Σ_{j=δ}^{2δ−1} Σ_{i=0}^{j−δ−1} φ(i) = Σ_{m=0}^{δ−1} Σ_{i<m} φ(i).
  double s2 = 0.0;
  double running = 0.0;
  for (std::size_t m = 0; m < d; ++m) {
    s2 += running;
    running += v[m];
  }
  return {s1 / dd, s2 / (dd * dd)};
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::violates_necessary: return "violates-necessary";
    case Verdict::sufficient: return "sufficient";
    case Verdict::sufficient_uniform: return "sufficient-uniform";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

CriterionReport check_continuous(const InitialFunction& phi, const ProblemParams& params) {
  params.validate();
  if (!(params.delta > 0.0)) throw ValidationError("positivity criteria need delta > 0");
  if (!continuous_members_possible(params)) {
    throw EmptyProblemError("c*delta > 1/e: P_{c,delta} is empty (thm:3.3)", params.c_delta());
  }
  phi.validate_continuous();
  if (std::fabs(phi.delta() - params.delta) > 1e-12 * params.delta) {
    throw ValidationError("initial function domain does not match delta");
  }
  CriterionReport r;
  r.a = params.c_delta() / 2.0;
  r.functionals = continuous_functionals(phi);
  r.phi_delta = phi(params.delta);
  const double a = r.a;
  const double I1 = r.functionals.first;
  const double I2 = r.functionals.second;
  const Bounds b = compute_bounds(a, 2.0 * a / (1.0 - 2.0 * a), I1 - 2.0 * a * I2, I1, I2);
  r.necessary_bound = b.necessary;
  r.sufficient_bound = b.sufficient;
  r.recurrence = b.rp;
  if (b.rp) r.uniform_bound = 2.0 * a / (1.0 - b.rp->lambda2);
  r.verdict = decide(r.phi_delta, r);
  return r;
}

CriterionReport check_lattice(const InitialFunction& phi, const ProblemParams& params) {
  params.validate();
  const int d = lattice_delta(params);
  if (!lattice_members_possible(params)) {
    throw EmptyProblemError("c*delta > (delta/(delta+1))^(delta+1): P_{c,delta} is empty (thm:3.4)",
                            params.c_delta());
  }
  phi.validate_lattice();
  if (static_cast<int>(phi.values().size()) != d + 1) {
    throw ValidationError("lattice phi must have delta + 1 values");
  }
  CriterionReport r;
  r.lattice = true;
  r.a = params.c * (d + 1.0) / 2.0;
  r.functionals = lattice_functionals(phi);
  r.phi_delta = phi.at(d);
  const double cd = params.c_delta();
  const double S1 = r.functionals.first;
  const double S2 = r.functionals.second;
  const Bounds b = compute_bounds(r.a, cd / (1.0 - cd), S1 - cd * S2, S1, S2);
  r.necessary_bound = b.necessary;
  r.sufficient_bound = b.sufficient;
  r.recurrence = b.rp;
  r.verdict = decide(r.phi_delta, r);
  return r;
}

std::vector<SandwichRow> sandwich_bounds(const InitialFunction& phi, const ProblemParams& params,
                                         std::size_t n_max) {
  const CriterionReport rep = check_continuous(phi, params);
  if (!rep.sufficient_bound || !rep.recurrence) {
    throw ValidationError("sandwich bounds need a < 3 - 2*sqrt(2)", rep.a);
  }
  if (!(rep.phi_delta > *rep.sufficient_bound)) {
    throw ValidationError("sandwich bounds need the sufficient condition phi(delta) > beta",
                          rep.phi_delta);
  }
  const double a = rep.a;
  const double I1 = rep.functionals.first;
  const double I2 = rep.functionals.second;
  const double a0 = rep.phi_delta - 2.0 * a * I1;
  const double a1 = (1.0 - 2.0 * a) * rep.phi_delta - 2.0 * a * (I1 - 2.0 * a * I2);
  const RecurrenceParams& rp = *rep.recurrence;
  if (!(a0 > 0.0 && a1 > rp.lambda2 * a0)) {
    throw ValidationError("lower-bound sequence is not positive (a0 > 0, a1 > lambda2*a0 fail)");
  }
  const std::vector<double> lower = recurrence_iterate(rp, a0, a1, n_max);
  std::vector<SandwichRow> rows;
  const double delta = params.delta;
  rows.push_back({0, 0.0, phi(0.0), phi(0.0)});
  rows.push_back({1, delta, rep.phi_delta, rep.phi_delta});
  double upper = a1;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double t = static_cast<double>(n + 2) * delta;
    if (n == 0) {
      rows.push_back({2, t, a0, a0});
      continue;
    }
    rows.push_back({n + 2, t, lower[n], upper});
    upper *= 1.0 - 2.0 * a;
  }
  return rows;
}

std::vector<GapRow> gap_region_table(std::span<const double> ratios,
                                     std::span<const double> a_grid) {
  for (double r : ratios) {
    if (!(r >= 0.5 && r <= 1.0)) throw ValidationError("ratio I2/I1 must lie in [1/2, 1]", r);
  }
  std::vector<GapRow> rows;
  for (double r : ratios) {
    for (double a : a_grid) {
      if (!(a >= 0.0 && a < sufficient_a_limit())) continue;
      const double l2 = lambda2_of(a);
      const double denom = 1.0 - 2.0 * a - l2;
      if (!(denom > 0.0)) continue;
      GapRow row;
      row.a = a;
      row.r = r;
      row.necessary = 2.0 * a * (1.0 - 2.0 * a * r) / (1.0 - 2.0 * a);
      row.sufficient = 2.0 * a * ((1.0 - l2) - 2.0 * a * r) / denom;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace deltarec
