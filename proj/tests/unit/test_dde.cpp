#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "deltarec/constructors.hpp"
#include "deltarec/core.hpp"
#include "deltarec/dde.hpp"
#include "deltarec/errors.hpp"
#include "support/oracles.hpp"

using namespace deltarec;

namespace {

const ProblemParams kTable{0.2, 1.0};

InitialFunction linear_phi() { return InitialFunction::polynomial({1.0, -0.5}, 1.0); }

InitialFunction sampled(const std::function<double(double)>& f, double delta, int cells) {
  std::vector<double> xs, vs;
  for (int i = 0; i <= cells; ++i) {
    xs.push_back(delta * i / cells);
    vs.push_back(f(xs.back()));
  }
  xs.back() = delta;
  return InitialFunction::table(std::move(xs), std::move(vs));
}

double max_dev(const ContinuousSolution& s, const std::function<double(double)>& ref) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, std::fabs(s.values[i] - ref(s.knot(i))));
  return m;
}

}  // namespace

TEST(SolveSteps, ExponentialInitialReproducesItself) {
  for (double theta : solve_exponential_rates(kTable).roots) {
    const auto phi = sampled([&](double t) { return std::exp(-theta * t); }, 1.0, 16384);
    const auto s = solve_steps(kTable, phi);
    EXPECT_LE(max_dev(s, [&](double t) { return std::exp(-theta * t); }), 1e-8) << theta;
  }
}

TEST(SolveSteps, TableOneValues) {
  const auto s = solve_steps(kTable, linear_phi());
  const oracle::PolynomialSteps exact({1.0, -0.5}, 0.2, 1.0, 31);
  EXPECT_LE(max_dev(s, exact), 1e-8);
  EXPECT_NEAR(eval_survival(s, 2.0), 0.3498, 5e-4);
  EXPECT_NEAR(eval_survival(s, 4.0), 0.2053, 5e-4);
  EXPECT_NEAR(eval_survival(s, 10.0), 0.0433, 5e-4);
  EXPECT_NEAR(eval_survival(s, 20.0), 0.0032, 5e-4);
  // y(2) = φ(1) − 2a·I₁ with a = cδ/2 = 0.1 and I₁ = ∫₀¹φ = 0.75.
  EXPECT_NEAR(eval_survival(s, 2.0), 0.5 - 0.2 * 0.75, 1e-14);
}

TEST(SolveSteps, FirstStepIsExact) {
  const auto s = solve_steps(kTable, linear_phi());
  const std::size_t P = s.points_per_delay;
  for (std::size_t i = P; i <= 2 * P; ++i) {
    const double u = s.knot(i) - 1.0;
    EXPECT_NEAR(s.values[i], 0.5 - 0.2 * (u - u * u / 4.0), 1e-15);
  }
}

TEST(SolveSteps, SecondOrderConvergence) {
  const oracle::PolynomialSteps exact({1.0, -0.5}, 0.2, 1.0, 31);
  std::vector<double> dev;
  for (std::size_t ppd : {32u, 64u, 128u, 256u}) {
    StepSolverConfig cfg;
    cfg.points_per_delay = ppd;
    dev.push_back(max_dev(solve_steps(kTable, linear_phi(), cfg), exact));
  }
  for (std::size_t i = 1; i < dev.size(); ++i) EXPECT_GE(dev[i - 1] / dev[i], 3.0) << i;
}

TEST(SolveSteps, RandomPolynomialsAgainstExactSteps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.9);
  for (int trial = 0; trial < 10; ++trial) {
    const double delta = 0.3 + 2.0 * u(rng);
    const double c = u(rng) / delta;
    // φ(t) = 1 − b₁t − b₂t² with b₁, b₂ > 0 is decreasing; keep φ(δ) > 0.
    const double b1 = 0.4 * u(rng) / delta;
    const double b2 = 0.4 * u(rng) / (delta * delta);
    const ProblemParams p{c, delta};
    StepSolverConfig cfg;
    cfg.horizon_delays = 12;
    const auto s = solve_steps(p, InitialFunction::polynomial({1.0, -b1, -b2}, delta), cfg);
    const oracle::PolynomialSteps exact({1.0, -b1, -b2}, c, delta, 13);
    EXPECT_LE(max_dev(s, exact), 1e-7) << trial;
    const auto rep = step_identity_residual(s);
    EXPECT_TRUE(rep.within()) << rep.max_abs << " vs " << rep.estimate;
  }
}

TEST(SolveSteps, StepIdentityWithinEstimate) {
  const auto s = solve_steps(kTable, linear_phi());
  const auto rep = step_identity_residual(s);
  EXPECT_TRUE(rep.within());
  EXPECT_LE(rep.max_abs, 10 * s.quadrature_error + 1e-14);
  EXPECT_GT(s.quadrature_error, 0.0);
}

TEST(SolveSteps, MemberReproducesFromItsOwnSegment) {
  const auto g = gamma_exp_mixture(1.0, 0.6);
  const auto phi = sampled([&](double t) { return eval_survival(g.law, t); }, 1.0, 16384);
  const auto s = solve_steps(g.params, phi);
  EXPECT_LE(max_dev(s, [&](double t) { return eval_survival(g.law, t); }), 1e-8);
}

TEST(SolveSteps, Validation) {
  StepSolverConfig bad;
  bad.points_per_delay = 4;
  EXPECT_THROW(solve_steps(kTable, linear_phi(), bad), ValidationError);
  bad = {};
  bad.horizon_delays = 2;
  EXPECT_THROW(solve_steps(kTable, linear_phi(), bad), ValidationError);
  EXPECT_THROW(solve_steps(kTable, InitialFunction::polynomial({1.0, 0.1}, 1.0)), ValidationError);
  EXPECT_THROW(solve_steps(kTable, InitialFunction::polynomial({0.9, -0.1}, 1.0)), ValidationError);
  EXPECT_THROW(solve_steps(kTable, InitialFunction::polynomial({1.0, -1.0}, 1.0)), ValidationError);
  EXPECT_THROW(solve_steps(kTable, InitialFunction::polynomial({1.0, -0.5}, 2.0)), ValidationError);
  EXPECT_THROW(solve_steps({0.2, -1.0}, linear_phi()), ValidationError);
}

TEST(Fundamental, FirstStepsAndOracle) {
  for (double c : {0.1, 0.3, 1.0 / std::numbers::e}) {
    const ProblemParams p{c, 1.0};
    const auto y = fundamental_function(p);
    EXPECT_NEAR(eval_survival(y, 2.0), 1.0, 1e-15);
    EXPECT_NEAR(eval_survival(y, 3.0), 1.0 - c, 1e-14);
    EXPECT_NEAR(eval_survival(y, 2.5), 1.0 - 0.5 * c, 1e-14);
    // For t ≥ δ the fundamental function is the method of steps started from 1.
    const oracle::PolynomialSteps exact({1.0}, c, 1.0, 31);
    double m = 0.0;
    for (std::size_t i = y.points_per_delay; i < y.size(); ++i) {
      m = std::max(m, std::fabs(y.values[i] - exact(y.knot(i) - 1.0)));
    }
    EXPECT_LE(m, 1e-8);
  }
}

TEST(Fundamental, PositiveUpToThreshold) {
  for (double c : {0.3, 1.0 / std::numbers::e}) {
    const auto v = positivity_scan(fundamental_function({c, 1.0}));
    EXPECT_TRUE(v.positive_on_horizon) << c;
    EXPECT_FALSE(v.first_nonpositive_t.has_value());
  }
  const auto osc = positivity_scan(fundamental_function({0.6, 1.0}));
  EXPECT_FALSE(osc.positive_on_horizon);
  EXPECT_TRUE(osc.first_nonpositive_t.has_value());
}

TEST(Density, Uniform) {
  const std::vector<double> psi(1025, 1.0);
  const auto d = initial_from_density(psi, kTable);
  EXPECT_TRUE(d.certified);
  EXPECT_NEAR(d.mass, 1.0, 1e-14);
  EXPECT_NEAR(d.phi(1.0), 0.9, 1e-14);
  for (double t = 0.0; t <= 1.0; t += 0.125) EXPECT_NEAR(d.phi(t), 1.0 - 0.1 * t * t, 1e-14);
}

TEST(Density, LinearGivesCubic) {
  const ProblemParams p{0.25, 1.0};
  std::vector<double> psi;
  for (int i = 0; i <= 1024; ++i) psi.push_back(2.0 * i / 1024.0);
  const auto d = initial_from_density(psi, p);
  for (int i = 0; i <= 1024; i += 64) {
    const double t = i / 1024.0;
    EXPECT_NEAR(d.phi(t), 1.0 - 0.25 * t * t * t / 3.0, 1e-14);
  }
  const auto s = solve_steps(p, d.phi);
  EXPECT_TRUE(positivity_scan(s).positive_on_horizon);
}

TEST(Density, SpikeNearDelayIsNearlyFlat) {
  const int n = 1000;
  const double h = 1.0 / n;
  const double floor = 1e-6;
  std::vector<double> psi(n + 1, floor);
  psi[n] += 2.0 / h;  // triangle of unit trapezoid mass on the last cell
  const double mass = floor + 1.0;
  for (double& v : psi) v /= mass;
  const auto d = initial_from_density(psi, kTable);
  EXPECT_GT(d.phi(1.0 - h), 1.0 - 1e-6);
  EXPECT_GT(d.phi(1.0), 1.0 - 0.2 * h);
  EXPECT_TRUE(positivity_scan(solve_steps(kTable, d.phi)).positive_on_horizon);
}

TEST(Density, Rejections) {
  EXPECT_THROW(initial_from_density(std::vector<double>(101, 0.5), kTable), ValidationError);
  std::vector<double> neg(101, 1.0);
  neg[3] = -0.1;
  EXPECT_THROW(initial_from_density(neg, kTable), ValidationError);
  EXPECT_THROW(initial_from_density(std::vector<double>{1.0}, kTable), ValidationError);
  // Above 1/e the generator still builds φ but cannot certify positivity.
  EXPECT_FALSE(initial_from_density(std::vector<double>(101, 1.0), {0.5, 1.0}).certified);
}

TEST(Comparison, EqualityCase) {
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  const int cells = 4096;
  const auto phi = sampled([](double t) { return std::exp(-t); }, 1.0, cells);
  const auto cert = compare_with_member(phi, exponential_law(1.0), p, cells + 1);
  EXPECT_TRUE(cert.certified);
  EXPECT_LE(cert.max_excess, 1e-15);
  EXPECT_EQ(cert.anchor, "cor:3.2");
}

TEST(Comparison, PerturbedBelowMemberDominates) {
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  const int cells = 4096;
  const double eps = 0.05;
  const auto phi =
      sampled([&](double t) { return std::exp(-t) * (1.0 - t * (1.0 - t) * eps); }, 1.0, cells);
  const auto cert = compare_with_member(phi, exponential_law(1.0), p, cells + 1);
  ASSERT_TRUE(cert.certified);
  EXPECT_LT(cert.max_excess, 1e-15);
  const auto s = solve_steps(p, phi);
  for (std::size_t i = s.points_per_delay; i < s.size(); ++i) {
    EXPECT_GE(s.values[i], std::exp(-s.knot(i)) - 1e-8) << s.knot(i);
  }
  EXPECT_TRUE(positivity_scan(s).positive_on_horizon);
}

TEST(Comparison, PremiseFailureCarriesWitness) {
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  try {
    compare_with_member(linear_phi(), exponential_law(1.0), p);
    FAIL() << "expected a premise violation";
  } catch (const ValidationError& e) {
    ASSERT_TRUE(e.witness().has_value());
    const double t = *e.witness();
    // 1 − t/2 exceeds e^{−t} on (0, 1]; the worst point is t = ln 2.
    EXPECT_GT(1.0 - t / 2.0, std::exp(-t));
    EXPECT_NEAR(t, std::log(2.0), 1e-3);
  }
}

TEST(Positivity, OscillatesAboveThreshold) {
  const auto s = solve_steps({0.5, 1.0}, linear_phi());
  const auto v = positivity_scan(s);
  EXPECT_FALSE(v.positive_on_horizon);
  ASSERT_TRUE(v.first_nonpositive_t.has_value());
  EXPECT_LT(*v.first_nonpositive_t, 30.0);
  // The crossing agrees with the exact piecewise polynomial.
  const oracle::PolynomialSteps exact({1.0, -0.5}, 0.5, 1.0, 31);
  const double root = oracle::bisect(exact, *v.first_nonpositive_t - 0.01, *v.first_nonpositive_t);
  EXPECT_NEAR(*v.first_nonpositive_t, root, 2.0 / 1024);
}

TEST(Positivity, TableOnePositive) {
  const auto v = positivity_scan(solve_steps(kTable, linear_phi()));
  EXPECT_TRUE(v.positive_on_horizon);
  EXPECT_GE(v.scanned_to, 20.0);
}

TEST(Positivity, DecayBelowToleranceIsNotASignChange) {
  // At cδ = 1/e a density-generated φ gives a positive solution decaying like
  // t·e^{−t}, far below 1e−9·y(δ) by the end of the horizon.
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  const auto d = initial_from_density(std::vector<double>(1025, 1.0), p);
  ASSERT_TRUE(d.certified);
  const auto v = positivity_scan(solve_steps(p, d.phi));
  EXPECT_TRUE(v.positive_on_horizon);
  EXPECT_TRUE(v.machine_zero_reached);
  EXPECT_FALSE(v.first_nonpositive_t.has_value());
}

TEST(Envelope, ExponentialMember) {
  const double theta = solve_exponential_rates(kTable).roots[1];
  const auto phi = sampled([&](double t) { return std::exp(-theta * t); }, 1.0, 16384);
  EXPECT_LE(decay_envelope_check(solve_steps(kTable, phi)), 1e-12);
}

TEST(Envelope, TableOne) {
  EXPECT_LE(decay_envelope_check(solve_steps(kTable, linear_phi())), 5e-4);
}

TEST(Envelope, FundamentalFunctionFlatSegment) {
  const ProblemParams p{0.3, 1.0};
  const auto y = fundamental_function(p);
  // On (δ, 2δ) y stays at 1 while the envelope decays: an expected exception.
  EXPECT_NEAR(decay_envelope_check(y), 1.0 - std::exp(-0.3), 1e-12);
  EXPECT_LE(decay_envelope_check(y, 2.0), 1e-12);
}
