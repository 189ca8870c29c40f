#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "deltarec/constructors.hpp"
#include "deltarec/core.hpp"
#include "deltarec/dde.hpp"
#include "deltarec/errors.hpp"
#include "deltarec/transforms.hpp"
#include "support/oracles.hpp"

using namespace deltarec;

namespace {

const ProblemParams kTable{0.2, 1.0};

// ∫₀^∞ w(t)·y(t) dt for the exact Table-1 solution, cell by cell.
double table_one_integral(const std::function<double(double)>& w) {
  static const oracle::PolynomialSteps y({1.0, -0.5}, 0.2, 1.0, 151);
  double acc = 0.0;
  for (int k = 0; k < 150; ++k) {
    acc += oracle::simpson([&](double t) { return w(t) * y(t); }, k, k + 1.0 - 1e-15, 400);
  }
  return acc;
}

}  // namespace

TEST(Laplace, ExponentialMembers) {
  for (double theta : solve_exponential_rates(kTable).roots) {
    const Survival e = exponential_law(theta);
    for (double u : {0.5, 1.0, 2.0}) {
      EXPECT_NEAR(laplace(e, kTable, u), theta / (theta + u), 1e-8);
    }
    const Survival grid = tabulate(exponential_law(theta), kTable, 1024, 60.0);
    for (double u : {0.5, 1.0, 2.0}) {
      EXPECT_NEAR(laplace(grid, kTable, u), theta / (theta + u), 1e-8);
    }
  }
}

TEST(Laplace, ShiftedOrigin) {
  const double theta = solve_exponential_rates(kTable).roots[0];
  const Survival e = exponential_law(theta, 2.0);
  EXPECT_NEAR(laplace(e, kTable, 1.0), std::exp(-2.0) * theta / (theta + 1.0), 1e-10);
}

TEST(Laplace, SmallArgumentLimit) {
  const Survival e = exponential_law(1.0);
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  EXPECT_NEAR(laplace(e, p, 1e-6), 1.0, 1e-4);
  const auto s = solve_steps(kTable, InitialFunction::polynomial({1.0, -0.5}, 1.0));
  EXPECT_NEAR(laplace(s, kTable, 1e-6), 1.0, 1e-4);
}

TEST(Laplace, TableOneAgainstDirectQuadrature) {
  const auto s = solve_steps(kTable, InitialFunction::polynomial({1.0, -0.5}, 1.0));
  for (double u : {0.3, 1.0, 2.5}) {
    // E e^{−uX} = 1 − u∫₀^∞ e^{−ut}G(t) dt.
    const double direct = 1.0 - u * table_one_integral([u](double t) { return std::exp(-u * t); });
    EXPECT_NEAR(laplace(s, kTable, u), direct, 1e-6) << u;
  }
}

TEST(Laplace, Rejections) {
  const Survival e = exponential_law(1.0);
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  EXPECT_THROW(laplace(e, p, 0.0), ValidationError);
  EXPECT_THROW(laplace(e, p, -1.0), ValidationError);
  EXPECT_THROW(laplace(e, {0.5, 1.0}, 1.0), ValidationError);  // not a member
  EXPECT_THROW(laplace(geometric_law(0.2), {0.16, 1.0}, 1.0), ValidationError);
}

TEST(Moments, ExponentialFactorials) {
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  const auto m = moments(exponential_law(1.0), p, 6);
  ASSERT_EQ(m.mu.size(), 6u);
  double fact = 1.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    fact *= static_cast<double>(n);
    EXPECT_NEAR(m.mu[n - 1] / fact, 1.0, 1e-6) << n;
  }
  for (double theta : solve_exponential_rates(kTable).roots) {
    const auto mt = moments(exponential_law(theta), kTable, 4);
    double f = 1.0;
    for (std::size_t n = 1; n <= 4; ++n) {
      f *= static_cast<double>(n) / theta;
      EXPECT_NEAR(mt.mu[n - 1] / f, 1.0, 1e-6) << theta << " " << n;
    }
  }
}

TEST(Moments, ShiftedExponential) {
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  const auto m = moments(exponential_law(1.0, 3.0), p, 3);
  EXPECT_NEAR(m.mu[0], 4.0, 1e-9);
  EXPECT_NEAR(m.mu[1], 9.0 + 2 * 3.0 + 2.0, 1e-8);  // E(3 + E)² = 9 + 6 + 2
  EXPECT_EQ(m.origin, 3.0);
}

TEST(Moments, GammaMean) {
  for (double delta : {0.5, 1.0, 2.0}) {
    const auto g = gamma_exp_mixture(delta, 1.0 / delta);
    const auto m = moments(g.law, g.params, 2);
    EXPECT_NEAR(m.mu[0], 2.0 * delta, 1e-9);
    EXPECT_NEAR(m.mu[1], 6.0 * delta * delta, 1e-8);  // k(k+1)/λ² with k = 2
    const auto mg = moments(g.grid, g.params, 2);
    EXPECT_NEAR(mg.mu[0], 2.0 * delta, 1e-6 * delta);
  }
}

TEST(Moments, SeedOnly) {
  const auto s = solve_steps(kTable, InitialFunction::polynomial({1.0, -0.5}, 1.0));
  const auto m = moments(s, kTable, 1);
  ASSERT_EQ(m.mu.size(), 1u);
  EXPECT_NEAR(m.mu[0], 2.5, 1e-9);
  EXPECT_NEAR(m.mu1_identity, 2.5, 1e-12);
  EXPECT_LE(m.l0_consistency, 1e-12);
}

TEST(Moments, TableOneAgainstDirectQuadrature) {
  const auto s = solve_steps(kTable, InitialFunction::polynomial({1.0, -0.5}, 1.0));
  const auto m = moments(s, kTable, 6);
  for (std::size_t n = 1; n <= 6; ++n) {
    const double nn = static_cast<double>(n);
    // μ_n = n∫₀^∞ t^{n−1} G(t) dt.
    const double direct = nn * table_one_integral([nn](double t) { return std::pow(t, nn - 1); });
    EXPECT_NEAR(m.mu[n - 1] / direct, 1.0, 1e-4) << n;
  }
  EXPECT_GE(m.mu[1], m.mu[0] * m.mu[0]);
  for (double mu : m.mu) EXPECT_GT(mu, 0.0);
}

TEST(Moments, DerivativeOfTransformAtZero) {
  const auto s = solve_steps(kTable, InitialFunction::polynomial({1.0, -0.5}, 1.0));
  const double h = 1e-4;
  const double slope = (1.0 - laplace(s, kTable, h)) / h;
  const double mu1 = moments(s, kTable, 1).mu[0];
  EXPECT_NEAR(slope / mu1, 1.0, 1e-3);
}

TEST(Moments, Rejections) {
  const ProblemParams p{1.0 / std::numbers::e, 1.0};
  EXPECT_THROW(moments(exponential_law(1.0), p, 13), ValidationError);
  EXPECT_THROW(moments(exponential_law(1.0), p, 0), ValidationError);
  EXPECT_THROW(moments(exponential_law(1.0), {0.5, 1.0}, 3), ValidationError);
  EXPECT_NO_THROW(moments(exponential_law(1.0), p, 14, 14));
}
