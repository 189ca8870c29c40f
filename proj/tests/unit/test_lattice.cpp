#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "deltarec/constructors.hpp"
#include "deltarec/core.hpp"
#include "deltarec/errors.hpp"
#include "deltarec/lattice.hpp"
#include "support/oracles.hpp"

using namespace deltarec;

namespace {

// y(i) = y(kδ) − c·Σ_{j=(k−1)δ}^{i−δ−1} y(j), evaluated literally.
std::vector<double> step_sums(const std::vector<double>& phi, double c, std::size_t n) {
  const std::size_t d = phi.size() - 1;
  std::vector<double> y(phi);
  y.resize(n + 1);
  for (std::size_t i = d + 1; i <= n; ++i) {
    const std::size_t k = (i - 1) / d;  // i ∈ (kδ, (k+1)δ]
    double s = 0.0;
    for (std::size_t j = (k - 1) * d; j + d < i; ++j) s += y[j];
    y[i] = y[k * d] - c * s;
  }
  return y;
}

}  // namespace

TEST(LatticeSolve, GeometricPrefixIsExact) {
  const auto s = solve_steps_lattice({0.16, 1.0}, InitialFunction::lattice({0.8, 0.64}), 200);
  ASSERT_EQ(s.size(), 201u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(s.values[i], std::pow(0.8, i + 1.0), 1e-14) << i;
  }
}

TEST(LatticeSolve, FirstStepByHand) {
  const auto one = solve_steps_lattice({0.3, 1.0}, InitialFunction::lattice({0.9, 0.6}), 5);
  EXPECT_DOUBLE_EQ(one.values[2], 0.6 - 0.3 * 0.9);
  const auto two =
      solve_steps_lattice({0.1, 2.0}, InitialFunction::lattice({0.9, 0.7, 0.5}), 10);
  EXPECT_NEAR(two.values[3], 0.41, 1e-15);
  EXPECT_NEAR(two.values[4], 0.34, 1e-15);
}

TEST(LatticeSolve, MatchesLiteralStepSums) {
  std::mt19937_64 rng(11);
  for (int delta : {1, 2, 3, 5, 8}) {
    for (int trial = 0; trial < 5; ++trial) {
      const double thr = threshold_lattice(delta) / delta;
      const double c = thr * std::uniform_real_distribution<double>(0.2, 1.5)(rng);
      const auto phi = oracle::random_lattice_phi(rng, delta, 0.3);
      const auto s = solve_steps_lattice({c, static_cast<double>(delta)},
                                         InitialFunction::lattice(phi), 300);
      const auto ref = step_sums(phi, c, 300);
      for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_NEAR(s.values[i], ref[i], 1e-14) << delta << " " << i;
      }
    }
  }
}

TEST(LatticeSolve, NegBinRoundTrip) {
  for (int delta : {1, 2, 4}) {
    const auto nb = geom_negbin_mixture(delta, 0.5 / delta, 200);
    std::vector<double> prefix(nb.table.survival.begin(), nb.table.survival.begin() + delta + 1);
    const auto s = solve_steps_lattice(nb.params, InitialFunction::lattice(prefix), 200);
    for (std::size_t i = 0; i <= 200; ++i) {
      EXPECT_NEAR(s.values[i], nb.table.survival[i], 1e-14) << delta << " " << i;
    }
    EXPECT_TRUE(positivity_scan_lattice(s).positive_on_horizon);
  }
}

TEST(LatticeSolve, SurvivalTableIsMember) {
  const ProblemParams p{0.16, 1.0};
  const auto s = solve_steps_lattice(p, InitialFunction::lattice({0.5, 0.34}), 150);
  const Survival table = s.to_survival();
  std::vector<double> probes;
  for (int i = 0; i < 140; ++i) probes.push_back(i);
  EXPECT_LE(residual_sup(table, p, probes).sup, 1e-12);
  // Tail beyond the table against the closed-form mixture of Geom(0.2) and Geom(0.8).
  const Survival mixed = mix(geometric_law(0.2), geometric_law(0.8), 0.5);
  EXPECT_NEAR(tail_integral(table, 100.0), tail_integral(mixed, 100.0), 1e-14);
  EXPECT_NEAR(tail_integral(table, 0.0), tail_integral(mixed, 0.0), 1e-13);
}

TEST(LatticeSolve, Validation) {
  const auto phi = InitialFunction::lattice({0.8, 0.64});
  EXPECT_THROW(solve_steps_lattice({0.16, 1.5}, phi, 10), ValidationError);
  EXPECT_THROW(solve_steps_lattice({0.16, 2.0}, phi, 10), ValidationError);
  EXPECT_THROW(solve_steps_lattice({0.16, 1.0}, InitialFunction::lattice({0.6, 0.64}), 10),
               ValidationError);
  EXPECT_THROW(solve_steps_lattice({0.16, 1.0}, InitialFunction::lattice({1.0, 0.64}), 10),
               ValidationError);
  EXPECT_THROW(solve_steps_lattice({0.16, 1.0}, InitialFunction::polynomial({1.0, -0.1}, 1.0), 10),
               ValidationError);
}

TEST(Threshold, KnownValuesAndLimit) {
  EXPECT_DOUBLE_EQ(threshold_lattice(1), 0.25);
  EXPECT_NEAR(threshold_lattice(2), 8.0 / 27.0, 1e-16);
  const double big = threshold_lattice(100);
  EXPECT_LT(big, 1.0 / std::numbers::e);
  EXPECT_NEAR(big, 1.0 / std::numbers::e, 2e-3);
  for (int d = 1; d < 300; ++d) {
    EXPECT_LT(threshold_lattice(d), threshold_lattice(d + 1));
    EXPECT_LT(threshold_lattice(d), 1.0 / std::numbers::e);
  }
  EXPECT_THROW(threshold_lattice(0), ValidationError);
}

TEST(DecayBound, GeometricMembers) {
  for (double p : {0.2, 0.8}) {
    const double q = 1.0 - p;
    const auto s = solve_steps_lattice({0.16, 1.0}, InitialFunction::lattice({q, q * q}), 100);
    EXPECT_LE(decay_bound_check(s), 1e-15);
    // Equality at k = δ.
    EXPECT_GE(decay_bound_check(s), -1e-15);
  }
}

TEST(DecayBound, MixtureOfRoots) {
  const auto s = solve_steps_lattice({0.16, 1.0}, InitialFunction::lattice({0.5, 0.34}), 100);
  EXPECT_LE(decay_bound_check(s), 1e-12);
}

TEST(LatticePositivity, AboveThresholdAlwaysCrosses) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto phi = oracle::random_lattice_phi(rng, 1, 0.2 + 0.01 * trial);
    const auto s = solve_steps_lattice({0.3, 1.0}, InitialFunction::lattice(phi), 400);
    const auto v = positivity_scan_lattice(s);
    EXPECT_FALSE(v.positive_on_horizon);
    ASSERT_TRUE(v.first_nonpositive_t.has_value());
    const auto i = static_cast<std::size_t>(*v.first_nonpositive_t);
    EXPECT_LE(s.values[i], 0.0);
    for (std::size_t j = 0; j < i; ++j) EXPECT_GT(s.values[j], 0.0);
  }
}

TEST(LatticePositivity, TangentGeometric) {
  const auto s = solve_steps_lattice({0.25, 1.0}, InitialFunction::lattice({0.5, 0.25}), 1000);
  const auto v = positivity_scan_lattice(s);
  EXPECT_TRUE(v.positive_on_horizon);
  EXPECT_FALSE(v.first_nonpositive_t.has_value());
}
