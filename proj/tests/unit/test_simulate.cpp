#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "deltarec/constructors.hpp"
#include "deltarec/core.hpp"
#include "deltarec/dde.hpp"
#include "deltarec/errors.hpp"
#include "deltarec/simulate.hpp"

using namespace deltarec;

namespace {

const ProblemParams kExpParams{1.0 / std::numbers::e, 1.0};

struct MeanSe {
  double mean, se;
};

MeanSe stats(const std::vector<double>& v) {
  double s = 0.0, q = 0.0;
  for (double x : v) s += x;
  const double n = static_cast<double>(v.size());
  const double m = s / n;
  for (double x : v) q += (x - m) * (x - m);
  return {m, std::sqrt(q / (n - 1) / n)};
}

double fraction_above(const std::vector<double>& v, double x) {
  std::size_t k = 0;
  for (double d : v) k += d > x;
  return static_cast<double>(k) / static_cast<double>(v.size());
}

}  // namespace

TEST(Sampler, OpenUniformStaysInside) {
  auto rng = make_stream(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = open_uniform(rng);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Sampler, GeometricSurvivalAtOne) {
  const auto draws = sample(geometric_law(0.2), 1000000, 42);
  const double p = fraction_above(draws, 1.0);
  const double se = std::sqrt(0.64 * 0.36 / 1e6);
  EXPECT_NEAR(p, 0.64, 4 * se);
  for (double d : draws) ASSERT_EQ(d, std::floor(d));
}

TEST(Sampler, ExponentialMean) {
  const auto draws = sample(exponential_law(1.0), 1000000, 7);
  EXPECT_NEAR(stats(draws).mean, 1.0, 4e-3);
}

TEST(Sampler, AtomFrequencies) {
  const ProblemParams p{0.5, 0.2};
  const std::vector<double> pts{0.0, 0.5, 1.2, 3.2};
  const auto d = construct_bounded(p, pts, 0.8);
  const std::size_t n = 400000;
  const auto draws = sample(d, n, 3);
  double prev = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double prob = prev - d.survival[i];
    std::size_t hits = 0;
    for (double x : draws) hits += x == pts[i];
    const double se = std::sqrt(prob * (1 - prob) / n);
    EXPECT_NEAR(static_cast<double>(hits) / n, prob, 4 * se + 1e-12) << i;
    prev = d.survival[i];
  }
}

TEST(Sampler, TruncatedTableContinuesGeometrically) {
  const auto d = construct_neg_delta({1.0, -1.0}, std::vector<double>{0, 1, 2, 3, 4, 5}, 0.5, 5);
  const std::size_t n = 400000;
  const auto draws = sample(d, n, 9);
  // Beyond the table the law continues with G(n) = 0.5·2^{−n}.
  for (double x : {4.0, 6.0, 8.0}) {
    const double g = 0.5 * std::pow(2.0, -x);
    EXPECT_NEAR(fraction_above(draws, x), g, 4 * std::sqrt(g * (1 - g) / n) + 1e-12) << x;
  }
}

TEST(Sampler, GridMembers) {
  const auto grid = tabulate(exponential_law(1.0), kExpParams, 1024, 10.0);
  const auto draws = sample(grid, 400000, 11);
  const auto s = stats(draws);
  EXPECT_NEAR(s.mean, 1.0, 4 * s.se);
  const double g = std::exp(-12.0);  // past the horizon: exponential continuation
  EXPECT_NEAR(fraction_above(draws, 12.0), g, 4 * std::sqrt(g / 400000.0) + 1e-9);

  const auto table = solve_steps({0.2, 1.0}, InitialFunction::polynomial({1.0, -0.5}, 1.0));
  const auto t = stats(sample(table, 400000, 12));
  EXPECT_NEAR(t.mean, 2.5, 4 * t.se);
}

TEST(Sampler, QuantileInvertsSurvival) {
  const Sampler s(Survival(exponential_law(0.7, 1.5)));
  for (double u : {0.01, 0.3, 0.5, 0.99}) {
    EXPECT_NEAR(s.quantile(u), 1.5 - std::log(u) / 0.7, 1e-12);
  }
  const auto g = gamma_exp_mixture(1.0, 1.0);
  const Sampler sg(Survival(g.law));
  for (double u : {0.05, 0.5, 0.95}) {
    EXPECT_NEAR(eval_survival(g.law, sg.quantile(u)), u, 1e-10);
  }
}

TEST(Sampler, DeterministicPerSeed) {
  EXPECT_EQ(sample(exponential_law(1.0), 1000, 5), sample(exponential_law(1.0), 1000, 5));
  EXPECT_NE(sample(exponential_law(1.0), 1000, 5), sample(exponential_law(1.0), 1000, 6));
}

TEST(Path, FirstObservationIsARecord) {
  const auto path = run_path(exponential_law(1.0), kExpParams, 1, 17);
  ASSERT_EQ(path.size(), 1u);
  EXPECT_EQ(path[0].N, 1u);
  EXPECT_EQ(path[0].M, path[0].x);
  EXPECT_DOUBLE_EQ(path[0].Z, 1.0 - kExpParams.c * path[0].x);
}

TEST(Path, RecordRuleAndMonotonicity) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto path = run_path(exponential_law(1.0), kExpParams, 100, seed);
    for (std::size_t k = 1; k < path.size(); ++k) {
      const auto& prev = path[k - 1];
      const auto& cur = path[k];
      EXPECT_EQ(cur.n, k + 1);
      EXPECT_EQ(cur.M, std::max(prev.M, cur.x));
      EXPECT_EQ(cur.N, prev.N + (cur.x > prev.M + 1.0 ? 1u : 0u));
      EXPECT_DOUBLE_EQ(cur.Z, static_cast<double>(cur.N) - kExpParams.c * cur.M);
    }
  }
}

TEST(Path, NegativeDelayCountsWeakRecords) {
  const ProblemParams p{1.0, -1.0};
  std::vector<double> pts;
  for (int i = 0; i <= 60; ++i) pts.push_back(i);
  const auto d = construct_neg_delta(p, pts, 0.5, 60);
  std::size_t ties = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto path = run_path(d, p, 20, seed);
    for (std::size_t k = 1; k < path.size(); ++k) {
      if (path[k].x == path[k - 1].M) {
        ++ties;
        EXPECT_EQ(path[k].N, path[k - 1].N + 1);
      }
      if (path[k].x < path[k - 1].M) EXPECT_EQ(path[k].N, path[k - 1].N);
    }
  }
  EXPECT_GT(ties, 100u);
}

TEST(Path, MaximaLaw) {
  const std::size_t runs = 20000;
  const std::size_t n = 5;
  for (double x : {0.5, 1.5, 3.0}) {
    std::size_t below = 0;
    for (std::uint64_t seed = 0; seed < runs; ++seed) {
      below += run_path(exponential_law(1.0), kExpParams, n, seed + 1000).back().M <= x;
    }
    const double want = std::pow(1.0 - std::exp(-x), static_cast<double>(n));
    const double se = std::sqrt(want * (1 - want) / runs);
    EXPECT_NEAR(static_cast<double>(below) / runs, want, 4 * se) << x;
  }
}

TEST(Martingale, ExponentialMemberPasses) {
  MartingaleConfig cfg;
  const auto rep = martingale_test(exponential_law(1.0), kExpParams, cfg);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.increment_pass);
  EXPECT_TRUE(rep.z_pass);
  EXPECT_NEAR(rep.reference, 1.0 - 1.0 / std::numbers::e, 1e-12);
  EXPECT_EQ(rep.mean_Z.size(), 200u);
  EXPECT_EQ(rep.mean_increment.size(), 199u);
  EXPECT_NEAR(rep.mean_Z.back(), rep.reference, 4 * rep.Z_se.back());
}

TEST(Martingale, GeometricMixturePasses) {
  const ProblemParams p{0.16, 1.0};
  const Survival m = mix(geometric_law(0.2), geometric_law(0.8), 0.5);
  MartingaleConfig cfg;
  cfg.seed = 5;
  EXPECT_TRUE(martingale_test(m, p, cfg).pass);
}

TEST(Martingale, WrongRateFails) {
  MartingaleConfig cfg;
  const auto rep = martingale_test(exponential_law(1.0), {0.5, 1.0}, cfg);
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.increment_pass);
  EXPECT_LT(rep.pooled_increment, -4 * rep.pooled_se);
}

TEST(Martingale, BitIdenticalAcrossThreadCounts) {
  MartingaleConfig cfg;
  cfg.n = 50;
  cfg.replicates = 1000;
  cfg.seed = 77;
  const auto one = martingale_test(exponential_law(1.0), kExpParams, cfg);
  cfg.threads = 3;
  const auto three = martingale_test(exponential_law(1.0), kExpParams, cfg);
  EXPECT_EQ(one.pooled_increment, three.pooled_increment);
  EXPECT_EQ(one.pooled_se, three.pooled_se);
  EXPECT_EQ(one.mean_Z, three.mean_Z);
  EXPECT_EQ(one.Z_se, three.Z_se);
  EXPECT_EQ(one.mean_increment, three.mean_increment);
}

TEST(Martingale, Validation) {
  MartingaleConfig cfg;
  cfg.replicates = 50;
  EXPECT_THROW(martingale_test(exponential_law(1.0), kExpParams, cfg), ValidationError);
}

TEST(Probe, MemberBinsAreConsistent) {
  const auto bins = conditional_residual_probe(exponential_law(1.0), kExpParams, 10, 2000, 50, 3);
  ASSERT_EQ(bins.size(), 10u);
  for (const auto& b : bins) {
    EXPECT_FALSE(b.underpopulated);
    EXPECT_TRUE(b.consistent) << b.m_lo;
    EXPECT_NEAR(b.h_mean, 0.0, 1e-12);
  }
}

TEST(Probe, NonMemberDrift) {
  const ProblemParams p{0.5, 1.0};
  const auto bins = conditional_residual_probe(exponential_law(1.0), p, 20, 4000, 10, 4);
  for (const auto& b : bins) {
    const double mid = 0.5 * (b.m_lo + b.m_hi);
    EXPECT_NEAR(b.h_center, std::exp(-mid) * (std::exp(-1.0) - 0.5), 1e-12);
    EXPECT_LT(b.h_mean, 0.0);
    EXPECT_TRUE(b.consistent) << mid;
  }
  EXPECT_NEAR(residual_H(exponential_law(1.0), p, 0.0), std::exp(-1.0) - 0.5, 1e-15);
}

TEST(Probe, SingleBinMatchesPooledIncrement) {
  MartingaleConfig cfg;
  cfg.n = 30;
  cfg.replicates = 500;
  cfg.seed = 21;
  const auto rep = martingale_test(exponential_law(1.0), kExpParams, cfg);
  const auto bins = conditional_residual_probe(exponential_law(1.0), kExpParams, 1, 500, 30, 21);
  ASSERT_EQ(bins.size(), 1u);
  EXPECT_EQ(bins[0].count, 500u * 29u);
  EXPECT_NEAR(bins[0].mean_increment, rep.pooled_increment, 1e-12);
}

TEST(Probe, UnderpopulatedBinsReported) {
  const auto bins = conditional_residual_probe(exponential_law(1.0), kExpParams, 50, 10, 2, 1);
  ASSERT_EQ(bins.size(), 50u);
  std::size_t flagged = 0;
  for (const auto& b : bins) flagged += b.underpopulated;
  EXPECT_EQ(flagged, 50u);
}
