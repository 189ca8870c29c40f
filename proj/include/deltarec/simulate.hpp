#pragma once

// Monte Carlo check that Z_n = N_n − c·M_n is a martingale, where N_n counts
// δ-records (X_n > M_{n−1} + δ, with X_1 a record by convention) and M_n is
// the running maximum.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "deltarec/params.hpp"
#include "deltarec/survival.hpp"

namespace deltarec {

/// Independent generator for (seed, stream) via splitmix64 key derivation.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Uniform in the open interval (0, 1) from 53 random bits.
double open_uniform(std::mt19937_64& rng);

/// Inverse-CDF sampler: X = inf{x : G(x) ≤ U}. Closed forms are sampled exactly
/// (bisection for non-exponential continuous laws, integer search on the
/// lattice); grids interpolate linearly and continue past the horizon with
/// an exponential tail matching the stored tail integral; truncated tables
/// continue geometrically with the last ratio.
class Sampler {
 public:
  explicit Sampler(Survival member);
  double quantile(double u) const;
  double operator()(std::mt19937_64& rng) const { return quantile(open_uniform(rng)); }
  const Survival& member() const noexcept { return member_; }

 private:
  Survival member_;
};

std::vector<double> sample(const Survival& member, std::size_t count, std::uint64_t seed);

struct PathState {
  std::size_t n = 0;
  double x = 0.0;  ///< X_n
  double M = 0.0;
  std::size_t N = 0;
  double Z = 0.0;
};

std::vector<PathState> run_path(const Survival& member, const ProblemParams& params,
                                std::size_t n, std::uint64_t seed);

struct MartingaleConfig {
  std::size_t n = 200;
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double se_multiplier = 4.0;
};

struct MartingaleReport {
  std::size_t replicates = 0;
  std::size_t horizon = 0;
  double pooled_increment = 0.0;  ///< mean of D_k = I_{k+1} − c(M_{k+1} − M_k)
  double pooled_se = 0.0;
  std::vector<double> mean_increment;  ///< per step k = 1..n−1
  std::vector<double> increment_se;
  std::vector<double> mean_Z;  ///< per n = 1..horizon
  std::vector<double> Z_se;
  double reference = 0.0;  ///< 1 − c·E[X]
  bool increment_pass = false;
  bool z_pass = false;
  bool stable = true;  ///< all statistics finite
  bool pass = false;
};

/// Replicates are split into fixed blocks reduced pairwise in block order, so
/// the report is bit-identical for a given seed regardless of thread count.
MartingaleReport martingale_test(const Survival& member, const ProblemParams& params,
                                 const MartingaleConfig& config);

struct ResidualBin {
  double m_lo = 0.0;
  double m_hi = 0.0;
  std::size_t count = 0;
  double mean_increment = 0.0;
  double se = 0.0;
  double h_center = 0.0;  ///< H at the bin midpoint
  double h_mean = 0.0;    ///< mean of H(M) over the bin's samples
  bool underpopulated = false;  ///< fewer than 30 samples
  bool consistent = false;      ///< |mean − h_mean| ≤ 4·SE
};

/// Empirical E[D | M ∈ bin] against the analytic residual H, with equal-count bins.
std::vector<ResidualBin> conditional_residual_probe(const Survival& member,
                                                    const ProblemParams& params, std::size_t bins,
                                                    std::size_t paths, std::size_t n,
                                                    std::uint64_t seed);

}  // namespace deltarec
