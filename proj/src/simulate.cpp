#include "deltarec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>
#include <limits>

#include "deltarec/core.hpp"
#include "deltarec/errors.hpp"

namespace deltarec {
namespace {

constexpr std::size_t kBlock = 64;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double quantile_discrete(const DiscreteSurvival& d, double u) {
  const auto& s = d.survival;
  const auto it = std::partition_point(s.begin(), s.end(), [u](double g) { return g > u; });
  if (it != s.end()) return d.points[static_cast<std::size_t>(it - s.begin())];
  const std::size_t L = s.size() - 1;
  if (L == 0 || !(s[L] > 0.0) || !(s[L] < s[L - 1])) return d.points[L];
  const double ratio = s[L] / s[L - 1];
  const double gap = d.points[L] - d.points[L - 1];
  const double k = std::ceil(std::log(u / s[L]) / std::log(ratio));
  return d.points[L] + std::max(1.0, k) * gap;
}

double quantile_grid(const ContinuousSolution& g, double u) {
  const auto& v = g.values;
  if (v.front() <= u) return g.origin;
  const auto it = std::partition_point(v.begin(), v.end(), [u](double y) { return y > u; });
  if (it == v.end()) {
    const double yT = v.back();
    if (!(g.tail_beyond > 0.0) || !(yT > 0.0)) return g.horizon();
    const double theta = yT / g.tail_beyond;
    return g.horizon() + std::log(yT / u) / theta;
  }
  const auto i = static_cast<std::size_t>(it - v.begin());
  const double v0 = v[i - 1];
  const double v1 = v[i];
  const double w = v0 > v1 ? (v0 - u) / (v0 - v1) : 1.0;
  return g.knot(i - 1) + g.grid_step * w;
}

double quantile_closed(const ClosedFormSurvival& f, double u) {
  if (eval_survival(f, f.origin) <= u) return f.origin;
  if (f.lattice()) {
    auto below = [&](double k) { return eval_survival(f, f.origin + k) <= u; };
    double hi = 1.0;
    while (!below(hi)) hi *= 2.0;
    double lo = hi / 2.0 < 1.0 ? 0.0 : hi / 2.0;  // G(origin + lo) > u
    while (hi - lo > 1.0) {
      const double mid = std::floor(0.5 * (lo + hi));
      (below(mid) ? hi : lo) = mid;
    }
    return f.origin + hi;
  }
  if (f.components.size() == 1 && f.components[0].kind == ComponentKind::exponential) {
    const Component& c = f.components[0];
    return f.origin + std::log(c.weight / u) / c.rate;
  }
  double min_rate = f.components.front().rate;
  for (const Component& c : f.components) min_rate = std::min(min_rate, c.rate);
  double lo = 0.0;
  double hi = 1.0 / min_rate;
  while (eval_survival(f, f.origin + hi) > u) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (eval_survival(f, f.origin + mid) > u ? lo : hi) = mid;
  }
  return f.origin + 0.5 * (lo + hi);
}

struct Block {
  double s_sum = 0.0;  // Σ_r (Σ_k D_k)
  double s_sq = 0.0;
  std::vector<double> d_sum, d_sq, z_sum, z_sq;

  explicit Block(std::size_t n) : d_sum(n, 0.0), d_sq(n, 0.0), z_sum(n, 0.0), z_sq(n, 0.0) {}

  void add(const Block& o) {
    s_sum += o.s_sum;
    s_sq += o.s_sq;
    for (std::size_t i = 0; i < d_sum.size(); ++i) {
      d_sum[i] += o.d_sum[i];
      d_sq[i] += o.d_sq[i];
      z_sum[i] += o.z_sum[i];
      z_sq[i] += o.z_sq[i];
    }
  }
};

Block reduce_pairwise(std::vector<Block>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  Block left = reduce_pairwise(blocks, lo, mid);
  left.add(reduce_pairwise(blocks, mid, hi));
  return left;
}

// Calls visit(k, M_before, D_k) for k = 1..n−1 and z(k, Z_k) for k = 1..n.
template <class OnStep, class OnZ>
void simulate_path(const Sampler& sampler, const ProblemParams& params, std::size_t n,
                   std::mt19937_64& rng, OnStep&& on_step, OnZ&& on_z) {
  const double c = params.c;
  double M = sampler(rng);
  double N = 1.0;
  on_z(std::size_t{1}, N - c * M);
  for (std::size_t k = 2; k <= n; ++k) {
    const double x = sampler(rng);
    const double record = x > M + params.delta ? 1.0 : 0.0;
    const double next = std::max(M, x);
    on_step(k - 1, M, record - c * (next - M));
    N += record;
    M = next;
    on_z(k, N - c * M);
  }
}

double mean_se(double sum, double sq, double count, double* se) {
  const double mean = sum / count;
  const double var = count > 1.0 ? std::max(0.0, (sq - sum * mean) / (count - 1.0)) : 0.0;
  *se = std::sqrt(var / count);
  return mean;
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
}

double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

Sampler::Sampler(Survival member) : member_(std::move(member)) {
  std::visit([](const auto& m) { m.validate(); }, member_);
}

double Sampler::quantile(double u) const {
  if (const auto* d = std::get_if<DiscreteSurvival>(&member_)) return quantile_discrete(*d, u);
  if (const auto* g = std::get_if<ContinuousSolution>(&member_)) return quantile_grid(*g, u);
  return quantile_closed(std::get<ClosedFormSurvival>(member_), u);
}

std::vector<double> sample(const Survival& member, std::size_t count, std::uint64_t seed) {
  const Sampler s(member);
  auto rng = make_stream(seed, 0);
  std::vector<double> out(count);
  for (double& x : out) x = s(rng);
  return out;
}

std::vector<PathState> run_path(const Survival& member, const ProblemParams& params,
                                std::size_t n, std::uint64_t seed) {
  params.validate();
  if (n < 1) throw ValidationError("path length must be at least 1");
  const Sampler s(member);
  auto rng = make_stream(seed, 0);
  std::vector<PathState> path;
  path.reserve(n);
  PathState st;
  for (std::size_t k = 1; k <= n; ++k) {
    const double x = s(rng);
    if (k == 1) {
      st.M = x;
      st.N = 1;
    } else {
      if (x > st.M + params.delta) ++st.N;
      st.M = std::max(st.M, x);
    }
    st.n = k;
    st.x = x;
    st.Z = static_cast<double>(st.N) - params.c * st.M;
    path.push_back(st);
  }
  return path;
}

MartingaleReport martingale_test(const Survival& member, const ProblemParams& params,
                                 const MartingaleConfig& config) {
  params.validate();
  if (config.replicates < 100) throw ValidationError("martingale_test needs >= 100 replicates");
  if (config.n < 2) throw ValidationError("martingale_test needs paths of length >= 2");
  const Sampler sampler(member);
  const std::size_t n = config.n;
  const std::size_t R = config.replicates;
  const std::size_t nblocks = (R + kBlock - 1) / kBlock;
  std::vector<Block> blocks(nblocks, Block(n));

  auto work = [&](std::size_t b) {
    Block& blk = blocks[b];
    const std::size_t end = std::min(R, (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < end; ++r) {
      auto rng = make_stream(config.seed, r);
      double s = 0.0;
      simulate_path(
          sampler, params, n, rng,
          [&](std::size_t k, double, double d) {
            blk.d_sum[k - 1] += d;
            blk.d_sq[k - 1] += d * d;
            s += d;
          },
          [&](std::size_t k, double z) {
            blk.z_sum[k - 1] += z;
            blk.z_sq[k - 1] += z * z;
          });
      blk.s_sum += s;
      blk.s_sq += s * s;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(nblocks)));
  if (threads == 1) {
    for (std::size_t b = 0; b < nblocks; ++b) work(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t b = t; b < nblocks; b += threads) work(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  const Block total = reduce_pairwise(blocks, 0, nblocks);

  MartingaleReport rep;
  rep.replicates = R;
  rep.horizon = n;
  const double Rd = static_cast<double>(R);
  const double steps = static_cast<double>(n - 1);
  double s_se = 0.0;
  const double s_mean = mean_se(total.s_sum, total.s_sq, Rd, &s_se);
  rep.pooled_increment = s_mean / steps;
  rep.pooled_se = s_se / steps;
  rep.mean_increment.resize(n - 1);
  rep.increment_se.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    rep.mean_increment[k] = mean_se(total.d_sum[k], total.d_sq[k], Rd, &rep.increment_se[k]);
  }
  rep.mean_Z.resize(n);
  rep.Z_se.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    rep.mean_Z[k] = mean_se(total.z_sum[k], total.z_sq[k], Rd, &rep.Z_se[k]);
  }
  rep.reference = 1.0 - params.c * mean_of(member);

  const double m = config.se_multiplier;
  auto finite = [](double v) { return std::isfinite(v); };
  rep.stable = finite(rep.pooled_increment) && finite(rep.pooled_se) &&
               std::all_of(rep.mean_Z.begin(), rep.mean_Z.end(), finite) &&
               std::all_of(rep.Z_se.begin(), rep.Z_se.end(), finite) && finite(rep.reference);
  rep.increment_pass = std::fabs(rep.pooled_increment) <= m * rep.pooled_se;
  rep.z_pass = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(std::fabs(rep.mean_Z[k] - rep.reference) <= m * rep.Z_se[k])) rep.z_pass = false;
  }
  rep.pass = rep.stable && rep.increment_pass && rep.z_pass;
  return rep;
}

std::vector<ResidualBin> conditional_residual_probe(const Survival& member,
                                                    const ProblemParams& params, std::size_t bins,
                                                    std::size_t paths, std::size_t n,
                                                    std::uint64_t seed) {
  params.validate();
  if (bins < 1) throw ValidationError("need at least one bin");
  if (n < 2 || paths < 1) throw ValidationError("need paths of length >= 2");
  const Sampler sampler(member);
  std::vector<std::pair<double, double>> samples;  // (M, D)
  samples.reserve(paths * (n - 1));
  for (std::size_t r = 0; r < paths; ++r) {
    auto rng = make_stream(seed, r);
    simulate_path(
        sampler, params, n, rng,
        [&](std::size_t, double M, double d) { samples.emplace_back(M, d); },
        [](std::size_t, double) {});
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  auto H = [&](double x) {
    try {
      return residual_H(member, params, x);
    } catch (const OutOfRangeError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  std::vector<ResidualBin> out;
  const std::size_t total = samples.size();
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = total * b / bins;
    const std::size_t hi = total * (b + 1) / bins;
    ResidualBin bin;
    bin.count = hi - lo;
    bin.underpopulated = bin.count < 30;
    if (bin.count == 0) {
      out.push_back(bin);
      continue;
    }
    bin.m_lo = samples[lo].first;
    bin.m_hi = samples[hi - 1].first;
    double sum = 0.0;
    double sq = 0.0;
    double hsum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum += samples[i].second;
      sq += samples[i].second * samples[i].second;
      hsum += H(samples[i].first);
    }
    const double cnt = static_cast<double>(bin.count);
    bin.mean_increment = mean_se(sum, sq, cnt, &bin.se);
    bin.h_mean = hsum / cnt;
    bin.h_center = H(0.5 * (bin.m_lo + bin.m_hi));
    bin.consistent = std::fabs(bin.mean_increment - bin.h_mean) <= 4.0 * bin.se;
    out.push_back(bin);
  }
  return out;
}

}  // namespace deltarec
