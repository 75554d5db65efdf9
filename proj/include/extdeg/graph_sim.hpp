#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "extdeg/philox.hpp"
#include "extdeg/stein_bounds.hpp"

// High-throughput G(n,p) degree sampling and Monte Carlo estimation of the
// exceedance-count law, empirical total variation distance and extreme
// order-statistic CDFs, plus the i.i.d. standard-normal baseline.
//
// Determinism contract: every result is a pure function of
// (params, trials, seed). Trial i draws from Philox stream (seed, i), so
// worker_hint (thread count) never changes a single bit of output.

namespace extdeg {

struct SimConfig {
  ModelParams params;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  int worker_hint = 1;  // parallelism hint, no semantic effect
};

struct DegreeSample {
  std::vector<std::int32_t> degrees;
};

// Samples the degree sequence of one G(n,p) graph without materializing
// adjacency: edges are visited by geometric skipping over the linearized
// upper-triangular pair index (expected O(n + E) work), with the complement
// graph sampled instead when p > 1/2. For p == 1/2 exactly, each pair is a
// fair coin and edges are generated 64 pairs per draw with bit-sliced
// column counters, which is what makes dense simulations at n ~ 4096
// affordable.
class DegreeSampler {
 public:
  DegreeSampler(std::int64_t n, double p);  // n >= 2, 0 < p < 1

  void sample(Philox& rng, std::span<std::int32_t> out);
  DegreeSample sample(Philox& rng);

  std::int64_t n() const { return n_; }
  double p() const { return p_; }

 private:
  void sample_coin(Philox& rng, std::span<std::int32_t> out);
  void sample_geometric(Philox& rng, std::span<std::int32_t> out);

  std::int64_t n_;
  double p_;
  bool coin_path_;
  bool complement_;
  double edge_prob_;    // effective probability for the geometric walk
  double inv_log_q_;    // 1 / log(1 - edge_prob)
  int plane_count_ = 0;
  std::vector<std::uint64_t> planes_;  // bit-sliced column counters
};

// Number of entries with value > y (strict).
std::int64_t count_exceedances(std::span<const std::int32_t> degrees, double y);

// m-th largest entry, 1 <= m <= size, by selection.
std::int32_t mth_largest(std::span<const std::int32_t> degrees, int m);

struct EmpiricalPmf {
  std::vector<std::uint64_t> counts;  // counts[k] = #{trials with W = k}
  std::int64_t trials = 0;
  // Contiguous trial blocks (for block-bootstrap uncertainty): counts per
  // block, padded to counts.size(), plus each block's trial count.
  std::vector<std::vector<std::uint64_t>> block_counts;
  std::vector<std::int64_t> block_trials;

  double phat(std::size_t k) const;
  double std_error(std::size_t k) const;  // sqrt(phat (1-phat) / trials)
};

inline constexpr int kBootstrapBlocks = 100;

// Empirical pmf of W = #{i : d_i > y} with y from thresholds(params).
EmpiricalPmf mc_wn_pmf(const SimConfig& config);

// (1/2) sum_k |phat_k - Poisson(lambda)_k|, including the Poisson tail
// mass beyond the largest observed k.
double empirical_tvd(const EmpiricalPmf& pmf, double lambda);

// Block-bootstrap standard error of empirical_tvd (resamples blocks with
// replacement; deterministic given seed).
double tvd_bootstrap_se(const EmpiricalPmf& pmf, double lambda, int resamples,
                        std::uint64_t seed);

// For each t in t_grid: fraction of trials with d_{m:n} <= y(t). One pass
// over the samples serves the whole grid.
std::vector<double> mc_extreme_cdf(const SimConfig& config, int m,
                                   std::span<const double> t_grid);

// Same pipeline with i.i.d. standard normals in place of normalized
// degrees: returns the empirical P(xi_{m:n} <= a_n t + b_n) per t.
std::vector<double> normal_baseline(std::int64_t n, int m, std::int64_t trials,
                                    std::uint64_t seed,
                                    std::span<const double> t_grid);

// One-pass combined run used by the CLI: W-pmf at params.t, extreme-CDF
// entries for every (m, t), and an exhaustive check of the order-statistic
// duality (d_{m:n} <= y(t)  <=>  W(t) <= m-1), which must never fail.
struct SimReport {
  EmpiricalPmf w_pmf;
  std::vector<std::vector<double>> extreme_cdf;  // [m index][t index]
  std::int64_t duality_violations = 0;
};
SimReport run_simulation(const SimConfig& config, std::span<const int> ms,
                         std::span<const double> t_grid);

}  // namespace extdeg
